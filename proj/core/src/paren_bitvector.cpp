#include "rmmtree/paren_bitvector.hpp"

#include <cctype>
#include <stdexcept>

namespace rmm {

paren_bitvector paren_bitvector::from_string(std::string_view s) {
    paren_bitvector p;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '1')
            p.push_back(true);
        else if (c == ')' || c == '0')
            p.push_back(false);
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw parse_error("unexpected character '" + std::string(1, c) + "'", i);
    }
    if (p.empty()) throw parse_error("empty parentheses sequence", 0);
    return p;
}

bool paren_bitvector::bit_at(uint64_t i) const {
    if (i >= len_) throw std::out_of_range("paren_bitvector: index out of range");
    return (*this)[i];
}

std::string paren_bitvector::to_string() const {
    std::string s;
    s.reserve(len_);
    for (uint64_t i = 0; i < len_; ++i) s.push_back((*this)[i] ? '(' : ')');
    return s;
}

}  // namespace rmm
