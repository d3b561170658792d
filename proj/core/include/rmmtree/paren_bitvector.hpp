#ifndef RMMTREE_PAREN_BITVECTOR_HPP
#define RMMTREE_PAREN_BITVECTOR_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rmmtree/bits.hpp"

namespace rmm {

/// Packed parentheses sequence, '(' = 1 and ')' = 0, LSB-first within
/// 64-bit words. Bits at index >= size() inside the last word stay zero.
class paren_bitvector {
  public:
    paren_bitvector() = default;
    explicit paren_bitvector(uint64_t n) : words_((n + word_bits - 1) / word_bits, 0), len_(n) {}

    /// Parses '(' / ')' or '1' / '0'; whitespace is skipped. Throws
    /// parse_error with the offending character position.
    static paren_bitvector from_string(std::string_view s);

    uint64_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool operator[](uint64_t i) const {
        return (words_[i / word_bits] >> (i % word_bits)) & 1;
    }

    /// Checked bit access; throws std::out_of_range.
    bool bit_at(uint64_t i) const;

    void set(uint64_t i, bool v) {
        uint64_t m = 1ull << (i % word_bits);
        if (v)
            words_[i / word_bits] |= m;
        else
            words_[i / word_bits] &= ~m;
    }

    void push_back(bool v) {
        if (len_ % word_bits == 0) words_.push_back(0);
        ++len_;
        if (v) set(len_ - 1, true);
    }

    bit_view view() const { return {words_.data(), len_}; }
    const std::vector<uint64_t>& words() const { return words_; }
    std::vector<uint64_t>& mutable_words() { return words_; }

    std::string to_string() const;  // '(' / ')' form

    bool operator==(const paren_bitvector& o) const {
        return len_ == o.len_ && words_ == o.words_;
    }

    uint64_t space_bytes() const { return sizeof(*this) + words_.capacity() * sizeof(uint64_t); }

  private:
    std::vector<uint64_t> words_;
    uint64_t len_ = 0;
};

/// Text-input failure with the 0-based character position.
struct parse_error : std::runtime_error {
    size_t position;
    parse_error(const std::string& msg, size_t pos) : std::runtime_error(msg), position(pos) {}
};

}  // namespace rmm

#endif
