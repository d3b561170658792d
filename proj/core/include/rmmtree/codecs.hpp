#ifndef RMMTREE_CODECS_HPP
#define RMMTREE_CODECS_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "rmmtree/bits.hpp"

namespace rmm {

/// Codecs turn values into self-delimiting bit codes. A codec provides
///   value_type, sum_count,
///   max_code_bits() -> unsigned,
///   encode(value, uint64_t out[2]) -> unsigned bit length (throws
///     std::invalid_argument if the value does not fit),
///   decode(bit_view, pos) -> {value, length},
///   sums(value) -> array<uint64_t, sum_count>   (the f values).
/// Numeric codecs use f = value.

/// Fixed width-k binary codes, k in [1, 64].
class fixed_codec {
  public:
    using value_type = uint64_t;
    static constexpr unsigned sum_count = 1;

    explicit fixed_codec(unsigned width = 16) : width_(width) {
        if (width == 0 || width > 64) throw std::invalid_argument("fixed_codec: width in [1,64]");
    }

    unsigned max_code_bits() const { return width_; }

    unsigned encode(uint64_t v, uint64_t out[2]) const {
        if (width_ < 64 && (v >> width_) != 0)
            throw std::invalid_argument("fixed_codec: value does not fit");
        out[0] = v;
        out[1] = 0;
        return width_;
    }

    std::pair<uint64_t, unsigned> decode(bit_view v, uint64_t pos) const {
        return {bits::read_bits(v.words, pos, width_), width_};
    }

    std::array<uint64_t, 1> sums(uint64_t v) const { return {v}; }

  private:
    unsigned width_;
};

/// Elias gamma over v+1, so value 0 is representable. Codes are capped at 64
/// bits, i.e. values below 2^32 - 1.
class gamma_codec {
  public:
    using value_type = uint64_t;
    static constexpr unsigned sum_count = 1;

    unsigned max_code_bits() const { return 63; }

    static unsigned length_of(uint64_t v) {
        return 2 * static_cast<unsigned>(std::bit_width(v + 1)) - 1;
    }

    unsigned encode(uint64_t v, uint64_t out[2]) const {
        if (v + 1 == 0 || length_of(v) > 63)
            throw std::invalid_argument("gamma_codec: value too large");
        uint64_t x = v + 1;
        unsigned nb = std::bit_width(x);
        // nb-1 zeros, a one, then the low nb-1 bits of x
        uint64_t low = x ^ (1ull << (nb - 1));
        out[0] = (1ull << (nb - 1)) | (low << nb);
        out[1] = 0;
        return 2 * nb - 1;
    }

    std::pair<uint64_t, unsigned> decode(bit_view v, uint64_t pos) const {
        unsigned zeros = 0;
        while (!v.get(pos + zeros)) ++zeros;
        uint64_t x = (1ull << zeros) | bits::read_bits(v.words, pos + zeros + 1, zeros);
        return {x - 1, 2 * zeros + 1};
    }

    std::array<uint64_t, 1> sums(uint64_t v) const { return {v}; }
};

/// Elias delta over v+1; the length prefix is gamma coded.
class delta_codec {
  public:
    using value_type = uint64_t;
    static constexpr unsigned sum_count = 1;

    unsigned max_code_bits() const { return 64; }

    static unsigned length_of(uint64_t v) {
        unsigned nb = static_cast<unsigned>(std::bit_width(v + 1));
        unsigned lb = static_cast<unsigned>(std::bit_width(static_cast<uint64_t>(nb)));
        return (nb - 1) + (2 * lb - 1);
    }

    unsigned encode(uint64_t v, uint64_t out[2]) const {
        if (v + 1 == 0 || length_of(v) > 64)
            throw std::invalid_argument("delta_codec: value too large");
        uint64_t x = v + 1;
        unsigned nb = std::bit_width(x);
        gamma_codec g;
        uint64_t head[2];
        unsigned hl = g.encode(nb - 1, head);  // gamma of nb (stored as nb-1)
        // head, then the nb-1 bits of x below its leading one
        out[0] = head[0];
        out[1] = 0;
        if (nb > 1) {
            uint64_t tail = x ^ (1ull << (nb - 1));
            out[0] |= tail << hl;
        }
        return hl + nb - 1;
    }

    std::pair<uint64_t, unsigned> decode(bit_view v, uint64_t pos) const {
        gamma_codec g;
        auto [nbm1, hl] = g.decode(v, pos);
        unsigned nb = static_cast<unsigned>(nbm1) + 1;
        uint64_t tail = nb > 1 ? bits::read_bits(v.words, pos + hl, nb - 1) : 0;
        uint64_t x = tail | (1ull << (nb - 1));
        return {x - 1, hl + nb - 1};
    }

    std::array<uint64_t, 1> sums(uint64_t v) const { return {v}; }
};

}  // namespace rmm

#endif
