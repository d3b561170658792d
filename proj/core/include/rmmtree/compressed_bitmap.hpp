#ifndef RMMTREE_COMPRESSED_BITMAP_HPP
#define RMMTREE_COMPRESSED_BITMAP_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rmmtree/code_sequence.hpp"
#include "rmmtree/paren_bitvector.hpp"

namespace rmm {

/// Combinatorial (class, offset) coding of fixed-width bit patterns:
/// the offset is the lexicographic rank of the pattern among all width-b
/// patterns with c ones, the string read first-bit-first (bit 0 of the word
/// is the first character). This ordering is a format commitment.
uint64_t binomial(unsigned n, unsigned k);
unsigned offset_bits(unsigned b, unsigned c);  // ceil(log2 C(b,c))
uint64_t encode_offset(uint64_t bits, unsigned b, unsigned c);
uint64_t decode_offset(uint64_t offset, unsigned b, unsigned c);

/// One compressed chunk: width, popcount and combinatorial offset.
struct chunk_triple {
    uint8_t width = 0;
    uint8_t ones = 0;
    uint64_t offset = 0;
};

/// Self-delimiting chunk code: 7-bit width, 7-bit popcount, then the offset
/// in ceil(log2 C(width, ones)) bits. f_b = width, f_c = ones.
class triple_codec {
  public:
    using value_type = chunk_triple;
    static constexpr unsigned sum_count = 2;

    explicit triple_codec(unsigned b_max = 64);

    unsigned b_max() const { return b_max_; }
    unsigned max_code_bits() const { return max_bits_; }
    unsigned encode(chunk_triple t, uint64_t out[2]) const;
    std::pair<chunk_triple, unsigned> decode(bit_view v, uint64_t pos) const;
    std::array<uint64_t, 2> sums(chunk_triple t) const {
        return {t.width, t.ones};
    }

  private:
    unsigned b_max_;
    unsigned max_bits_;
};

/// Dynamic bitmap compressed to zero-order entropy: chunks of at most b_max
/// bits stored as (b, c, o) triples on a code sequence with searchable b-
/// and c-sums. Any two adjacent chunks satisfy b_i + b_{i+1} > b_max.
class compressed_dyn_bitmap {
  public:
    struct options {
        uint32_t chunk_bits = 64;     // b_max, <= 64
        uint32_t leaf_bits = 1 << 15; // code-sequence leaf capacity is 2x this
    };

    compressed_dyn_bitmap() : compressed_dyn_bitmap(options{}) {}
    explicit compressed_dyn_bitmap(options opt);
    compressed_dyn_bitmap(bit_view v, options opt = {});

    uint64_t size() const { return seq_.totals()[0]; }
    uint64_t ones() const { return seq_.totals()[1]; }
    uint64_t chunk_count() const { return seq_.count(); }

    bool access(uint64_t i) const;
    uint64_t rank1(uint64_t i) const;
    uint64_t rank0(uint64_t i) const { return i + 1 - rank1(i); }
    uint64_t select1(uint64_t q) const;
    uint64_t select0(uint64_t q) const;

    void insert(uint64_t i, bool bit);
    void erase(uint64_t i);

    paren_bitvector to_bits() const;

    struct space_info {
        uint64_t payload_bits;   // sum over chunks of |b| + |c| + |o|
        uint64_t overhead_bits;  // tree records and buffer slack
        uint64_t h0_bits;        // n * H0 from the global density
    };
    space_info space_report() const;

    std::optional<std::string> audit() const;

    /// Raw bitmap container: u64 bit length, then LSB-first packed
    /// little-endian words.
    static compressed_dyn_bitmap import_file(const std::filesystem::path& file, options opt = {});
    void export_file(const std::filesystem::path& file) const;

  private:
    options opt_;
    code_sequence<triple_codec> seq_;

    // chunk index (1-based) and bit offset inside it
    std::pair<uint64_t, uint64_t> locate(uint64_t i) const;
    void merge_pair(uint64_t k);  // merge chunks k and k+1 when they fit
    void check_pos(uint64_t i) const;
};

}  // namespace rmm

#endif
