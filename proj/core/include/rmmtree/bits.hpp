#ifndef RMMTREE_BITS_HPP
#define RMMTREE_BITS_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace rmm {

inline constexpr unsigned word_bits = 64;

/// Summary of a bit run under the +-1 interpretation (1 -> +1, 0 -> -1).
/// Prefix fields range over the nonempty prefixes of the run.
struct chunk_stats {
    int32_t total = 0;       // excess delta over the whole run
    int32_t min_prefix = 0;  // minimum prefix excess
    int32_t max_prefix = 0;  // maximum prefix excess
    int32_t min_count = 0;   // prefixes attaining min_prefix
    uint32_t ones = 0;
    uint32_t pat10 = 0;      // adjacent "10" pairs fully inside the run
    uint32_t pat01 = 0;      // adjacent "01" pairs fully inside the run
    bool first_bit = false;
    bool last_bit = false;
};

/// Stats of the first `width` bits of `word` (LSB-first). width in [1,64];
/// bits beyond `width` are ignored. Throws std::invalid_argument on width 0.
chunk_stats word_stats(uint64_t word, unsigned width);

/// Stats of the concatenation a ++ b.
chunk_stats concat(const chunk_stats& a, const chunk_stats& b);

enum class scan_dir { fwd, bwd };

/// In-chunk excess search. fwd: smallest p in [0,width) such that
/// start_excess plus the prefix excess through p equals target. bwd: largest
/// p in [0,width) such that start_excess plus the suffix excess from p
/// through width-1 equals target.
std::optional<unsigned> scan_chunk(uint64_t word, unsigned width, scan_dir dir,
                                   int64_t start_excess, int64_t target);

/// Non-owning view of an LSB-first packed bit array. Bits at index >= len
/// inside the last word must be zero; reads past the word array yield zero.
struct bit_view {
    const uint64_t* words = nullptr;
    uint64_t len = 0;

    uint64_t word(uint64_t i) const {
        return i < (len + word_bits - 1) / word_bits ? words[i] : 0;
    }
    bool get(uint64_t i) const { return (words[i / word_bits] >> (i % word_bits)) & 1; }
};

namespace bits {

/// Sum of +-1 over bits [from, to], inclusive.
int64_t excess_delta(bit_view v, uint64_t from, uint64_t to);

/// Smallest p in [from, to] with start + excess_delta(v, from, p) == target.
std::optional<uint64_t> fwd_find(bit_view v, uint64_t from, uint64_t to,
                                 int64_t start, int64_t target);

/// Largest p in [from, to] with start + excess_delta(v, p, to) == target.
std::optional<uint64_t> bwd_find(bit_view v, uint64_t from, uint64_t to,
                                 int64_t start, int64_t target);

struct extremum {
    int64_t value;
    uint64_t pos;  // leftmost position attaining value
};

/// Leftmost minimum (maximum) of E over [from, to], where
/// E[p] = base + excess_delta(v, from, p).
extremum range_min(bit_view v, uint64_t from, uint64_t to, int64_t base);
extremum range_max(bit_view v, uint64_t from, uint64_t to, int64_t base);

/// Number of p in [from, to] with E[p] == target (E as in range_min).
uint64_t count_value(bit_view v, uint64_t from, uint64_t to, int64_t base, int64_t target);

/// q-th (1-based) such position, if it exists.
std::optional<uint64_t> select_value(bit_view v, uint64_t from, uint64_t to,
                                     int64_t base, int64_t target, uint64_t q);

uint64_t popcount_range(bit_view v, uint64_t from, uint64_t to);
std::optional<uint64_t> select_one_range(bit_view v, uint64_t from, uint64_t to, uint64_t q);
std::optional<uint64_t> select_zero_range(bit_view v, uint64_t from, uint64_t to, uint64_t q);

/// "10" / "01" pair starts t in [from, to]; the lookahead bit t+1 reads as 0
/// past the end of the view.
uint64_t count_pat10(bit_view v, uint64_t from, uint64_t to);
uint64_t count_pat01(bit_view v, uint64_t from, uint64_t to);
std::optional<uint64_t> select_pat10(bit_view v, uint64_t from, uint64_t to, uint64_t q);
std::optional<uint64_t> select_pat01(bit_view v, uint64_t from, uint64_t to, uint64_t q);

// Packed-buffer editing, shared by the dynamic segment leaves.

/// Read n <= 64 bits starting at pos.
uint64_t read_bits(const uint64_t* w, uint64_t pos, unsigned n);

/// Write the low n bits of value at pos.
void write_bits(uint64_t* w, uint64_t pos, uint64_t value, unsigned n);

/// Shift bits [pos, len) up by n and write value there; len grows by n.
/// The buffer is resized as needed and its tail kept zero.
void insert_bits(std::vector<uint64_t>& w, uint64_t& len, uint64_t pos,
                 uint64_t value, unsigned n);

/// Remove bits [pos, pos+n), shifting the rest down; len shrinks by n.
void erase_bits(std::vector<uint64_t>& w, uint64_t& len, uint64_t pos, unsigned n);

/// Zero all bits at index >= len in the buffer.
void clear_tail(std::vector<uint64_t>& w, uint64_t len);

}  // namespace bits
}  // namespace rmm

#endif
