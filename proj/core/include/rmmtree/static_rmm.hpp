#ifndef RMMTREE_STATIC_RMM_HPP
#define RMMTREE_STATIC_RMM_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rmmtree/paren_bitvector.hpp"

namespace rmm {

/// Position/value pair returned by the range min/max queries; value is the
/// global excess E at pos.
struct min_result {
    uint64_t pos;
    int64_t value;
};

namespace detail {

/// Heap-ordered summaries over a complete k-ary tree whose leaves are the
/// s-bit chunks of the sequence. Level 0 holds the leaves; each level is
/// padded to a multiple of k with neutral sentinels so sibling groups are
/// uniform. I is the stored integer width (int32_t when the sequence fits,
/// int64_t otherwise).
template <class I>
struct rmm_summaries {
    uint32_t s = 0;
    uint32_t k = 0;
    uint64_t len = 0;
    uint64_t nchunks = 0;
    std::vector<uint64_t> level_off;
    std::vector<uint64_t> level_size;  // padded
    std::vector<uint64_t> level_real;
    std::vector<I> e;     // cumulative excess at right boundary
    std::vector<I> m;     // subtree min excess (global values)
    std::vector<I> M;     // subtree max excess
    std::vector<I> n;     // occurrences of the subtree minimum
    std::vector<I> ones;  // subtree popcount
    std::vector<I> p1;    // subtree "10" pair count, lookahead included
    std::vector<I> p2;    // subtree "01" pair count

    static constexpr I sentinel_min = std::numeric_limits<I>::max();
    static constexpr I sentinel_max = std::numeric_limits<I>::min();

    void build(bit_view v, uint32_t s_, uint32_t k_);

    size_t levels() const { return level_real.size(); }
    uint64_t at(size_t lvl, uint64_t idx) const { return level_off[lvl] + idx; }
    uint64_t chunk_lo(uint64_t j) const { return j * s; }
    uint64_t chunk_hi(uint64_t j) const {
        uint64_t end = (j + 1) * static_cast<uint64_t>(s);
        return (end < len ? end : len) - 1;
    }
    int64_t cum_before(uint64_t j) const { return j == 0 ? 0 : static_cast<int64_t>(e[j - 1]); }
    uint64_t node_bits(size_t lvl, uint64_t idx) const;

    int64_t excess(bit_view v, uint64_t i) const;
    std::optional<uint64_t> fwd_search(bit_view v, uint64_t i, int64_t d) const;
    std::optional<uint64_t> bwd_search(bit_view v, uint64_t i, int64_t d) const;
    min_result rmqi(bit_view v, uint64_t i, uint64_t j) const;
    min_result rMqi(bit_view v, uint64_t i, uint64_t j) const;
    uint64_t min_count(bit_view v, uint64_t i, uint64_t j) const;
    uint64_t min_select(bit_view v, uint64_t i, uint64_t j, uint64_t q) const;
    uint64_t select1(bit_view v, uint64_t q) const;
    uint64_t select0(bit_view v, uint64_t q) const;
    uint64_t rank_pat(bit_view v, uint64_t i, bool ten) const;
    uint64_t select_pat(bit_view v, uint64_t q, bool ten) const;
    std::optional<std::string> audit(bit_view v) const;
    uint64_t space_bytes() const;

  private:
    struct piece {
        size_t lvl;
        uint64_t idx;
    };
    /// Whole-node cover of chunks [a, b], left to right.
    std::vector<piece> cover(uint64_t a, uint64_t b) const;
    int64_t range_min_value(bit_view v, uint64_t i, uint64_t j) const;
    uint64_t descend_fwd(bit_view v, size_t lvl, uint64_t idx, int64_t target) const;
    uint64_t descend_bwd(bit_view v, size_t lvl, uint64_t idx, int64_t target) const;
    bool contains(size_t lvl, uint64_t idx, int64_t val) const {
        uint64_t a = at(lvl, idx);
        return m[a] <= val && val <= M[a];
    }
};

extern template struct rmm_summaries<int32_t>;
extern template struct rmm_summaries<int64_t>;

}  // namespace detail

/// Immutable range min-max tree over a parentheses bitvector. All query
/// positions are 0-based bit positions; ranks are inclusive, selects 1-based.
class static_rmm {
  public:
    enum class summary_width { automatic, narrow32, wide64 };

    struct config {
        uint32_t chunk_bits = 512;  // s, power of two >= 64
        uint32_t arity = 32;        // k, power of two >= 2
        summary_width width = summary_width::automatic;
    };

    explicit static_rmm(paren_bitvector p, config cfg = {});

    uint64_t size() const { return bits_.size(); }
    const paren_bitvector& bits() const { return bits_; }
    const config& cfg() const { return cfg_; }
    bool bit_at(uint64_t i) const { return bits_.bit_at(i); }

    /// E[i]; prefix excess through position i.
    int64_t excess(uint64_t i) const;
    /// E[j] - E[i-1] over the closed range [i, j].
    int64_t sum(uint64_t i, uint64_t j) const;

    /// Smallest j >= i with sum(i, j) == d.
    std::optional<uint64_t> fwd_search(uint64_t i, int64_t d) const;
    /// Largest j <= i with sum(j, i) == d.
    std::optional<uint64_t> bwd_search(uint64_t i, int64_t d) const;

    /// Leftmost position of the minimum (maximum) of E over [i, j].
    min_result rmqi(uint64_t i, uint64_t j) const;
    min_result rMqi(uint64_t i, uint64_t j) const;

    /// Occurrences of the range minimum over [i, j]; position of the q-th.
    uint64_t min_count(uint64_t i, uint64_t j) const;
    uint64_t min_select(uint64_t i, uint64_t j, uint64_t q) const;

    uint64_t rank1(uint64_t i) const;
    uint64_t rank0(uint64_t i) const;
    uint64_t select1(uint64_t q) const;
    uint64_t select0(uint64_t q) const;

    // rank/select over the virtual bitmaps P1 ("10" pair starts: leaves) and
    // P2 (")(" boundaries: inorder positions). A virtual 0 follows the last
    // bit, so a trailing '(' counts as a P1 one.
    uint64_t rank_p1(uint64_t i) const;
    uint64_t select_p1(uint64_t q) const;
    uint64_t rank_p2(uint64_t i) const;
    uint64_t select_p2(uint64_t q) const;

    uint64_t ones() const;
    uint64_t p1_ones() const;
    uint64_t p2_ones() const;
    int64_t total_excess() const;
    int64_t min_excess() const;

    /// Recomputes every summary bottom-up and compares with the stored
    /// arrays; returns a description of the first mismatch.
    std::optional<std::string> audit() const;

    uint64_t space_bytes() const;

  private:
    paren_bitvector bits_;
    config cfg_;
    std::variant<detail::rmm_summaries<int32_t>, detail::rmm_summaries<int64_t>> sums_;

    template <class F>
    decltype(auto) dispatch(F&& f) const {
        return std::visit([&](const auto& s) -> decltype(auto) { return f(s); }, sums_);
    }
    void check_pos(uint64_t i) const;
    void check_range(uint64_t i, uint64_t j) const;
};

}  // namespace rmm

#endif
