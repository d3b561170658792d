#ifndef RMMTREE_DYNAMIC_RMM_HPP
#define RMMTREE_DYNAMIC_RMM_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmmtree/paren_bitvector.hpp"
#include "rmmtree/static_rmm.hpp"

namespace rmm {

/// Raised when an edit would leave the stored parentheses sequence invalid
/// (the inserted pair would not match, or an attached piece is unbalanced).
struct balance_violation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dynamic range min-max tree: a height-balanced binary tree whose leaves
/// hold bit segments of length in [L, 2L] (a sole leaf may be shorter).
/// Internal nodes cache subtree-relative (size, e, m, M, n, popcount, pair
/// counts, boundary bits). Queries implement the same primitive contract as
/// static_rmm; edits, attach and detach run in O(log n) via split/join.
///
/// Single writer; no concurrent reads during mutation.
class dynamic_rmm {
  public:
    struct options {
        uint32_t segment_bits = 1024;  // L
        bool forbid_empty = false;     // reject deleting the last node
    };

    dynamic_rmm() : dynamic_rmm(options{}) {}
    explicit dynamic_rmm(options opt);
    explicit dynamic_rmm(const paren_bitvector& p, options opt = {});

    dynamic_rmm(dynamic_rmm&&) noexcept = default;
    dynamic_rmm& operator=(dynamic_rmm&&) noexcept = default;
    dynamic_rmm(const dynamic_rmm&) = delete;
    dynamic_rmm& operator=(const dynamic_rmm&) = delete;

    dynamic_rmm clone() const;

    uint64_t size() const { return root_ ? root_->size : 0; }
    const options& opts() const { return opt_; }
    bool bit_at(uint64_t i) const;
    paren_bitvector to_bits() const;

    // --- primitive contract (same semantics as static_rmm) ---
    int64_t excess(uint64_t i) const;
    int64_t sum(uint64_t i, uint64_t j) const;
    std::optional<uint64_t> fwd_search(uint64_t i, int64_t d) const;
    std::optional<uint64_t> bwd_search(uint64_t i, int64_t d) const;
    min_result rmqi(uint64_t i, uint64_t j) const;
    min_result rMqi(uint64_t i, uint64_t j) const;
    uint64_t min_count(uint64_t i, uint64_t j) const;
    uint64_t min_select(uint64_t i, uint64_t j, uint64_t q) const;
    uint64_t rank1(uint64_t i) const;
    uint64_t rank0(uint64_t i) const;
    uint64_t select1(uint64_t q) const;
    uint64_t select0(uint64_t q) const;
    uint64_t rank_p1(uint64_t i) const;
    uint64_t select_p1(uint64_t q) const;
    uint64_t rank_p2(uint64_t i) const;
    uint64_t select_p2(uint64_t q) const;
    uint64_t ones() const;
    uint64_t p1_ones() const;
    uint64_t p2_ones() const;
    int64_t total_excess() const { return root_ ? root_->e : 0; }
    int64_t min_excess() const { return root_ ? root_->m : 0; }

    // --- edits ---

    /// Insert a node: '(' before original position i, ')' before original
    /// position j. The new pair must match each other, i.e. the original
    /// bits [i, j) must form a balanced substring. Throws balance_violation
    /// (structure unchanged) otherwise.
    void insert_pair(uint64_t i, uint64_t j);

    /// Delete node i: removes bits i and find_close(i); children are
    /// promoted. Deleting the outermost pair may turn the sequence into a
    /// forest, which remains a valid balanced sequence.
    void delete_node(uint64_t i);

    /// Splice the balanced sequence s so that it starts at position p;
    /// s is consumed.
    void attach(uint64_t p, dynamic_rmm&& s);

    /// Remove the subtree rooted at v and return it as an independent
    /// structure. v must not span the whole sequence.
    dynamic_rmm detach(uint64_t v);

    struct audit_issue {
        uint64_t position;  // first bit position covered by the offending node
        std::string what;
    };

    /// Recomputes every cached field bottom-up and checks leaf bounds and
    /// balance metadata; returns the first violation found.
    std::optional<audit_issue> audit() const;

    uint64_t leaf_count() const;
    uint64_t height() const { return root_ ? static_cast<uint64_t>(root_->height) : 0; }
    uint64_t space_bytes() const;

    /// Fault-injection hook for audit tests: corrupt the cached subtree
    /// minimum of the leaf covering pos.
    void debug_corrupt_min(uint64_t pos);

  private:
    friend struct dynamic_rmm_search;

    struct node {
        uint64_t size = 0;
        int64_t e = 0;       // subtree excess
        int64_t m = 0;       // min prefix excess, relative to subtree start
        int64_t M = 0;       // max prefix excess
        uint64_t n = 0;      // occurrences of m
        uint64_t ones = 0;
        uint64_t p10 = 0;    // "10" pairs fully inside the subtree
        uint64_t p01 = 0;
        bool first_bit = false, last_bit = false;
        int height = 0;  // leaves have height 0
        std::unique_ptr<node> left, right;
        std::vector<uint64_t> seg;  // leaf only
        uint64_t seg_len = 0;       // leaf only

        bool leaf() const { return !left; }
    };
    using node_ptr = std::unique_ptr<node>;

    options opt_;
    node_ptr root_;

    uint64_t L() const { return opt_.segment_bits; }

    static void recompute_leaf(node& nd);
    static void combine_children(const node& l, const node& r, node& out);
    static void pull_up(node& nd);
    static int height_of(const node_ptr& n) { return n ? n->height : -1; }
    static void rebalance(node_ptr& n);
    static node_ptr rotate_left(node_ptr n);
    static node_ptr rotate_right(node_ptr n);
    node_ptr make_leaf(std::vector<uint64_t> seg, uint64_t len) const;
    node_ptr build_range(bit_view v, uint64_t from, uint64_t count) const;

    static node_ptr join(node_ptr a, node_ptr b);
    static std::pair<node_ptr, node_ptr> split(node_ptr n, uint64_t pos);

    void insert_bit(uint64_t pos, bool bit);
    void delete_bit(uint64_t pos);
    void normalize_leaf_at(uint64_t pos);
    std::pair<uint64_t, uint64_t> locate_leaf(uint64_t pos) const;  // (start, len)

    template <class Fn>
    void edit_leaf(node_ptr& n, uint64_t pos, Fn&& fn);

    void check_pos(uint64_t i) const;
    void check_range(uint64_t i, uint64_t j) const;
};

}  // namespace rmm

#endif
