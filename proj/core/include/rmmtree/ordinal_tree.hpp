#ifndef RMMTREE_ORDINAL_TREE_HPP
#define RMMTREE_ORDINAL_TREE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

namespace rmm {

/// Ordinal-tree operations over any provider of the range min-max primitive
/// contract (static_rmm or dynamic_rmm). A node is identified by the
/// position of its opening parenthesis; the root has depth 1. Relatives that
/// do not exist (parent of the root, next sibling of a last child, ...) are
/// nullopt; positions that are not an opening parenthesis are rejected with
/// std::invalid_argument.
///
/// The view is non-owning and stateless. The underlying sequence must stay
/// balanced; it may encode a forest, in which case top-level trees behave as
/// siblings.
template <class Prim>
class ordinal_tree {
  public:
    using node = uint64_t;

    explicit ordinal_tree(const Prim& p) : p_(&p) {
        if (p.size() == 0 || p.total_excess() != 0 || p.min_excess() < 0)
            throw std::invalid_argument("ordinal_tree: sequence is not balanced");
    }

    const Prim& prim() const { return *p_; }
    uint64_t seq_len() const { return p_->size(); }
    uint64_t node_count() const { return p_->size() / 2; }

    bool inspect(uint64_t i) const { return p_->bit_at(i); }

    node find_close(node v) const {
        require_open(v);
        return *p_->fwd_search(v, 0);
    }
    node find_open(uint64_t w) const {
        require_close(w);
        return *p_->bwd_search(w, 0);
    }
    std::optional<node> enclose(node v) const {
        require_open(v);
        return p_->bwd_search(v, 2);
    }

    uint64_t depth(node v) const {
        require_open(v);
        return static_cast<uint64_t>(p_->excess(v));
    }
    std::optional<node> parent(node v) const { return enclose(v); }
    uint64_t subtree_size(node v) const { return (find_close(v) - v + 1) / 2; }
    bool isleaf(node v) const {
        require_open(v);
        return !p_->bit_at(v + 1);
    }
    bool isancestor(node u, node v) const {
        require_open(v);
        return u <= v && v <= find_close(u);
    }

    std::optional<node> first_child(node v) const {
        return isleaf(v) ? std::nullopt : std::optional<node>(v + 1);
    }
    std::optional<node> last_child(node v) const {
        if (isleaf(v)) return std::nullopt;
        return find_open(find_close(v) - 1);
    }
    std::optional<node> next_sibling(node v) const {
        uint64_t c = find_close(v);
        if (c + 1 >= seq_len() || !p_->bit_at(c + 1)) return std::nullopt;
        return c + 1;
    }
    std::optional<node> prev_sibling(node v) const {
        require_open(v);
        if (v == 0 || p_->bit_at(v - 1)) return std::nullopt;
        return find_open(v - 1);
    }

    uint64_t pre_rank(node v) const {
        require_open(v);
        return p_->rank1(v);
    }
    node pre_select(uint64_t q) const { return p_->select1(q); }
    uint64_t post_rank(node v) const { return p_->rank0(find_close(v)); }
    node post_select(uint64_t q) const { return find_open(p_->select0(q)); }

    std::optional<node> level_ancestor(node v, uint64_t d) const {
        require_open(v);
        if (d == 0) throw std::invalid_argument("level_ancestor: d must be >= 1");
        return p_->bwd_search(v, static_cast<int64_t>(d) + 1);
    }
    std::optional<node> level_next(node v) const {
        uint64_t c = find_close(v);
        auto r = p_->fwd_search(c, 0);
        if (!r || !p_->bit_at(*r)) return std::nullopt;
        return r;
    }
    std::optional<node> level_prev(node v) const {
        require_open(v);
        auto r = p_->bwd_search(v, 0);
        if (!r) return std::nullopt;
        return find_open(*r);
    }
    std::optional<node> level_lmost(uint64_t d) const {
        if (d == 0) throw std::invalid_argument("level_lmost: depth is 1-based");
        return p_->fwd_search(0, static_cast<int64_t>(d));
    }
    std::optional<node> level_rmost(uint64_t d) const {
        if (d == 0) throw std::invalid_argument("level_rmost: depth is 1-based");
        auto r = p_->bwd_search(seq_len() - 1, -static_cast<int64_t>(d));
        if (!r) return std::nullopt;
        return find_open(*r);
    }

    node lca(node u, node v) const {
        require_open(u);
        require_open(v);
        if (u > v) std::swap(u, v);
        if (isancestor(u, v)) return u;
        return *enclose(p_->rmqi(u, v).pos + 1);
    }
    node deepest_node(node v) const {
        require_open(v);
        return p_->rMqi(v, find_close(v)).pos;
    }
    uint64_t height(node v) const { return depth(deepest_node(v)) - depth(v); }

    uint64_t degree(node v) const {
        if (isleaf(v)) return 0;
        uint64_t c = find_close(v);
        return p_->min_count(v + 1, c - 1);
    }
    node child(node v, uint64_t q) const {
        if (q == 0) throw std::invalid_argument("child: q is 1-based");
        if (isleaf(v)) throw std::invalid_argument("child: q exceeds degree");
        if (q == 1) return v + 1;
        uint64_t c = find_close(v);
        return p_->min_select(v + 1, c - 1, q - 1) + 1;
    }
    std::optional<uint64_t> child_rank(node v) const {
        auto p = parent(v);
        if (!p) return std::nullopt;
        return p_->min_count(*p, v - 1);
    }

    uint64_t leaf_count() const { return p_->p1_ones(); }
    uint64_t leaf_rank(node v) const {
        require_open(v);
        return p_->rank_p1(v);
    }
    node leaf_select(uint64_t q) const { return p_->select_p1(q); }
    node lmost_leaf(node v) const {
        require_open(v);
        uint64_t before = v == 0 ? 0 : p_->rank_p1(v - 1);
        return p_->select_p1(before + 1);
    }
    node rmost_leaf(node v) const { return p_->select_p1(p_->rank_p1(find_close(v))); }

    /// Total number of inorder positions (sum of degree-1 over internal nodes).
    uint64_t in_count() const { return p_->p2_ones(); }
    std::optional<uint64_t> in_rank(node v) const {
        if (isleaf(v)) return std::nullopt;
        uint64_t c1 = find_close(v + 1);
        if (!p_->bit_at(c1 + 1)) return std::nullopt;  // single child: no inorder
        return p_->rank_p2(c1);
    }
    node in_select(uint64_t q) const { return *enclose(p_->select_p2(q) + 1); }

  private:
    const Prim* p_;

    void require_open(node v) const {
        if (v >= p_->size() || !p_->bit_at(v))
            throw std::invalid_argument("ordinal_tree: not an opening parenthesis");
    }
    void require_close(uint64_t w) const {
        if (w >= p_->size() || p_->bit_at(w))
            throw std::invalid_argument("ordinal_tree: not a closing parenthesis");
    }
};

}  // namespace rmm

#endif
