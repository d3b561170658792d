#include "naive.hpp"

#include <algorithm>
#include <stdexcept>

namespace rmm::oracle {

int64_t excess(const paren_bitvector& p, uint64_t i) {
    int64_t e = 0;
    for (uint64_t t = 0; t <= i; ++t) e += p[t] ? 1 : -1;
    return e;
}

int64_t sum(const paren_bitvector& p, uint64_t i, uint64_t j) {
    int64_t e = 0;
    for (uint64_t t = i; t <= j; ++t) e += p[t] ? 1 : -1;
    return e;
}

std::optional<uint64_t> fwd_search(const paren_bitvector& p, uint64_t i, int64_t d) {
    int64_t run = 0;
    for (uint64_t j = i; j < p.size(); ++j) {
        run += p[j] ? 1 : -1;
        if (run == d) return j;
    }
    return std::nullopt;
}

std::optional<uint64_t> bwd_search(const paren_bitvector& p, uint64_t i, int64_t d) {
    for (uint64_t j = i + 1; j-- > 0;) {
        if (sum(p, j, i) == d) return j;
    }
    return std::nullopt;
}

min_result rmqi(const paren_bitvector& p, uint64_t i, uint64_t j) {
    int64_t best = INT64_MAX, run = i == 0 ? 0 : excess(p, i - 1);
    uint64_t pos = i;
    for (uint64_t t = i; t <= j; ++t) {
        run += p[t] ? 1 : -1;
        if (run < best) {
            best = run;
            pos = t;
        }
    }
    return {pos, best};
}

min_result rMqi(const paren_bitvector& p, uint64_t i, uint64_t j) {
    int64_t best = INT64_MIN, run = i == 0 ? 0 : excess(p, i - 1);
    uint64_t pos = i;
    for (uint64_t t = i; t <= j; ++t) {
        run += p[t] ? 1 : -1;
        if (run > best) {
            best = run;
            pos = t;
        }
    }
    return {pos, best};
}

uint64_t min_count(const paren_bitvector& p, uint64_t i, uint64_t j) {
    int64_t mn = rmqi(p, i, j).value;
    int64_t run = i == 0 ? 0 : excess(p, i - 1);
    uint64_t c = 0;
    for (uint64_t t = i; t <= j; ++t) {
        run += p[t] ? 1 : -1;
        c += run == mn;
    }
    return c;
}

std::optional<uint64_t> min_select(const paren_bitvector& p, uint64_t i, uint64_t j, uint64_t q) {
    int64_t mn = rmqi(p, i, j).value;
    int64_t run = i == 0 ? 0 : excess(p, i - 1);
    for (uint64_t t = i; t <= j; ++t) {
        run += p[t] ? 1 : -1;
        if (run == mn && --q == 0) return t;
    }
    return std::nullopt;
}

uint64_t rank1(const paren_bitvector& p, uint64_t i) {
    uint64_t c = 0;
    for (uint64_t t = 0; t <= i; ++t) c += p[t];
    return c;
}

uint64_t rank0(const paren_bitvector& p, uint64_t i) { return i + 1 - rank1(p, i); }

std::optional<uint64_t> select1(const paren_bitvector& p, uint64_t q) {
    if (q == 0) return std::nullopt;
    for (uint64_t t = 0; t < p.size(); ++t)
        if (p[t] && --q == 0) return t;
    return std::nullopt;
}

std::optional<uint64_t> select0(const paren_bitvector& p, uint64_t q) {
    if (q == 0) return std::nullopt;
    for (uint64_t t = 0; t < p.size(); ++t)
        if (!p[t] && --q == 0) return t;
    return std::nullopt;
}

bool p1_bit(const paren_bitvector& p, uint64_t t) {
    bool next = t + 1 < p.size() ? p[t + 1] : false;
    return p[t] && !next;
}

bool p2_bit(const paren_bitvector& p, uint64_t t) {
    bool next = t + 1 < p.size() ? p[t + 1] : false;
    return !p[t] && next;
}

uint64_t rank_p1(const paren_bitvector& p, uint64_t i) {
    uint64_t c = 0;
    for (uint64_t t = 0; t <= i; ++t) c += p1_bit(p, t);
    return c;
}

uint64_t rank_p2(const paren_bitvector& p, uint64_t i) {
    uint64_t c = 0;
    for (uint64_t t = 0; t <= i; ++t) c += p2_bit(p, t);
    return c;
}

std::optional<uint64_t> select_p1(const paren_bitvector& p, uint64_t q) {
    if (q == 0) return std::nullopt;
    for (uint64_t t = 0; t < p.size(); ++t)
        if (p1_bit(p, t) && --q == 0) return t;
    return std::nullopt;
}

std::optional<uint64_t> select_p2(const paren_bitvector& p, uint64_t q) {
    if (q == 0) return std::nullopt;
    for (uint64_t t = 0; t < p.size(); ++t)
        if (p2_bit(p, t) && --q == 0) return t;
    return std::nullopt;
}

bool balanced(const paren_bitvector& p) {
    int64_t e = 0;
    for (uint64_t t = 0; t < p.size(); ++t) {
        e += p[t] ? 1 : -1;
        if (e < 0) return false;
    }
    return e == 0;
}

naive_tree::naive_tree(const paren_bitvector& p) : len_(p.size()) {
    if (!balanced(p)) throw std::invalid_argument("naive_tree: unbalanced sequence");
    idx_at_.assign(len_, UINT64_MAX);
    close_at_.assign(len_, UINT64_MAX);
    open_at_.assign(len_, UINT64_MAX);
    std::vector<uint64_t> stack;
    for (uint64_t t = 0; t < len_; ++t) {
        if (p[t]) {
            uint64_t id = pre_.size();
            pre_.push_back(t);
            idx_at_[t] = id;
            depth_.push_back(stack.size() + 1);
            if (stack.empty()) {
                parent_.push_back(std::nullopt);
            } else {
                parent_.push_back(pre_[idx_at_[stack.back()]]);
                children_[idx_at_[stack.back()]].push_back(t);
            }
            children_.emplace_back();
            stack.push_back(t);
        } else {
            uint64_t v = stack.back();
            stack.pop_back();
            close_at_[v] = t;
            open_at_[t] = v;
        }
    }
    post_rank_.assign(pre_.size(), 0);
    std::vector<std::pair<uint64_t, uint64_t>> by_close;
    for (uint64_t v : pre_) by_close.emplace_back(close_at_[v], v);
    std::sort(by_close.begin(), by_close.end());
    for (uint64_t r = 0; r < by_close.size(); ++r) {
        post_rank_[idx(by_close[r].second)] = r + 1;
        post_order_.push_back(by_close[r].second);
    }
    for (uint64_t v : pre_) {
        if (depth_[idx(v)] >= by_depth_.size()) by_depth_.resize(depth_[idx(v)] + 1);
        by_depth_[depth_[idx(v)]].push_back(v);
        if (children_[idx(v)].empty()) leaves_.push_back(v);
    }
    // inorder events per the depth-first definition: a visit of an internal
    // node between two consecutive children. The event after child c happens
    // right after c's subtree closes, so ordering events by the child's close
    // position gives the traversal order.
    in_first_.assign(pre_.size(), std::nullopt);
    std::vector<std::pair<uint64_t, uint64_t>> events;  // (child close pos, v)
    for (uint64_t v : pre_) {
        const auto& ch = children_[idx(v)];
        for (size_t c = 0; c + 1 < ch.size(); ++c) events.emplace_back(close_at_[ch[c]], v);
    }
    std::sort(events.begin(), events.end());
    for (auto& [cpos, v] : events) {
        in_events_.push_back(v);
        if (!in_first_[idx(v)]) in_first_[idx(v)] = in_events_.size();
    }
}

std::optional<uint64_t> naive_tree::parent(uint64_t v) const { return parent_[idx(v)]; }

uint64_t naive_tree::subtree_size(uint64_t v) const {
    uint64_t c = 0;
    for (uint64_t t = v; t <= close_at_[v]; ++t) c += idx_at_[t] != UINT64_MAX;
    return c;
}

bool naive_tree::isancestor(uint64_t u, uint64_t v) const {
    for (std::optional<uint64_t> w = v; w; w = parent_[idx(*w)])
        if (*w == u) return true;
    return false;
}

std::optional<uint64_t> naive_tree::first_child(uint64_t v) const {
    const auto& ch = children_[idx(v)];
    if (ch.empty()) return std::nullopt;
    return ch.front();
}

std::optional<uint64_t> naive_tree::last_child(uint64_t v) const {
    const auto& ch = children_[idx(v)];
    if (ch.empty()) return std::nullopt;
    return ch.back();
}

std::optional<uint64_t> naive_tree::next_sibling(uint64_t v) const {
    const std::vector<uint64_t>* sibs;
    if (auto p = parent_[idx(v)]) {
        sibs = &children_[idx(*p)];
    } else {
        static thread_local std::vector<uint64_t> roots;
        roots.clear();
        for (uint64_t u : pre_)
            if (!parent_[idx(u)]) roots.push_back(u);
        sibs = &roots;
    }
    auto it = std::find(sibs->begin(), sibs->end(), v);
    if (it + 1 == sibs->end()) return std::nullopt;
    return *(it + 1);
}

std::optional<uint64_t> naive_tree::prev_sibling(uint64_t v) const {
    const std::vector<uint64_t>* sibs;
    if (auto p = parent_[idx(v)]) {
        sibs = &children_[idx(*p)];
    } else {
        static thread_local std::vector<uint64_t> roots;
        roots.clear();
        for (uint64_t u : pre_)
            if (!parent_[idx(u)]) roots.push_back(u);
        sibs = &roots;
    }
    auto it = std::find(sibs->begin(), sibs->end(), v);
    if (it == sibs->begin()) return std::nullopt;
    return *(it - 1);
}

std::optional<uint64_t> naive_tree::pre_select(uint64_t q) const {
    if (q == 0 || q > pre_.size()) return std::nullopt;
    return pre_[q - 1];
}

std::optional<uint64_t> naive_tree::post_select(uint64_t q) const {
    if (q == 0 || q > post_order_.size()) return std::nullopt;
    return post_order_[q - 1];
}

std::optional<uint64_t> naive_tree::level_ancestor(uint64_t v, uint64_t d) const {
    std::optional<uint64_t> w = v;
    for (; d > 0 && w; --d) w = parent_[idx(*w)];
    return w;
}

std::optional<uint64_t> naive_tree::level_next(uint64_t v) const {
    const auto& lv = by_depth_[depth(v)];
    auto it = std::find(lv.begin(), lv.end(), v);
    if (it + 1 == lv.end()) return std::nullopt;
    return *(it + 1);
}

std::optional<uint64_t> naive_tree::level_prev(uint64_t v) const {
    const auto& lv = by_depth_[depth(v)];
    auto it = std::find(lv.begin(), lv.end(), v);
    if (it == lv.begin()) return std::nullopt;
    return *(it - 1);
}

std::optional<uint64_t> naive_tree::level_lmost(uint64_t d) const {
    if (d >= by_depth_.size() || by_depth_[d].empty()) return std::nullopt;
    return by_depth_[d].front();
}

std::optional<uint64_t> naive_tree::level_rmost(uint64_t d) const {
    if (d >= by_depth_.size() || by_depth_[d].empty()) return std::nullopt;
    return by_depth_[d].back();
}

uint64_t naive_tree::lca(uint64_t u, uint64_t v) const {
    // walk the deeper node up to equal depth, then both in lockstep until the
    // ancestor chains intersect
    while (depth(u) > depth(v)) u = *parent_[idx(u)];
    while (depth(v) > depth(u)) v = *parent_[idx(v)];
    while (u != v) {
        auto pu = parent_[idx(u)], pv = parent_[idx(v)];
        if (!pu || !pv) throw std::logic_error("lca: nodes in different trees of a forest");
        u = *pu;
        v = *pv;
    }
    return u;
}

uint64_t naive_tree::deepest_node(uint64_t v) const {
    uint64_t best = v, bd = depth(v);
    for (uint64_t t = v; t <= close_at_[v]; ++t)
        if (idx_at_[t] != UINT64_MAX && depth(t) > bd) {
            bd = depth(t);
            best = t;
        }
    return best;
}

uint64_t naive_tree::height(uint64_t v) const { return depth(deepest_node(v)) - depth(v); }

std::optional<uint64_t> naive_tree::child(uint64_t v, uint64_t q) const {
    const auto& ch = children_[idx(v)];
    if (q == 0 || q > ch.size()) return std::nullopt;
    return ch[q - 1];
}

std::optional<uint64_t> naive_tree::child_rank(uint64_t v) const {
    auto p = parent_[idx(v)];
    if (!p) return std::nullopt;
    const auto& ch = children_[idx(*p)];
    return std::find(ch.begin(), ch.end(), v) - ch.begin() + 1;
}

uint64_t naive_tree::leaf_rank(uint64_t v) const {
    return std::upper_bound(leaves_.begin(), leaves_.end(), v) - leaves_.begin();
}

std::optional<uint64_t> naive_tree::leaf_select(uint64_t q) const {
    if (q == 0 || q > leaves_.size()) return std::nullopt;
    return leaves_[q - 1];
}

uint64_t naive_tree::lmost_leaf(uint64_t v) const {
    return *std::lower_bound(leaves_.begin(), leaves_.end(), v);
}

uint64_t naive_tree::rmost_leaf(uint64_t v) const {
    auto it = std::upper_bound(leaves_.begin(), leaves_.end(), close_at_[v]);
    return *(it - 1);
}

std::optional<uint64_t> naive_tree::in_rank(uint64_t v) const { return in_first_[idx(v)]; }

std::optional<uint64_t> naive_tree::in_select(uint64_t q) const {
    if (q == 0 || q > in_events_.size()) return std::nullopt;
    return in_events_[q - 1];
}

uint64_t naive_tree::max_depth() const {
    uint64_t d = 0;
    for (uint64_t i = 0; i < pre_.size(); ++i) d = std::max(d, depth_[i]);
    return d;
}

}  // namespace rmm::oracle
