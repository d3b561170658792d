#include "rmmtree/dynamic_rmm.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace rmm {

namespace {

inline uint64_t words_for(uint64_t bits) { return (bits + word_bits - 1) / word_bits; }

}  // namespace

dynamic_rmm::dynamic_rmm(options opt) : opt_(opt) {
    if (opt_.segment_bits < 16)
        throw std::invalid_argument("dynamic_rmm: segment_bits must be >= 16");
}

dynamic_rmm::dynamic_rmm(const paren_bitvector& p, options opt) : dynamic_rmm(opt) {
    if (p.size() > 0) root_ = build_range(p.view(), 0, p.size());
}

dynamic_rmm::node_ptr dynamic_rmm::make_leaf(std::vector<uint64_t> seg, uint64_t len) const {
    auto n = std::make_unique<node>();
    n->seg = std::move(seg);
    n->seg_len = len;
    n->seg.resize(words_for(len));
    bits::clear_tail(n->seg, len);
    recompute_leaf(*n);
    return n;
}

dynamic_rmm::node_ptr dynamic_rmm::build_range(bit_view v, uint64_t from, uint64_t count) const {
    // pick a leaf budget with average fill in [L, 2L], then build a perfectly
    // balanced tree over it splitting the bit count proportionally
    uint64_t nleaves = 1;
    if (count > 2 * L()) {
        uint64_t lo = (count + 2 * L() - 1) / (2 * L());
        uint64_t hi = count / L();
        nleaves = std::clamp<uint64_t>(count / (3 * L() / 2), lo, hi);
    }
    struct builder {
        const dynamic_rmm* self;
        bit_view v;
        node_ptr go(uint64_t from, uint64_t count, uint64_t nleaves) const {
            if (nleaves == 1) {
                std::vector<uint64_t> seg(words_for(count), 0);
                for (uint64_t t = 0; t < count; t += word_bits) {
                    unsigned c =
                        count - t >= word_bits ? word_bits : static_cast<unsigned>(count - t);
                    bits::write_bits(seg.data(), t, bits::read_bits(v.words, from + t, c), c);
                }
                return self->make_leaf(std::move(seg), count);
            }
            uint64_t lhalf = nleaves / 2;
            uint64_t lcount = count / nleaves * lhalf + std::min<uint64_t>(count % nleaves, lhalf);
            auto n = std::make_unique<node>();
            n->left = go(from, lcount, lhalf);
            n->right = go(from + lcount, count - lcount, nleaves - lhalf);
            pull_up(*n);
            return n;
        }
    };
    return builder{this, v}.go(from, count, nleaves);
}

dynamic_rmm dynamic_rmm::clone() const {
    dynamic_rmm out(opt_);
    struct copier {
        static node_ptr copy(const node_ptr& n) {
            if (!n) return nullptr;
            auto c = std::make_unique<node>(*n);  // copies aggregates and seg
            c->left = copy(n->left);
            c->right = copy(n->right);
            return c;
        }
    };
    out.root_ = copier::copy(root_);
    return out;
}

void dynamic_rmm::recompute_leaf(node& nd) {
    nd.height = 0;
    nd.size = nd.seg_len;
    if (nd.seg_len == 0) {
        nd.e = nd.m = nd.M = 0;
        nd.n = nd.ones = nd.p10 = nd.p01 = 0;
        nd.first_bit = nd.last_bit = false;
        return;
    }
    chunk_stats st;
    bool started = false;
    for (uint64_t t = 0; t < nd.seg_len; t += word_bits) {
        unsigned c = nd.seg_len - t >= word_bits ? word_bits : static_cast<unsigned>(nd.seg_len - t);
        chunk_stats w = word_stats(nd.seg[t / word_bits], c);
        st = started ? concat(st, w) : w;
        started = true;
    }
    nd.e = st.total;
    nd.m = st.min_prefix;
    nd.M = st.max_prefix;
    nd.n = st.min_count;
    nd.ones = st.ones;
    nd.p10 = st.pat10;
    nd.p01 = st.pat01;
    nd.first_bit = st.first_bit;
    nd.last_bit = st.last_bit;
}

void dynamic_rmm::combine_children(const node& l, const node& r, node& out) {
    out.size = l.size + r.size;
    out.e = l.e + r.e;
    int64_t rm = l.e + r.m;
    if (l.m < rm) {
        out.m = l.m;
        out.n = l.n;
    } else if (l.m > rm) {
        out.m = rm;
        out.n = r.n;
    } else {
        out.m = l.m;
        out.n = l.n + r.n;
    }
    out.M = std::max(l.M, l.e + r.M);
    out.ones = l.ones + r.ones;
    out.p10 = l.p10 + r.p10 + (l.last_bit && !r.first_bit ? 1 : 0);
    out.p01 = l.p01 + r.p01 + (!l.last_bit && r.first_bit ? 1 : 0);
    out.first_bit = l.first_bit;
    out.last_bit = r.last_bit;
    out.height = 1 + std::max(l.height, r.height);
}

void dynamic_rmm::pull_up(node& nd) { combine_children(*nd.left, *nd.right, nd); }

dynamic_rmm::node_ptr dynamic_rmm::rotate_left(node_ptr n) {
    node_ptr r = std::move(n->right);
    n->right = std::move(r->left);
    pull_up(*n);
    r->left = std::move(n);
    pull_up(*r);
    return r;
}

dynamic_rmm::node_ptr dynamic_rmm::rotate_right(node_ptr n) {
    node_ptr l = std::move(n->left);
    n->left = std::move(l->right);
    pull_up(*n);
    l->right = std::move(n);
    pull_up(*l);
    return l;
}

void dynamic_rmm::rebalance(node_ptr& n) {
    int bf = height_of(n->left) - height_of(n->right);
    if (bf > 1) {
        if (height_of(n->left->left) < height_of(n->left->right)) n->left = rotate_left(std::move(n->left));
        n = rotate_right(std::move(n));
    } else if (bf < -1) {
        if (height_of(n->right->right) < height_of(n->right->left)) n->right = rotate_right(std::move(n->right));
        n = rotate_left(std::move(n));
    }
}

dynamic_rmm::node_ptr dynamic_rmm::join(node_ptr a, node_ptr b) {
    if (!a) return b;
    if (!b) return a;
    if (std::abs(a->height - b->height) <= 1) {
        auto n = std::make_unique<node>();
        n->left = std::move(a);
        n->right = std::move(b);
        pull_up(*n);
        return n;
    }
    if (a->height > b->height) {
        a->right = join(std::move(a->right), std::move(b));
        pull_up(*a);
        rebalance(a);
        return a;
    }
    b->left = join(std::move(a), std::move(b->left));
    pull_up(*b);
    rebalance(b);
    return b;
}

std::pair<dynamic_rmm::node_ptr, dynamic_rmm::node_ptr> dynamic_rmm::split(node_ptr n, uint64_t pos) {
    if (!n) return {nullptr, nullptr};
    if (n->leaf()) {
        if (pos == 0) return {nullptr, std::move(n)};
        if (pos == n->seg_len) return {std::move(n), nullptr};
        auto right = std::make_unique<node>();
        uint64_t rlen = n->seg_len - pos;
        right->seg.assign(words_for(rlen), 0);
        for (uint64_t t = 0; t < rlen; t += word_bits) {
            unsigned c = rlen - t >= word_bits ? word_bits : static_cast<unsigned>(rlen - t);
            bits::write_bits(right->seg.data(), t, bits::read_bits(n->seg.data(), pos + t, c), c);
        }
        right->seg_len = rlen;
        recompute_leaf(*right);
        n->seg_len = pos;
        n->seg.resize(words_for(pos));
        bits::clear_tail(n->seg, pos);
        recompute_leaf(*n);
        return {std::move(n), std::move(right)};
    }
    uint64_t lsz = n->left->size;
    if (pos <= lsz) {
        auto [a, b] = split(std::move(n->left), pos);
        return {std::move(a), join(std::move(b), std::move(n->right))};
    }
    auto [a, b] = split(std::move(n->right), pos - lsz);
    return {join(std::move(n->left), std::move(a)), std::move(b)};
}

template <class Fn>
void dynamic_rmm::edit_leaf(node_ptr& n, uint64_t pos, Fn&& fn) {
    if (n->leaf()) {
        n = fn(std::move(n), pos);
        return;
    }
    uint64_t lsz = n->left->size;
    if (pos < lsz) {
        edit_leaf(n->left, pos, fn);
        if (!n->left) {
            n = std::move(n->right);
            return;
        }
    } else {
        edit_leaf(n->right, pos - lsz, fn);
        if (!n->right) {
            n = std::move(n->left);
            return;
        }
    }
    pull_up(*n);
    rebalance(n);
}

void dynamic_rmm::insert_bit(uint64_t pos, bool bit) {
    if (!root_) {
        std::vector<uint64_t> seg(1, bit ? 1u : 0u);
        root_ = make_leaf(std::move(seg), 1);
        return;
    }
    uint64_t lim = 2 * L();
    edit_leaf(root_, pos, [&](node_ptr leaf, uint64_t rel) -> node_ptr {
        bits::insert_bits(leaf->seg, leaf->seg_len, rel, bit ? 1 : 0, 1);
        if (leaf->seg_len <= lim) {
            recompute_leaf(*leaf);
            return leaf;
        }
        uint64_t half = leaf->seg_len / 2;
        auto [a, b] = split(std::move(leaf), half);
        auto n = std::make_unique<node>();
        n->left = std::move(a);
        n->right = std::move(b);
        pull_up(*n);
        return n;
    });
}

void dynamic_rmm::delete_bit(uint64_t pos) {
    edit_leaf(root_, pos, [&](node_ptr leaf, uint64_t rel) -> node_ptr {
        bits::erase_bits(leaf->seg, leaf->seg_len, rel, 1);
        if (leaf->seg_len == 0) return nullptr;
        recompute_leaf(*leaf);
        return leaf;
    });
    if (root_) normalize_leaf_at(pos < size() ? pos : size() - 1);
}

std::pair<uint64_t, uint64_t> dynamic_rmm::locate_leaf(uint64_t pos) const {
    const node* n = root_.get();
    uint64_t start = 0;
    while (!n->leaf()) {
        if (pos < n->left->size) {
            n = n->left.get();
        } else {
            pos -= n->left->size;
            start += n->left->size;
            n = n->right.get();
        }
    }
    return {start, n->seg_len};
}

void dynamic_rmm::normalize_leaf_at(uint64_t pos) {
    while (root_ && !root_->leaf()) {
        if (pos >= size()) pos = size() - 1;
        auto [start, len] = locate_leaf(pos);
        if (len >= L()) return;
        auto grab = [&](uint64_t at) {
            std::pair<std::vector<uint64_t>, uint64_t> out;
            edit_leaf(root_, at, [&](node_ptr leaf, uint64_t) -> node_ptr {
                out.first = leaf->seg;
                out.second = leaf->seg_len;
                return leaf;
            });
            return out;
        };
        auto [mine, mlen] = grab(start);
        uint64_t dst;
        std::vector<uint64_t> merged;
        uint64_t merged_len = 0;
        if (start + len < size()) {
            auto [nb, nblen] = grab(start + len);
            merged = std::move(mine);
            merged_len = mlen;
            merged.resize(words_for(mlen + nblen), 0);
            for (uint64_t t = 0; t < nblen; t += word_bits) {
                unsigned c = nblen - t >= word_bits ? word_bits : static_cast<unsigned>(nblen - t);
                bits::write_bits(merged.data(), mlen + t, bits::read_bits(nb.data(), t, c), c);
            }
            merged_len = mlen + nblen;
            // drop the right neighbor, then rewrite my leaf
            edit_leaf(root_, start + len, [](node_ptr, uint64_t) -> node_ptr { return nullptr; });
            dst = start;
        } else {
            auto [pstart, plen] = locate_leaf(start - 1);
            auto [pb, pblen] = grab(pstart);
            merged = std::move(pb);
            merged_len = pblen;
            merged.resize(words_for(pblen + mlen), 0);
            for (uint64_t t = 0; t < mlen; t += word_bits) {
                unsigned c = mlen - t >= word_bits ? word_bits : static_cast<unsigned>(mlen - t);
                bits::write_bits(merged.data(), pblen + t, bits::read_bits(mine.data(), t, c), c);
            }
            merged_len = pblen + mlen;
            edit_leaf(root_, start, [](node_ptr, uint64_t) -> node_ptr { return nullptr; });
            dst = pstart;
            (void)plen;
        }
        bits::clear_tail(merged, merged_len);
        uint64_t lim = 2 * L();
        edit_leaf(root_, dst, [&](node_ptr leaf, uint64_t) -> node_ptr {
            if (merged_len <= lim) {
                leaf->seg = std::move(merged);
                leaf->seg_len = merged_len;
                leaf->seg.resize(words_for(merged_len));
                recompute_leaf(*leaf);
                return leaf;
            }
            leaf->seg = std::move(merged);
            leaf->seg_len = merged_len;
            leaf->seg.resize(words_for(merged_len));
            bits::clear_tail(leaf->seg, merged_len);
            auto [a, b] = split(std::move(leaf), merged_len / 2);
            auto n = std::make_unique<node>();
            n->left = std::move(a);
            n->right = std::move(b);
            pull_up(*n);
            return n;
        });
        pos = dst;
    }
}

// --- queries ---

void dynamic_rmm::check_pos(uint64_t i) const {
    if (i >= size()) throw std::out_of_range("dynamic_rmm: position out of range");
}

void dynamic_rmm::check_range(uint64_t i, uint64_t j) const {
    if (i > j || j >= size()) throw std::out_of_range("dynamic_rmm: bad range");
}

bool dynamic_rmm::bit_at(uint64_t i) const {
    check_pos(i);
    const node* n = root_.get();
    while (!n->leaf()) {
        if (i < n->left->size) {
            n = n->left.get();
        } else {
            i -= n->left->size;
            n = n->right.get();
        }
    }
    return (n->seg[i / word_bits] >> (i % word_bits)) & 1;
}

paren_bitvector dynamic_rmm::to_bits() const {
    paren_bitvector out(size());
    uint64_t at = 0;
    struct walker {
        static void go(const node* n, paren_bitvector& out, uint64_t& at) {
            if (n->leaf()) {
                for (uint64_t t = 0; t < n->seg_len; t += word_bits) {
                    unsigned c = n->seg_len - t >= word_bits ? word_bits
                                                             : static_cast<unsigned>(n->seg_len - t);
                    bits::write_bits(out.mutable_words().data(), at + t,
                                     bits::read_bits(n->seg.data(), t, c), c);
                }
                at += n->seg_len;
                return;
            }
            go(n->left.get(), out, at);
            go(n->right.get(), out, at);
        }
    };
    if (root_) walker::go(root_.get(), out, at);
    return out;
}

int64_t dynamic_rmm::excess(uint64_t i) const {
    check_pos(i);
    const node* n = root_.get();
    int64_t base = 0;
    while (!n->leaf()) {
        if (i < n->left->size) {
            n = n->left.get();
        } else {
            base += n->left->e;
            i -= n->left->size;
            n = n->right.get();
        }
    }
    return base + bits::excess_delta({n->seg.data(), n->seg_len}, 0, i);
}

int64_t dynamic_rmm::sum(uint64_t i, uint64_t j) const {
    check_range(i, j);
    return excess(j) - (i == 0 ? 0 : excess(i - 1));
}

// Recursive value searches. `from`/`upto` may run past the node on either
// side; whole-subtree cases prune through the cached m/M bounds, which is
// exact because prefix excess moves in unit steps.
struct dynamic_rmm_search {
    using node = dynamic_rmm::node;

    static bit_view view(const node& n) { return {n.seg.data(), n.seg_len}; }

    static std::optional<uint64_t> fwd_val(const node* n, int64_t from, int64_t base, int64_t target) {
        if (from >= static_cast<int64_t>(n->size)) return std::nullopt;
        if (from <= 0 && (target < base + n->m || target > base + n->M)) return std::nullopt;
        if (n->leaf()) {
            uint64_t f = from <= 0 ? 0 : static_cast<uint64_t>(from);
            int64_t start = base;
            if (f > 0) start += bits::excess_delta(view(*n), 0, f - 1);
            return bits::fwd_find(view(*n), f, n->seg_len - 1, start, target);
        }
        if (auto r = fwd_val(n->left.get(), from, base, target)) return r;
        auto r = fwd_val(n->right.get(), from - static_cast<int64_t>(n->left->size),
                         base + n->left->e, target);
        if (r) return n->left->size + *r;
        return std::nullopt;
    }

    static std::optional<uint64_t> bwd_val(const node* n, int64_t upto, int64_t base, int64_t target) {
        if (upto < 0) return std::nullopt;
        if (upto >= static_cast<int64_t>(n->size) - 1 &&
            (target < base + n->m || target > base + n->M))
            return std::nullopt;
        if (n->leaf()) {
            uint64_t hi = std::min<int64_t>(upto, n->seg_len - 1);
            uint64_t c = bits::count_value(view(*n), 0, hi, base, target);
            if (c == 0) return std::nullopt;
            return bits::select_value(view(*n), 0, hi, base, target, c);
        }
        int64_t lsz = n->left->size;
        if (auto r = bwd_val(n->right.get(), upto - lsz, base + n->left->e, target))
            return lsz + *r;
        return bwd_val(n->left.get(), upto, base, target);
    }

    static int64_t min_val(const node* n, int64_t i, int64_t j, int64_t base) {
        if (i <= 0 && j >= static_cast<int64_t>(n->size) - 1) return base + n->m;
        if (n->leaf()) {
            uint64_t f = i <= 0 ? 0 : static_cast<uint64_t>(i);
            uint64_t t = std::min<int64_t>(j, n->seg_len - 1);
            int64_t start = base;
            if (f > 0) start += bits::excess_delta(view(*n), 0, f - 1);
            return bits::range_min(view(*n), f, t, start).value;
        }
        int64_t lsz = n->left->size;
        int64_t best = INT64_MAX;
        if (i < lsz) best = min_val(n->left.get(), i, j, base);
        if (j >= lsz) best = std::min(best, min_val(n->right.get(), i - lsz, j - lsz, base + n->left->e));
        return best;
    }

    static int64_t max_val(const node* n, int64_t i, int64_t j, int64_t base) {
        if (i <= 0 && j >= static_cast<int64_t>(n->size) - 1) return base + n->M;
        if (n->leaf()) {
            uint64_t f = i <= 0 ? 0 : static_cast<uint64_t>(i);
            uint64_t t = std::min<int64_t>(j, n->seg_len - 1);
            int64_t start = base;
            if (f > 0) start += bits::excess_delta(view(*n), 0, f - 1);
            return bits::range_max(view(*n), f, t, start).value;
        }
        int64_t lsz = n->left->size;
        int64_t best = INT64_MIN;
        if (i < lsz) best = max_val(n->left.get(), i, j, base);
        if (j >= lsz) best = std::max(best, max_val(n->right.get(), i - lsz, j - lsz, base + n->left->e));
        return best;
    }

    static uint64_t count_val(const node* n, int64_t i, int64_t j, int64_t base, int64_t target) {
        if (j < 0 || i >= static_cast<int64_t>(n->size)) return 0;
        if (i <= 0 && j >= static_cast<int64_t>(n->size) - 1) {
            if (base + n->m == target) return n->n;
            if (target < base + n->m || target > base + n->M) return 0;
        }
        if (n->leaf()) {
            uint64_t f = i <= 0 ? 0 : static_cast<uint64_t>(i);
            uint64_t t = std::min<int64_t>(j, n->seg_len - 1);
            int64_t start = base;
            if (f > 0) start += bits::excess_delta(view(*n), 0, f - 1);
            return bits::count_value(view(*n), f, t, start, target);
        }
        int64_t lsz = n->left->size;
        return count_val(n->left.get(), i, j, base, target) +
               count_val(n->right.get(), i - lsz, j - lsz, base + n->left->e, target);
    }

    static std::optional<uint64_t> select_val(const node* n, int64_t i, int64_t j, int64_t base,
                                              int64_t target, uint64_t& q) {
        if (j < 0 || i >= static_cast<int64_t>(n->size)) return std::nullopt;
        bool whole = i <= 0 && j >= static_cast<int64_t>(n->size) - 1;
        if (whole && base + n->m != target && !n->leaf()) {
            if (target < base + n->m || target > base + n->M) return std::nullopt;
        }
        if (whole && base + n->m == target && !n->leaf() && q > n->n) {
            q -= n->n;
            return std::nullopt;
        }
        if (n->leaf()) {
            uint64_t f = i <= 0 ? 0 : static_cast<uint64_t>(i);
            uint64_t t = std::min<int64_t>(j, n->seg_len - 1);
            int64_t start = base;
            if (f > 0) start += bits::excess_delta(view(*n), 0, f - 1);
            uint64_t c = bits::count_value(view(*n), f, t, start, target);
            if (q <= c) return bits::select_value(view(*n), f, t, start, target, q);
            q -= c;
            return std::nullopt;
        }
        int64_t lsz = n->left->size;
        if (auto r = select_val(n->left.get(), i, j, base, target, q)) return r;
        auto r = select_val(n->right.get(), i - lsz, j - lsz, base + n->left->e, target, q);
        if (r) return lsz + *r;
        return std::nullopt;
    }

    // pairs fully inside n with start position <= i
    static uint64_t pat_rank(const node* n, int64_t i, bool ten) {
        if (i < 0 || n->size < 2) return 0;
        if (i >= static_cast<int64_t>(n->size) - 1) return ten ? n->p10 : n->p01;
        if (n->leaf()) {
            uint64_t t = std::min<int64_t>(i, n->seg_len - 2);
            return ten ? bits::count_pat10(view(*n), 0, t) : bits::count_pat01(view(*n), 0, t);
        }
        int64_t lsz = n->left->size;
        if (i < lsz) return pat_rank(n->left.get(), i, ten);
        uint64_t boundary = ten ? (n->left->last_bit && !n->right->first_bit)
                                : (!n->left->last_bit && n->right->first_bit);
        return (ten ? n->left->p10 : n->left->p01) + boundary +
               pat_rank(n->right.get(), i - lsz, ten);
    }

    static uint64_t pat_select(const node* n, uint64_t q, bool ten) {
        if (n->leaf()) {
            auto r = ten ? bits::select_pat10(view(*n), 0, n->seg_len - 2, q)
                         : bits::select_pat01(view(*n), 0, n->seg_len - 2, q);
            return *r;
        }
        uint64_t lc = ten ? n->left->p10 : n->left->p01;
        uint64_t boundary = ten ? (n->left->last_bit && !n->right->first_bit)
                                : (!n->left->last_bit && n->right->first_bit);
        if (q <= lc) return pat_select(n->left.get(), q, ten);
        if (boundary && q == lc + 1) return n->left->size - 1;
        return n->left->size + pat_select(n->right.get(), q - lc - boundary, ten);
    }
};

std::optional<uint64_t> dynamic_rmm::fwd_search(uint64_t i, int64_t d) const {
    check_pos(i);
    int64_t target = (i == 0 ? 0 : excess(i - 1)) + d;
    return dynamic_rmm_search::fwd_val(root_.get(), static_cast<int64_t>(i), 0, target);
}

std::optional<uint64_t> dynamic_rmm::bwd_search(uint64_t i, int64_t d) const {
    check_pos(i);
    int64_t target = excess(i) - d;
    if (auto t = dynamic_rmm_search::bwd_val(root_.get(), static_cast<int64_t>(i) - 1, 0, target))
        return *t + 1;
    if (target == 0) return 0;
    return std::nullopt;
}

min_result dynamic_rmm::rmqi(uint64_t i, uint64_t j) const {
    check_range(i, j);
    int64_t v = dynamic_rmm_search::min_val(root_.get(), i, j, 0);
    auto pos = dynamic_rmm_search::fwd_val(root_.get(), static_cast<int64_t>(i), 0, v);
    return {*pos, v};
}

min_result dynamic_rmm::rMqi(uint64_t i, uint64_t j) const {
    check_range(i, j);
    int64_t v = dynamic_rmm_search::max_val(root_.get(), i, j, 0);
    auto pos = dynamic_rmm_search::fwd_val(root_.get(), static_cast<int64_t>(i), 0, v);
    return {*pos, v};
}

uint64_t dynamic_rmm::min_count(uint64_t i, uint64_t j) const {
    check_range(i, j);
    int64_t v = dynamic_rmm_search::min_val(root_.get(), i, j, 0);
    return dynamic_rmm_search::count_val(root_.get(), i, j, 0, v);
}

uint64_t dynamic_rmm::min_select(uint64_t i, uint64_t j, uint64_t q) const {
    check_range(i, j);
    if (q == 0) throw std::invalid_argument("min_select: q is 1-based");
    int64_t v = dynamic_rmm_search::min_val(root_.get(), i, j, 0);
    uint64_t qq = q;
    auto r = dynamic_rmm_search::select_val(root_.get(), i, j, 0, v, qq);
    if (!r) throw std::invalid_argument("min_select: q exceeds min_count");
    return *r;
}

uint64_t dynamic_rmm::rank1(uint64_t i) const {
    check_pos(i);
    return static_cast<uint64_t>((static_cast<int64_t>(i) + 1 + excess(i)) / 2);
}

uint64_t dynamic_rmm::rank0(uint64_t i) const { return i + 1 - rank1(i); }

uint64_t dynamic_rmm::select1(uint64_t q) const {
    if (q == 0 || q > ones()) throw std::invalid_argument("select1: rank out of range");
    const node* n = root_.get();
    uint64_t off = 0;
    while (!n->leaf()) {
        if (q <= n->left->ones) {
            n = n->left.get();
        } else {
            q -= n->left->ones;
            off += n->left->size;
            n = n->right.get();
        }
    }
    return off + *bits::select_one_range({n->seg.data(), n->seg_len}, 0, n->seg_len - 1, q);
}

uint64_t dynamic_rmm::select0(uint64_t q) const {
    if (q == 0 || q > size() - ones()) throw std::invalid_argument("select0: rank out of range");
    const node* n = root_.get();
    uint64_t off = 0;
    while (!n->leaf()) {
        uint64_t lzero = n->left->size - n->left->ones;
        if (q <= lzero) {
            n = n->left.get();
        } else {
            q -= lzero;
            off += n->left->size;
            n = n->right.get();
        }
    }
    return off + *bits::select_zero_range({n->seg.data(), n->seg_len}, 0, n->seg_len - 1, q);
}

uint64_t dynamic_rmm::ones() const { return root_ ? root_->ones : 0; }

uint64_t dynamic_rmm::p1_ones() const {
    return root_ ? root_->p10 + (root_->last_bit ? 1 : 0) : 0;
}

uint64_t dynamic_rmm::p2_ones() const { return root_ ? root_->p01 : 0; }

uint64_t dynamic_rmm::rank_p1(uint64_t i) const {
    check_pos(i);
    uint64_t r = dynamic_rmm_search::pat_rank(root_.get(), static_cast<int64_t>(i), true);
    if (i == size() - 1 && root_->last_bit) ++r;  // virtual trailing 0
    return r;
}

uint64_t dynamic_rmm::select_p1(uint64_t q) const {
    if (q == 0 || q > p1_ones()) throw std::invalid_argument("select_p1: rank out of range");
    if (q > root_->p10) return size() - 1;  // the virtual-lookahead pair
    return dynamic_rmm_search::pat_select(root_.get(), q, true);
}

uint64_t dynamic_rmm::rank_p2(uint64_t i) const {
    check_pos(i);
    return dynamic_rmm_search::pat_rank(root_.get(), static_cast<int64_t>(i), false);
}

uint64_t dynamic_rmm::select_p2(uint64_t q) const {
    if (q == 0 || q > p2_ones()) throw std::invalid_argument("select_p2: rank out of range");
    return dynamic_rmm_search::pat_select(root_.get(), q, false);
}

// --- edits ---

void dynamic_rmm::insert_pair(uint64_t i, uint64_t j) {
    if (i > j || j > size()) throw std::out_of_range("insert_pair: bad positions");
    if (i < j) {
        // the new pair matches iff the enclosed bits form a balanced substring
        int64_t before = i == 0 ? 0 : excess(i - 1);
        if (excess(j - 1) != before ||
            dynamic_rmm_search::min_val(root_.get(), i, j - 1, 0) < before)
            throw balance_violation("insert_pair: enclosed range is not balanced");
    }
    insert_bit(j, false);
    insert_bit(i, true);
}

void dynamic_rmm::delete_node(uint64_t i) {
    check_pos(i);
    if (!bit_at(i)) throw std::invalid_argument("delete_node: not an opening parenthesis");
    if (opt_.forbid_empty && size() == 2)
        throw std::invalid_argument("delete_node: structure configured to stay nonempty");
    auto c = fwd_search(i, 0);
    if (!c) throw std::invalid_argument("delete_node: no matching close parenthesis");
    delete_bit(*c);
    delete_bit(i);
}

void dynamic_rmm::attach(uint64_t p, dynamic_rmm&& s) {
    if (p > size()) throw std::out_of_range("attach: bad position");
    if (s.total_excess() != 0 || s.min_excess() < 0)
        throw balance_violation("attach: attached sequence is not balanced");
    uint64_t slen = s.size();
    if (slen == 0) return;
    auto [a, b] = split(std::move(root_), p);
    root_ = join(join(std::move(a), std::move(s.root_)), std::move(b));
    if (p > 0) normalize_leaf_at(p - 1);
    normalize_leaf_at(p);
    normalize_leaf_at(p + slen - 1);
    if (p + slen < size()) normalize_leaf_at(p + slen);
}

dynamic_rmm dynamic_rmm::detach(uint64_t v) {
    check_pos(v);
    if (!bit_at(v)) throw std::invalid_argument("detach: not an opening parenthesis");
    auto c = fwd_search(v, 0);
    if (!c) throw std::invalid_argument("detach: no matching close parenthesis");
    if (v == 0 && *c == size() - 1)
        throw std::invalid_argument("detach: subtree spans the whole sequence");
    auto [a, rest] = split(std::move(root_), v);
    auto [mid, b] = split(std::move(rest), *c - v + 1);
    root_ = join(std::move(a), std::move(b));
    if (root_) {
        if (v > 0) normalize_leaf_at(v - 1);
        if (v < size()) normalize_leaf_at(v);
    }
    dynamic_rmm out(opt_);
    out.root_ = std::move(mid);
    out.normalize_leaf_at(0);
    if (out.size() > 0) out.normalize_leaf_at(out.size() - 1);
    return out;
}

// --- maintenance ---

std::optional<dynamic_rmm::audit_issue> dynamic_rmm::audit() const {
    if (!root_) return std::nullopt;
    struct checker {
        uint64_t L;
        bool sole;
        std::optional<audit_issue> go(const node* n, uint64_t start) const {
            if (n->leaf()) {
                if (n->seg_len > 2 * L) return audit_issue{start, "leaf longer than 2L"};
                if (!sole && n->seg_len < L) return audit_issue{start, "leaf shorter than L"};
                if (n->seg.size() != (n->seg_len + word_bits - 1) / word_bits)
                    return audit_issue{start, "leaf buffer size mismatch"};
                if (n->seg_len % word_bits && !n->seg.empty() &&
                    (n->seg.back() >> (n->seg_len % word_bits)) != 0)
                    return audit_issue{start, "nonzero bits past leaf end"};
                node fresh;
                fresh.seg = n->seg;
                fresh.seg_len = n->seg_len;
                recompute_leaf(fresh);
                if (fresh.size != n->size || fresh.e != n->e || fresh.m != n->m ||
                    fresh.M != n->M || fresh.n != n->n || fresh.ones != n->ones ||
                    fresh.p10 != n->p10 || fresh.p01 != n->p01 ||
                    fresh.first_bit != n->first_bit || fresh.last_bit != n->last_bit ||
                    n->height != 0)
                    return audit_issue{start, "leaf summary mismatch"};
                return std::nullopt;
            }
            if (!n->left || !n->right) return audit_issue{start, "internal node missing a child"};
            if (auto r = go(n->left.get(), start)) return r;
            if (auto r = go(n->right.get(), start + n->left->size)) return r;
            if (std::abs(n->left->height - n->right->height) > 1)
                return audit_issue{start, "height balance violated"};
            node fresh;
            combine_children(*n->left, *n->right, fresh);
            if (fresh.size != n->size || fresh.e != n->e || fresh.m != n->m || fresh.M != n->M ||
                fresh.n != n->n || fresh.ones != n->ones || fresh.p10 != n->p10 ||
                fresh.p01 != n->p01 || fresh.first_bit != n->first_bit ||
                fresh.last_bit != n->last_bit || fresh.height != n->height)
                return audit_issue{start, "internal summary mismatch"};
            return std::nullopt;
        }
    };
    checker c{L(), root_->leaf()};
    return c.go(root_.get(), 0);
}

uint64_t dynamic_rmm::leaf_count() const {
    struct counter {
        static uint64_t go(const node* n) {
            if (!n) return 0;
            if (n->leaf()) return 1;
            return go(n->left.get()) + go(n->right.get());
        }
    };
    return counter::go(root_.get());
}

uint64_t dynamic_rmm::space_bytes() const {
    struct sizer {
        static uint64_t go(const node* n) {
            if (!n) return 0;
            return sizeof(node) + n->seg.capacity() * sizeof(uint64_t) + go(n->left.get()) +
                   go(n->right.get());
        }
    };
    return sizeof(*this) + sizer::go(root_.get());
}

void dynamic_rmm::debug_corrupt_min(uint64_t pos) {
    check_pos(pos);
    edit_leaf(root_, pos, [](node_ptr leaf, uint64_t) -> node_ptr {
        leaf->m -= 1;
        return leaf;
    });
}

}  // namespace rmm
