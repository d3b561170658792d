#ifndef RMMTREE_CODE_SEQUENCE_HPP
#define RMMTREE_CODE_SEQUENCE_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmmtree/bits.hpp"

namespace rmm {

/// Dynamic sequence of variable-length self-delimiting codes over a
/// height-balanced binary tree. Leaves hold whole codes (never split across
/// a leaf) in at most 2L bits; internal nodes cache code counts, bit counts
/// and the running f-sums declared by the codec. Indices are 1-based;
/// sum(i) is the f-total of the first i codes and search(s) the largest i
/// with sum(i) <= s.
template <class Codec>
class code_sequence {
  public:
    using value_type = typename Codec::value_type;
    static constexpr unsigned sum_count = Codec::sum_count;
    using sums_array = std::array<uint64_t, sum_count>;

    explicit code_sequence(Codec codec = {}, uint32_t leaf_bits = 2048)
        : codec_(std::move(codec)), L_(leaf_bits) {
        if (L_ < 2 * codec_.max_code_bits())
            throw std::invalid_argument("code_sequence: leaf_bits must be >= 2*max_code_bits");
    }

    code_sequence(code_sequence&&) noexcept = default;
    code_sequence& operator=(code_sequence&&) noexcept = default;
    code_sequence(const code_sequence&) = delete;
    code_sequence& operator=(const code_sequence&) = delete;

    const Codec& codec() const { return codec_; }
    uint64_t count() const { return root_ ? root_->codes : 0; }
    uint64_t bit_size() const { return root_ ? root_->bits : 0; }

    value_type get(uint64_t i) const {
        check_index(i);
        const node* n = root_.get();
        uint64_t idx = i - 1;
        while (!n->leaf()) {
            if (idx < n->left->codes) {
                n = n->left.get();
            } else {
                idx -= n->left->codes;
                n = n->right.get();
            }
        }
        uint64_t off = seek(*n, idx);
        return codec_.decode(view(*n), off).first;
    }

    std::vector<value_type> access(uint64_t i, uint64_t j) const {
        check_index(i);
        check_index(j);
        if (i > j) throw std::out_of_range("code_sequence: access range reversed");
        std::vector<value_type> out;
        out.reserve(j - i + 1);
        collect(root_.get(), i - 1, j - 1, out);
        return out;
    }

    void update(uint64_t i, value_type v) {
        check_index(i);
        uint64_t enc[2];
        unsigned len = codec_.encode(v, enc);
        edit_leaf(root_, i - 1, [&](leaf_ptr lf, uint64_t idx) -> leaf_ptr {
            uint64_t off = seek(*lf, idx);
            auto [old, olen] = codec_.decode(view(*lf), off);
            erase_code_bits(lf->seg, lf->bits, off, olen);
            insert_code_bits(lf->seg, lf->bits, off, enc, len);
            auto fo = codec_.sums(old);
            auto fn = codec_.sums(v);
            for (unsigned w = 0; w < sum_count; ++w) lf->sums[w] += fn[w] - fo[w];
            return maybe_split(std::move(lf));
        });
    }

    void insert(uint64_t i, value_type v) {
        if (i == 0 || i > count() + 1) throw std::out_of_range("code_sequence: bad index");
        uint64_t enc[2];
        unsigned len = codec_.encode(v, enc);
        if (!root_) {
            auto lf = std::make_unique<node>();
            insert_code_bits(lf->seg, lf->bits, 0, enc, len);
            lf->codes = 1;
            lf->sums = codec_.sums(v);
            root_ = std::move(lf);
            return;
        }
        insert_rec(root_, i - 1, enc, len, codec_.sums(v));
    }

    void erase(uint64_t i) {
        check_index(i);
        edit_leaf(root_, i - 1, [&](leaf_ptr lf, uint64_t idx) -> leaf_ptr {
            uint64_t off = seek(*lf, idx);
            auto [old, olen] = codec_.decode(view(*lf), off);
            erase_code_bits(lf->seg, lf->bits, off, olen);
            lf->codes--;
            auto fo = codec_.sums(old);
            for (unsigned w = 0; w < sum_count; ++w) lf->sums[w] -= fo[w];
            if (lf->codes == 0) return nullptr;
            return lf;
        });
        if (root_ && !root_->leaf()) compact(i == 1 ? 1 : i - 1);
    }

    uint64_t sum(uint64_t i, unsigned which = 0) const {
        if (i > count()) throw std::out_of_range("code_sequence: sum index out of range");
        uint64_t acc = 0;
        const node* n = root_.get();
        uint64_t left = i;
        while (n && left > 0 && !n->leaf()) {
            if (left >= n->left->codes) {
                acc += n->left->sums[which];
                left -= n->left->codes;
                n = n->right.get();
            } else {
                n = n->left.get();
            }
        }
        if (n && left > 0) {
            uint64_t off = 0;
            for (uint64_t t = 0; t < left; ++t) {
                auto [v, len] = codec_.decode(view(*n), off);
                acc += codec_.sums(v)[which];
                off += len;
            }
        }
        return acc;
    }

    uint64_t search(uint64_t s, unsigned which = 0) const {
        return search_proj(s, [which](const sums_array& a) { return a[which]; });
    }

    /// search over a monotone projection of the sums (e.g. zeros = b - c).
    template <class Proj>
    uint64_t search_proj(uint64_t s, Proj proj) const {
        const node* n = root_.get();
        uint64_t i = 0;
        while (n && !n->leaf()) {
            uint64_t lv = proj(n->left->sums);
            if (lv <= s) {
                s -= lv;
                i += n->left->codes;
                n = n->right.get();
            } else {
                n = n->left.get();
            }
        }
        if (n) {
            uint64_t off = 0;
            for (uint64_t t = 0; t < n->codes; ++t) {
                auto [v, len] = codec_.decode(view(*n), off);
                uint64_t fv = proj(codec_.sums(v));
                if (fv > s) break;
                s -= fv;
                ++i;
                off += len;
            }
        }
        return i;
    }

    sums_array totals() const { return root_ ? root_->sums : sums_array{}; }

    std::optional<std::string> audit() const {
        if (!root_) return std::nullopt;
        return audit_node(root_.get(), root_->leaf());
    }

    /// payload = stored code bits; structure = allocated node/buffer bytes
    struct space_info {
        uint64_t payload_bits;
        uint64_t structure_bytes;
    };
    space_info space() const {
        space_info s{bit_size(), sizeof(*this)};
        add_space(root_.get(), s.structure_bytes);
        return s;
    }

  private:
    struct node {
        uint64_t bits = 0;
        uint64_t codes = 0;
        sums_array sums{};
        int height = 0;
        std::unique_ptr<node> left, right;
        std::vector<uint64_t> seg;
        bool leaf() const { return !left; }
    };
    using node_ptr = std::unique_ptr<node>;
    using leaf_ptr = node_ptr;

    Codec codec_;
    uint32_t L_;
    node_ptr root_;

    static bit_view view(const node& n) { return {n.seg.data(), n.bits}; }

    // codes may be up to two words long
    static void insert_code_bits(std::vector<uint64_t>& seg, uint64_t& nbits, uint64_t off,
                                 const uint64_t enc[2], unsigned len) {
        bits::insert_bits(seg, nbits, off, enc[0], len > 64 ? 64 : len);
        if (len > 64) bits::insert_bits(seg, nbits, off + 64, enc[1], len - 64);
    }

    static void erase_code_bits(std::vector<uint64_t>& seg, uint64_t& nbits, uint64_t off,
                                unsigned len) {
        if (len > 64) {
            bits::erase_bits(seg, nbits, off + 64, len - 64);
            len = 64;
        }
        bits::erase_bits(seg, nbits, off, len);
    }

    void check_index(uint64_t i) const {
        if (i == 0 || i > count()) throw std::out_of_range("code_sequence: bad index");
    }

    uint64_t seek(const node& lf, uint64_t idx) const {
        uint64_t off = 0;
        for (uint64_t t = 0; t < idx; ++t) off += codec_.decode(view(lf), off).second;
        return off;
    }

    static int height_of(const node_ptr& n) { return n ? n->height : -1; }

    static void pull_up(node& n) {
        n.bits = n.left->bits + n.right->bits;
        n.codes = n.left->codes + n.right->codes;
        for (unsigned w = 0; w < sum_count; ++w)
            n.sums[w] = n.left->sums[w] + n.right->sums[w];
        n.height = 1 + std::max(n.left->height, n.right->height);
    }

    static node_ptr rotate_left(node_ptr n) {
        node_ptr r = std::move(n->right);
        n->right = std::move(r->left);
        pull_up(*n);
        r->left = std::move(n);
        pull_up(*r);
        return r;
    }

    static node_ptr rotate_right(node_ptr n) {
        node_ptr l = std::move(n->left);
        n->left = std::move(l->right);
        pull_up(*n);
        l->right = std::move(n);
        pull_up(*l);
        return l;
    }

    static void rebalance(node_ptr& n) {
        int bf = height_of(n->left) - height_of(n->right);
        if (bf > 1) {
            if (height_of(n->left->left) < height_of(n->left->right))
                n->left = rotate_left(std::move(n->left));
            n = rotate_right(std::move(n));
        } else if (bf < -1) {
            if (height_of(n->right->right) < height_of(n->right->left))
                n->right = rotate_right(std::move(n->right));
            n = rotate_left(std::move(n));
        }
    }

    /// split an oversized leaf at the code boundary nearest its bit midpoint
    node_ptr maybe_split(leaf_ptr lf) {
        if (lf->bits <= 2 * L_) return lf;
        uint64_t half = lf->bits / 2;
        uint64_t off = 0, cidx = 0;
        uint64_t walk = 0;
        for (uint64_t c = 1; c < lf->codes; ++c) {
            walk += codec_.decode(view(*lf), walk).second;
            uint64_t dist = walk > half ? walk - half : half - walk;
            uint64_t best = off > half ? off - half : half - off;
            if (cidx == 0 || dist < best) {
                off = walk;
                cidx = c;
            }
            if (walk >= half) break;
        }
        auto right = std::make_unique<node>();
        uint64_t rbits = lf->bits - off;
        right->seg.assign((rbits + word_bits - 1) / word_bits, 0);
        for (uint64_t t = 0; t < rbits; t += word_bits) {
            unsigned c = rbits - t >= word_bits ? word_bits : static_cast<unsigned>(rbits - t);
            bits::write_bits(right->seg.data(), t, bits::read_bits(lf->seg.data(), off + t, c), c);
        }
        right->bits = rbits;
        right->codes = lf->codes - cidx;
        recount(*right);
        lf->bits = off;
        lf->codes = cidx;
        lf->seg.resize((off + word_bits - 1) / word_bits);
        bits::clear_tail(lf->seg, off);
        recount(*lf);
        auto n = std::make_unique<node>();
        n->left = std::move(lf);
        n->right = std::move(right);
        pull_up(*n);
        return n;
    }

    void recount(node& lf) const {
        lf.sums = {};
        uint64_t off = 0;
        for (uint64_t t = 0; t < lf.codes; ++t) {
            auto [v, len] = codec_.decode(view(lf), off);
            auto f = codec_.sums(v);
            for (unsigned w = 0; w < sum_count; ++w) lf.sums[w] += f[w];
            off += len;
        }
    }

    template <class Fn>
    void edit_leaf(node_ptr& n, uint64_t idx, Fn&& fn) {
        if (n->leaf()) {
            n = fn(std::move(n), idx);
            return;
        }
        uint64_t lc = n->left->codes;
        if (idx < lc) {
            edit_leaf(n->left, idx, fn);
            if (!n->left) {
                n = std::move(n->right);
                return;
            }
        } else {
            edit_leaf(n->right, idx - lc, fn);
            if (!n->right) {
                n = std::move(n->left);
                return;
            }
        }
        pull_up(*n);
        rebalance(n);
    }

    void insert_rec(node_ptr& n, uint64_t idx, const uint64_t enc[2], unsigned len, sums_array f) {
        if (n->leaf()) {
            uint64_t off = seek(*n, idx);
            insert_code_bits(n->seg, n->bits, off, enc, len);
            n->codes++;
            for (unsigned w = 0; w < sum_count; ++w) n->sums[w] += f[w];
            n = maybe_split(std::move(n));
            return;
        }
        if (idx < n->left->codes)
            insert_rec(n->left, idx, enc, len, f);
        else
            insert_rec(n->right, idx - n->left->codes, enc, len, f);
        pull_up(*n);
        rebalance(n);
    }

    /// merge a short leaf into its right neighbor when the pair still fits
    void compact(uint64_t i) {
        if (!root_ || root_->leaf()) return;
        uint64_t idx = i - 1;
        if (idx >= count()) idx = count() - 1;
        // locate the leaf holding code idx and its first code index
        const node* n = root_.get();
        uint64_t first = 0, rel = idx;
        while (!n->leaf()) {
            if (rel < n->left->codes) {
                n = n->left.get();
            } else {
                rel -= n->left->codes;
                first += n->left->codes;
                n = n->right.get();
            }
        }
        if (n->bits >= L_) return;
        uint64_t next_first = first + n->codes;
        if (next_first >= count()) return;
        // peek the right neighbor's size
        const node* nb = root_.get();
        uint64_t rel2 = next_first;
        while (!nb->leaf()) {
            if (rel2 < nb->left->codes) {
                nb = nb->left.get();
            } else {
                rel2 -= nb->left->codes;
                nb = nb->right.get();
            }
        }
        if (n->bits + nb->bits > 2 * L_) return;
        std::vector<uint64_t> merged = n->seg;
        uint64_t mbits = n->bits, mcodes = n->codes + nb->codes;
        sums_array msums = n->sums;
        for (unsigned w = 0; w < sum_count; ++w) msums[w] += nb->sums[w];
        merged.resize((mbits + nb->bits + word_bits - 1) / word_bits, 0);
        for (uint64_t t = 0; t < nb->bits; t += word_bits) {
            unsigned c = nb->bits - t >= word_bits ? word_bits : static_cast<unsigned>(nb->bits - t);
            bits::write_bits(merged.data(), mbits + t, bits::read_bits(nb->seg.data(), t, c), c);
        }
        mbits += nb->bits;
        edit_leaf(root_, next_first, [](leaf_ptr, uint64_t) -> leaf_ptr { return nullptr; });
        edit_leaf(root_, first, [&](leaf_ptr lf, uint64_t) -> leaf_ptr {
            lf->seg = std::move(merged);
            lf->bits = mbits;
            lf->codes = mcodes;
            lf->sums = msums;
            lf->seg.resize((mbits + word_bits - 1) / word_bits);
            bits::clear_tail(lf->seg, mbits);
            return lf;
        });
    }

    void collect(const node* n, uint64_t lo, uint64_t hi, std::vector<value_type>& out) const {
        if (!n || lo > hi) return;
        if (n->leaf()) {
            uint64_t off = seek(*n, lo);
            for (uint64_t t = lo; t <= hi && t < n->codes; ++t) {
                auto [v, len] = codec_.decode(view(*n), off);
                out.push_back(v);
                off += len;
            }
            return;
        }
        uint64_t lc = n->left->codes;
        if (lo < lc) collect(n->left.get(), lo, hi < lc - 1 ? hi : lc - 1, out);
        if (hi >= lc) collect(n->right.get(), lo >= lc ? lo - lc : 0, hi - lc, out);
    }

    std::optional<std::string> audit_node(const node* n, bool sole) const {
        if (n->leaf()) {
            if (n->codes == 0) return "leaf with no codes";
            if (n->bits > 2 * L_) return "leaf longer than 2L bits";
            node fresh;
            fresh.seg = n->seg;
            fresh.bits = n->bits;
            fresh.codes = n->codes;
            recount(fresh);
            uint64_t off = 0;
            for (uint64_t t = 0; t < n->codes; ++t) off += codec_.decode(view(*n), off).second;
            if (off != n->bits) return "leaf code lengths do not add up";
            for (unsigned w = 0; w < sum_count; ++w)
                if (fresh.sums[w] != n->sums[w]) return "leaf sums mismatch";
            if (n->height != 0) return "leaf height nonzero";
            return std::nullopt;
        }
        (void)sole;
        if (!n->left || !n->right) return "internal node missing a child";
        if (auto r = audit_node(n->left.get(), false)) return r;
        if (auto r = audit_node(n->right.get(), false)) return r;
        if (std::abs(n->left->height - n->right->height) > 1) return "height balance violated";
        if (n->bits != n->left->bits + n->right->bits) return "bit count mismatch";
        if (n->codes != n->left->codes + n->right->codes) return "code count mismatch";
        for (unsigned w = 0; w < sum_count; ++w)
            if (n->sums[w] != n->left->sums[w] + n->right->sums[w]) return "sum mismatch";
        if (n->height != 1 + std::max(n->left->height, n->right->height)) return "height mismatch";
        return std::nullopt;
    }

    static void add_space(const node* n, uint64_t& bytes) {
        if (!n) return;
        bytes += sizeof(node) + n->seg.capacity() * sizeof(uint64_t);
        add_space(n->left.get(), bytes);
        add_space(n->right.get(), bytes);
    }
};

}  // namespace rmm

#endif
