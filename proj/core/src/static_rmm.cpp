#include "rmmtree/static_rmm.hpp"

#include <bit>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace rmm {
namespace detail {

template <class I>
void rmm_summaries<I>::build(bit_view v, uint32_t s_, uint32_t k_) {
    s = s_;
    k = k_;
    len = v.len;
    nchunks = (len + s - 1) / s;

    level_real.clear();
    level_size.clear();
    level_off.clear();
    uint64_t real = nchunks;
    while (true) {
        level_real.push_back(real);
        if (real == 1) {
            level_size.push_back(1);
            break;
        }
        level_size.push_back((real + k - 1) / k * k);
        real = (real + k - 1) / k;
    }
    uint64_t total = 0;
    for (size_t l = 0; l < level_size.size(); ++l) {
        level_off.push_back(total);
        total += level_size[l];
    }
    e.assign(total, 0);
    m.assign(total, sentinel_min);
    M.assign(total, sentinel_max);
    n.assign(total, 0);
    ones.assign(total, 0);
    p1.assign(total, 0);
    p2.assign(total, 0);

    int64_t cum = 0;
    for (uint64_t j = 0; j < nchunks; ++j) {
        uint64_t lo = chunk_lo(j), hi = chunk_hi(j);
        auto mn = bits::range_min(v, lo, hi, cum);
        auto mx = bits::range_max(v, lo, hi, cum);
        uint64_t a = at(0, j);
        m[a] = static_cast<I>(mn.value);
        M[a] = static_cast<I>(mx.value);
        n[a] = static_cast<I>(bits::count_value(v, lo, hi, cum, mn.value));
        ones[a] = static_cast<I>(bits::popcount_range(v, lo, hi));
        p1[a] = static_cast<I>(bits::count_pat10(v, lo, hi));
        p2[a] = static_cast<I>(bits::count_pat01(v, lo, hi));
        cum += bits::excess_delta(v, lo, hi);
        e[a] = static_cast<I>(cum);
    }
    for (uint64_t j = nchunks; j < level_size[0]; ++j) e[at(0, j)] = static_cast<I>(cum);

    for (size_t lvl = 1; lvl < levels(); ++lvl) {
        for (uint64_t idx = 0; idx < level_real[lvl]; ++idx) {
            uint64_t c0 = idx * k;
            uint64_t c1 = c0 + k < level_real[lvl - 1] ? c0 + k : level_real[lvl - 1];
            uint64_t a = at(lvl, idx);
            I mm = sentinel_min, MM = sentinel_max, nn = 0, oo = 0, q1 = 0, q2 = 0;
            for (uint64_t c = c0; c < c1; ++c) {
                uint64_t ca = at(lvl - 1, c);
                if (m[ca] < mm) {
                    mm = m[ca];
                    nn = n[ca];
                } else if (m[ca] == mm) {
                    nn = static_cast<I>(nn + n[ca]);
                }
                if (M[ca] > MM) MM = M[ca];
                oo = static_cast<I>(oo + ones[ca]);
                q1 = static_cast<I>(q1 + p1[ca]);
                q2 = static_cast<I>(q2 + p2[ca]);
            }
            m[a] = mm;
            M[a] = MM;
            n[a] = nn;
            ones[a] = oo;
            p1[a] = q1;
            p2[a] = q2;
            e[a] = e[at(lvl - 1, c1 - 1)];
        }
        for (uint64_t idx = level_real[lvl]; idx < level_size[lvl]; ++idx)
            e[at(lvl, idx)] = static_cast<I>(cum);
    }
}

template <class I>
uint64_t rmm_summaries<I>::node_bits(size_t lvl, uint64_t idx) const {
    uint64_t leaves_per = 1;
    for (size_t l = 0; l < lvl; ++l) leaves_per *= k;
    uint64_t start = idx * leaves_per * s;
    if (start >= len) return 0;
    uint64_t end = start + leaves_per * s;
    return (end < len ? end : len) - start;
}

template <class I>
int64_t rmm_summaries<I>::excess(bit_view v, uint64_t i) const {
    uint64_t j = i / s;
    return cum_before(j) + bits::excess_delta(v, chunk_lo(j), i);
}

template <class I>
std::optional<uint64_t> rmm_summaries<I>::fwd_search(bit_view v, uint64_t i, int64_t d) const {
    uint64_t j = i / s;
    uint64_t lo = chunk_lo(j), hi = chunk_hi(j);
    int64_t prev = cum_before(j);
    if (i > lo) prev += bits::excess_delta(v, lo, i - 1);
    int64_t target = prev + d;
    if (auto r = bits::fwd_find(v, i, hi, prev, target)) return r;
    uint64_t idx = j;
    for (size_t lvl = 0; lvl + 1 < levels(); ++lvl) {
        uint64_t group = idx - idx % k;
        for (uint64_t t = idx + 1; t < group + k; ++t)
            if (contains(lvl, t, target)) return descend_fwd(v, lvl, t, target);
        idx /= k;
    }
    return std::nullopt;
}

template <class I>
uint64_t rmm_summaries<I>::descend_fwd(bit_view v, size_t lvl, uint64_t idx, int64_t target) const {
    while (lvl > 0) {
        uint64_t c0 = idx * k;
        uint64_t c = c0;
        while (!contains(lvl - 1, c, target)) ++c;
        idx = c;
        --lvl;
    }
    uint64_t lo = chunk_lo(idx), hi = chunk_hi(idx);
    auto r = bits::fwd_find(v, lo, hi, cum_before(idx), target);
    assert(r);
    return *r;
}

template <class I>
std::optional<uint64_t> rmm_summaries<I>::bwd_search(bit_view v, uint64_t i, int64_t d) const {
    uint64_t j = i / s;
    uint64_t lo = chunk_lo(j);
    int64_t base = cum_before(j);
    int64_t ei = base + bits::excess_delta(v, lo, i);
    int64_t target = ei - d;
    if (i > lo) {
        uint64_t c = bits::count_value(v, lo, i - 1, base, target);
        if (c > 0) return *bits::select_value(v, lo, i - 1, base, target, c) + 1;
    }
    uint64_t idx = j;
    for (size_t lvl = 0; lvl + 1 < levels(); ++lvl) {
        uint64_t group = idx - idx % k;
        for (uint64_t t = idx; t-- > group;)
            if (contains(lvl, t, target)) return descend_bwd(v, lvl, t, target) + 1;
        idx /= k;
    }
    if (target == 0) return 0;
    return std::nullopt;
}

template <class I>
uint64_t rmm_summaries<I>::descend_bwd(bit_view v, size_t lvl, uint64_t idx, int64_t target) const {
    while (lvl > 0) {
        uint64_t c0 = idx * k;
        uint64_t c = c0 + k;
        while (!contains(lvl - 1, c - 1, target)) --c;
        idx = c - 1;
        --lvl;
    }
    uint64_t lo = chunk_lo(idx), hi = chunk_hi(idx);
    int64_t base = cum_before(idx);
    uint64_t cnt = bits::count_value(v, lo, hi, base, target);
    assert(cnt > 0);
    return *bits::select_value(v, lo, hi, base, target, cnt);
}

template <class I>
auto rmm_summaries<I>::cover(uint64_t a, uint64_t b) const -> std::vector<piece> {
    std::vector<piece> left, right;
    uint64_t lo = a, hi = b;
    size_t lvl = 0;
    while (lo <= hi) {
        while (lo <= hi && lo % k != 0) left.push_back({lvl, lo++});
        while (lo <= hi && (hi + 1) % k != 0) right.push_back({lvl, hi--});
        if (lo > hi) break;
        lo /= k;
        hi = (hi + 1) / k - 1;
        ++lvl;
    }
    for (auto it = right.rbegin(); it != right.rend(); ++it) left.push_back(*it);
    return left;
}

template <class I>
min_result rmm_summaries<I>::rmqi(bit_view v, uint64_t i, uint64_t j) const {
    uint64_t a = i / s, b = j / s;
    if (a == b) {
        auto r = bits::range_min(v, i, j, excess(v, i) - (v.get(i) ? 1 : -1));
        return {r.pos, r.value};
    }
    auto first = bits::range_min(v, i, chunk_hi(a), excess(v, i) - (v.get(i) ? 1 : -1));
    int64_t best = first.value;
    uint64_t pos = first.pos;
    bool from_piece = false;
    piece win{};
    if (b > a + 1)
        for (auto& p : cover(a + 1, b - 1)) {
            int64_t val = m[at(p.lvl, p.idx)];
            if (val < best) {
                best = val;
                win = p;
                from_piece = true;
            }
        }
    auto last = bits::range_min(v, chunk_lo(b), j, cum_before(b));
    if (last.value < best) return {last.pos, last.value};
    if (!from_piece) return {pos, best};
    size_t lvl = win.lvl;
    uint64_t idx = win.idx;
    while (lvl > 0) {
        uint64_t c = idx * k;
        while (m[at(lvl - 1, c)] != best) ++c;
        idx = c;
        --lvl;
    }
    auto r = bits::range_min(v, chunk_lo(idx), chunk_hi(idx), cum_before(idx));
    return {r.pos, r.value};
}

template <class I>
min_result rmm_summaries<I>::rMqi(bit_view v, uint64_t i, uint64_t j) const {
    uint64_t a = i / s, b = j / s;
    if (a == b) {
        auto r = bits::range_max(v, i, j, excess(v, i) - (v.get(i) ? 1 : -1));
        return {r.pos, r.value};
    }
    auto first = bits::range_max(v, i, chunk_hi(a), excess(v, i) - (v.get(i) ? 1 : -1));
    int64_t best = first.value;
    uint64_t pos = first.pos;
    bool from_piece = false;
    piece win{};
    if (b > a + 1)
        for (auto& p : cover(a + 1, b - 1)) {
            int64_t val = M[at(p.lvl, p.idx)];
            if (val > best) {
                best = val;
                win = p;
                from_piece = true;
            }
        }
    auto last = bits::range_max(v, chunk_lo(b), j, cum_before(b));
    if (last.value > best) return {last.pos, last.value};
    if (!from_piece) return {pos, best};
    size_t lvl = win.lvl;
    uint64_t idx = win.idx;
    while (lvl > 0) {
        uint64_t c = idx * k;
        while (M[at(lvl - 1, c)] != best) ++c;
        idx = c;
        --lvl;
    }
    auto r = bits::range_max(v, chunk_lo(idx), chunk_hi(idx), cum_before(idx));
    return {r.pos, r.value};
}

template <class I>
int64_t rmm_summaries<I>::range_min_value(bit_view v, uint64_t i, uint64_t j) const {
    uint64_t a = i / s, b = j / s;
    int64_t base = excess(v, i) - (v.get(i) ? 1 : -1);
    if (a == b) return bits::range_min(v, i, j, base).value;
    int64_t best = bits::range_min(v, i, chunk_hi(a), base).value;
    if (b > a + 1)
        for (auto& p : cover(a + 1, b - 1)) {
            int64_t val = m[at(p.lvl, p.idx)];
            if (val < best) best = val;
        }
    int64_t last = bits::range_min(v, chunk_lo(b), j, cum_before(b)).value;
    return last < best ? last : best;
}

template <class I>
uint64_t rmm_summaries<I>::min_count(bit_view v, uint64_t i, uint64_t j) const {
    int64_t gmin = range_min_value(v, i, j);
    uint64_t a = i / s, b = j / s;
    int64_t base = excess(v, i) - (v.get(i) ? 1 : -1);
    if (a == b) return bits::count_value(v, i, j, base, gmin);
    uint64_t cnt = bits::count_value(v, i, chunk_hi(a), base, gmin);
    if (b > a + 1)
        for (auto& p : cover(a + 1, b - 1)) {
            uint64_t x = at(p.lvl, p.idx);
            if (m[x] == gmin) cnt += static_cast<uint64_t>(n[x]);
        }
    cnt += bits::count_value(v, chunk_lo(b), j, cum_before(b), gmin);
    return cnt;
}

template <class I>
uint64_t rmm_summaries<I>::min_select(bit_view v, uint64_t i, uint64_t j, uint64_t q) const {
    int64_t gmin = range_min_value(v, i, j);
    uint64_t a = i / s, b = j / s;
    int64_t base = excess(v, i) - (v.get(i) ? 1 : -1);
    if (a == b) {
        auto r = bits::select_value(v, i, j, base, gmin, q);
        if (!r) throw std::invalid_argument("min_select: q exceeds min_count");
        return *r;
    }
    uint64_t c = bits::count_value(v, i, chunk_hi(a), base, gmin);
    if (q <= c) return *bits::select_value(v, i, chunk_hi(a), base, gmin, q);
    q -= c;
    if (b > a + 1)
        for (auto& p : cover(a + 1, b - 1)) {
            uint64_t x = at(p.lvl, p.idx);
            uint64_t pc = m[x] == gmin ? static_cast<uint64_t>(n[x]) : 0;
            if (q > pc) {
                q -= pc;
                continue;
            }
            size_t lvl = p.lvl;
            uint64_t idx = p.idx;
            while (lvl > 0) {
                uint64_t cc = idx * k;
                while (true) {
                    uint64_t ca = at(lvl - 1, cc);
                    uint64_t inner = m[ca] == gmin ? static_cast<uint64_t>(n[ca]) : 0;
                    if (q <= inner) break;
                    q -= inner;
                    ++cc;
                }
                idx = cc;
                --lvl;
            }
            return *bits::select_value(v, chunk_lo(idx), chunk_hi(idx), cum_before(idx), gmin, q);
        }
    uint64_t lc = bits::count_value(v, chunk_lo(b), j, cum_before(b), gmin);
    if (q > lc) throw std::invalid_argument("min_select: q exceeds min_count");
    return *bits::select_value(v, chunk_lo(b), j, cum_before(b), gmin, q);
}

template <class I>
uint64_t rmm_summaries<I>::select1(bit_view v, uint64_t q) const {
    size_t lvl = levels() - 1;
    uint64_t idx = 0;
    while (lvl > 0) {
        uint64_t c = idx * k;
        while (q > static_cast<uint64_t>(ones[at(lvl - 1, c)])) {
            q -= static_cast<uint64_t>(ones[at(lvl - 1, c)]);
            ++c;
        }
        idx = c;
        --lvl;
    }
    return *bits::select_one_range(v, chunk_lo(idx), chunk_hi(idx), q);
}

template <class I>
uint64_t rmm_summaries<I>::select0(bit_view v, uint64_t q) const {
    size_t lvl = levels() - 1;
    uint64_t idx = 0;
    while (lvl > 0) {
        uint64_t c = idx * k;
        while (true) {
            uint64_t zeros = node_bits(lvl - 1, c) - static_cast<uint64_t>(ones[at(lvl - 1, c)]);
            if (q <= zeros) break;
            q -= zeros;
            ++c;
        }
        idx = c;
        --lvl;
    }
    return *bits::select_zero_range(v, chunk_lo(idx), chunk_hi(idx), q);
}

template <class I>
uint64_t rmm_summaries<I>::rank_pat(bit_view v, uint64_t i, bool ten) const {
    const std::vector<I>& arr = ten ? p1 : p2;
    uint64_t j = i / s;
    uint64_t acc = ten ? bits::count_pat10(v, chunk_lo(j), i) : bits::count_pat01(v, chunk_lo(j), i);
    uint64_t idx = j;
    for (size_t lvl = 0; lvl + 1 < levels(); ++lvl) {
        uint64_t group = idx - idx % k;
        for (uint64_t t = group; t < idx; ++t) acc += static_cast<uint64_t>(arr[at(lvl, t)]);
        idx /= k;
    }
    return acc;
}

template <class I>
uint64_t rmm_summaries<I>::select_pat(bit_view v, uint64_t q, bool ten) const {
    const std::vector<I>& arr = ten ? p1 : p2;
    size_t lvl = levels() - 1;
    uint64_t idx = 0;
    while (lvl > 0) {
        uint64_t c = idx * k;
        while (q > static_cast<uint64_t>(arr[at(lvl - 1, c)])) {
            q -= static_cast<uint64_t>(arr[at(lvl - 1, c)]);
            ++c;
        }
        idx = c;
        --lvl;
    }
    uint64_t lo = chunk_lo(idx), hi = chunk_hi(idx);
    return ten ? *bits::select_pat10(v, lo, hi, q) : *bits::select_pat01(v, lo, hi, q);
}

template <class I>
std::optional<std::string> rmm_summaries<I>::audit(bit_view v) const {
    rmm_summaries<I> fresh;
    fresh.build(v, s, k);
    auto mismatch = [&](const char* name, const std::vector<I>& a,
                        const std::vector<I>& b) -> std::optional<std::string> {
        for (size_t lvl = 0; lvl < levels(); ++lvl)
            for (uint64_t idx = 0; idx < level_real[lvl]; ++idx) {
                uint64_t x = at(lvl, idx);
                if (a[x] != b[x]) {
                    std::ostringstream os;
                    os << name << " mismatch at level " << lvl << " index " << idx;
                    return os.str();
                }
            }
        return std::nullopt;
    };
    if (auto r = mismatch("e", e, fresh.e)) return r;
    if (auto r = mismatch("m", m, fresh.m)) return r;
    if (auto r = mismatch("M", M, fresh.M)) return r;
    if (auto r = mismatch("n", n, fresh.n)) return r;
    if (auto r = mismatch("ones", ones, fresh.ones)) return r;
    if (auto r = mismatch("p1", p1, fresh.p1)) return r;
    if (auto r = mismatch("p2", p2, fresh.p2)) return r;
    return std::nullopt;
}

template <class I>
uint64_t rmm_summaries<I>::space_bytes() const {
    auto vec = [](const std::vector<I>& x) { return x.capacity() * sizeof(I); };
    auto off = [](const std::vector<uint64_t>& x) { return x.capacity() * sizeof(uint64_t); };
    return vec(e) + vec(m) + vec(M) + vec(n) + vec(ones) + vec(p1) + vec(p2) +
           off(level_off) + off(level_size) + off(level_real);
}

template struct rmm_summaries<int32_t>;
template struct rmm_summaries<int64_t>;

}  // namespace detail

static_rmm::static_rmm(paren_bitvector p, config cfg) : bits_(std::move(p)), cfg_(cfg) {
    if (bits_.empty()) throw std::invalid_argument("static_rmm: empty sequence");
    if (cfg.chunk_bits < 64 || !std::has_single_bit(cfg.chunk_bits))
        throw std::invalid_argument("static_rmm: chunk_bits must be a power of two >= 64");
    if (cfg.arity < 2 || !std::has_single_bit(cfg.arity))
        throw std::invalid_argument("static_rmm: arity must be a power of two >= 2");
    bool wide = cfg.width == summary_width::wide64 ||
                (cfg.width == summary_width::automatic && bits_.size() >= (1ull << 31));
    if (wide) {
        sums_.emplace<detail::rmm_summaries<int64_t>>();
        std::get<1>(sums_).build(bits_.view(), cfg.chunk_bits, cfg.arity);
    } else {
        std::get<0>(sums_).build(bits_.view(), cfg.chunk_bits, cfg.arity);
    }
}

void static_rmm::check_pos(uint64_t i) const {
    if (i >= size()) throw std::out_of_range("static_rmm: position out of range");
}

void static_rmm::check_range(uint64_t i, uint64_t j) const {
    if (i > j || j >= size()) throw std::out_of_range("static_rmm: bad range");
}

int64_t static_rmm::excess(uint64_t i) const {
    check_pos(i);
    return dispatch([&](const auto& s) { return s.excess(bits_.view(), i); });
}

int64_t static_rmm::sum(uint64_t i, uint64_t j) const {
    check_range(i, j);
    int64_t ej = excess(j);
    return i == 0 ? ej : ej - excess(i - 1);
}

std::optional<uint64_t> static_rmm::fwd_search(uint64_t i, int64_t d) const {
    check_pos(i);
    return dispatch([&](const auto& s) { return s.fwd_search(bits_.view(), i, d); });
}

std::optional<uint64_t> static_rmm::bwd_search(uint64_t i, int64_t d) const {
    check_pos(i);
    return dispatch([&](const auto& s) { return s.bwd_search(bits_.view(), i, d); });
}

min_result static_rmm::rmqi(uint64_t i, uint64_t j) const {
    check_range(i, j);
    return dispatch([&](const auto& s) { return s.rmqi(bits_.view(), i, j); });
}

min_result static_rmm::rMqi(uint64_t i, uint64_t j) const {
    check_range(i, j);
    return dispatch([&](const auto& s) { return s.rMqi(bits_.view(), i, j); });
}

uint64_t static_rmm::min_count(uint64_t i, uint64_t j) const {
    check_range(i, j);
    return dispatch([&](const auto& s) { return s.min_count(bits_.view(), i, j); });
}

uint64_t static_rmm::min_select(uint64_t i, uint64_t j, uint64_t q) const {
    check_range(i, j);
    if (q == 0) throw std::invalid_argument("min_select: q is 1-based");
    return dispatch([&](const auto& s) { return s.min_select(bits_.view(), i, j, q); });
}

uint64_t static_rmm::rank1(uint64_t i) const {
    check_pos(i);
    return static_cast<uint64_t>((static_cast<int64_t>(i) + 1 + excess(i)) / 2);
}

uint64_t static_rmm::rank0(uint64_t i) const { return i + 1 - rank1(i); }

uint64_t static_rmm::select1(uint64_t q) const {
    if (q == 0 || q > ones()) throw std::invalid_argument("select1: rank out of range");
    return dispatch([&](const auto& s) { return s.select1(bits_.view(), q); });
}

uint64_t static_rmm::select0(uint64_t q) const {
    if (q == 0 || q > size() - ones()) throw std::invalid_argument("select0: rank out of range");
    return dispatch([&](const auto& s) { return s.select0(bits_.view(), q); });
}

uint64_t static_rmm::rank_p1(uint64_t i) const {
    check_pos(i);
    return dispatch([&](const auto& s) { return s.rank_pat(bits_.view(), i, true); });
}

uint64_t static_rmm::select_p1(uint64_t q) const {
    if (q == 0 || q > p1_ones()) throw std::invalid_argument("select_p1: rank out of range");
    return dispatch([&](const auto& s) { return s.select_pat(bits_.view(), q, true); });
}

uint64_t static_rmm::rank_p2(uint64_t i) const {
    check_pos(i);
    return dispatch([&](const auto& s) { return s.rank_pat(bits_.view(), i, false); });
}

uint64_t static_rmm::select_p2(uint64_t q) const {
    if (q == 0 || q > p2_ones()) throw std::invalid_argument("select_p2: rank out of range");
    return dispatch([&](const auto& s) { return s.select_pat(bits_.view(), q, false); });
}

uint64_t static_rmm::ones() const {
    return dispatch([&](const auto& s) {
        return static_cast<uint64_t>(s.ones[s.at(s.levels() - 1, 0)]);
    });
}

uint64_t static_rmm::p1_ones() const {
    return dispatch([&](const auto& s) {
        return static_cast<uint64_t>(s.p1[s.at(s.levels() - 1, 0)]);
    });
}

uint64_t static_rmm::p2_ones() const {
    return dispatch([&](const auto& s) {
        return static_cast<uint64_t>(s.p2[s.at(s.levels() - 1, 0)]);
    });
}

int64_t static_rmm::total_excess() const {
    return dispatch([&](const auto& s) {
        return static_cast<int64_t>(s.e[s.at(s.levels() - 1, 0)]);
    });
}

int64_t static_rmm::min_excess() const {
    return dispatch([&](const auto& s) {
        return static_cast<int64_t>(s.m[s.at(s.levels() - 1, 0)]);
    });
}

std::optional<std::string> static_rmm::audit() const {
    return dispatch([&](const auto& s) { return s.audit(bits_.view()); });
}

uint64_t static_rmm::space_bytes() const {
    return sizeof(*this) + bits_.space_bytes() - sizeof(paren_bitvector) +
           dispatch([](const auto& s) { return s.space_bytes(); });
}

}  // namespace rmm
