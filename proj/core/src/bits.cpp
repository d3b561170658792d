#include "rmmtree/bits.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace rmm {

namespace {

// Per-byte summaries under the +-1 interpretation. pmin/pmax are over the
// eight nonempty prefixes, smin/smax over the eight nonempty suffixes.
// occ[b][d+8] counts prefixes of byte b with excess d.
struct byte_tables {
    int8_t total[256];
    int8_t pmin[256];
    int8_t pmax[256];
    uint8_t pmin_cnt[256];
    uint8_t pmin_pos[256];
    uint8_t pmax_pos[256];
    int8_t smin[256];
    int8_t smax[256];
    uint8_t occ[256][17];
    uint8_t pat10[256];
    uint8_t pat01[256];

    byte_tables() {
        for (int b = 0; b < 256; ++b) {
            int run = 0, mn = 9, mx = -9;
            std::memset(occ[b], 0, sizeof occ[b]);
            for (int t = 0; t < 8; ++t) {
                run += ((b >> t) & 1) ? 1 : -1;
                occ[b][run + 8]++;
                if (run < mn) {
                    mn = run;
                    pmin_cnt[b] = 1;
                    pmin_pos[b] = static_cast<uint8_t>(t);
                } else if (run == mn) {
                    pmin_cnt[b]++;
                }
                if (run > mx) {
                    mx = run;
                    pmax_pos[b] = static_cast<uint8_t>(t);
                }
            }
            total[b] = static_cast<int8_t>(run);
            pmin[b] = static_cast<int8_t>(mn);
            pmax[b] = static_cast<int8_t>(mx);
            run = 0;
            mn = 9;
            mx = -9;
            for (int t = 7; t >= 0; --t) {
                run += ((b >> t) & 1) ? 1 : -1;
                if (run < mn) mn = run;
                if (run > mx) mx = run;
            }
            smin[b] = static_cast<int8_t>(mn);
            smax[b] = static_cast<int8_t>(mx);
            int p10 = 0, p01 = 0;
            for (int t = 0; t < 7; ++t) {
                int x = (b >> t) & 1, y = (b >> (t + 1)) & 1;
                p10 += (x == 1 && y == 0);
                p01 += (x == 0 && y == 1);
            }
            pat10[b] = static_cast<uint8_t>(p10);
            pat01[b] = static_cast<uint8_t>(p01);
        }
    }
};

const byte_tables& tbl() {
    static const byte_tables t;
    return t;
}

inline uint64_t mask_low(unsigned n) { return n >= 64 ? ~0ull : (1ull << n) - 1; }

inline uint8_t byte_at(bit_view v, uint64_t byte_idx) {
    return static_cast<uint8_t>(v.word(byte_idx / 8) >> ((byte_idx % 8) * 8));
}

}  // namespace

chunk_stats word_stats(uint64_t word, unsigned width) {
    if (width == 0 || width > word_bits)
        throw std::invalid_argument("word_stats: width must be in [1,64]");
    const auto& t = tbl();
    chunk_stats s;
    s.first_bit = word & 1;
    int32_t run = 0;
    bool started = false;
    unsigned done = 0;
    while (done < width) {
        unsigned w = width - done >= 8 ? 8 : width - done;
        uint8_t b = static_cast<uint8_t>(word >> done);
        int32_t bmin, bmax, bmin_cnt, btotal;
        uint32_t bones, b10, b01;
        if (w == 8) {
            btotal = t.total[b];
            bmin = t.pmin[b];
            bmax = t.pmax[b];
            bmin_cnt = t.pmin_cnt[b];
            bones = static_cast<uint32_t>(std::popcount(static_cast<uint64_t>(b)));
            b10 = t.pat10[b];
            b01 = t.pat01[b];
        } else {
            btotal = 0;
            bmin = 9;
            bmax = -9;
            bmin_cnt = 0;
            bones = 0;
            b10 = b01 = 0;
            for (unsigned i = 0; i < w; ++i) {
                int bit = (b >> i) & 1;
                btotal += bit ? 1 : -1;
                bones += bit;
                if (btotal < bmin) {
                    bmin = btotal;
                    bmin_cnt = 1;
                } else if (btotal == bmin) {
                    bmin_cnt++;
                }
                if (btotal > bmax) bmax = btotal;
                if (i + 1 < w) {
                    int nx = (b >> (i + 1)) & 1;
                    b10 += (bit == 1 && nx == 0);
                    b01 += (bit == 0 && nx == 1);
                }
            }
        }
        if (!started) {
            s.total = btotal;
            s.min_prefix = bmin;
            s.max_prefix = bmax;
            s.min_count = bmin_cnt;
            s.ones = bones;
            s.pat10 = b10;
            s.pat01 = b01;
            started = true;
        } else {
            bool prev_last = (word >> (done - 1)) & 1;
            bool cur_first = b & 1;
            s.pat10 += b10 + (prev_last && !cur_first);
            s.pat01 += b01 + (!prev_last && cur_first);
            int32_t m = run + btotal;
            int32_t nmin = run + bmin;
            if (nmin < s.min_prefix) {
                s.min_prefix = nmin;
                s.min_count = bmin_cnt;
            } else if (nmin == s.min_prefix) {
                s.min_count += bmin_cnt;
            }
            if (run + bmax > s.max_prefix) s.max_prefix = run + bmax;
            s.total = m;
            s.ones += bones;
        }
        run = s.total;
        done += w;
    }
    s.last_bit = (word >> (width - 1)) & 1;
    return s;
}

chunk_stats concat(const chunk_stats& a, const chunk_stats& b) {
    chunk_stats s;
    s.total = a.total + b.total;
    s.min_prefix = a.min_prefix;
    s.min_count = a.min_count;
    if (a.total + b.min_prefix < s.min_prefix) {
        s.min_prefix = a.total + b.min_prefix;
        s.min_count = b.min_count;
    } else if (a.total + b.min_prefix == s.min_prefix) {
        s.min_count += b.min_count;
    }
    s.max_prefix = a.max_prefix > a.total + b.max_prefix ? a.max_prefix : a.total + b.max_prefix;
    s.ones = a.ones + b.ones;
    s.pat10 = a.pat10 + b.pat10 + (a.last_bit && !b.first_bit);
    s.pat01 = a.pat01 + b.pat01 + (!a.last_bit && b.first_bit);
    s.first_bit = a.first_bit;
    s.last_bit = b.last_bit;
    return s;
}

std::optional<unsigned> scan_chunk(uint64_t word, unsigned width, scan_dir dir,
                                   int64_t start_excess, int64_t target) {
    if (width == 0 || width > word_bits)
        throw std::invalid_argument("scan_chunk: width must be in [1,64]");
    const auto& t = tbl();
    if (dir == scan_dir::fwd) {
        int64_t run = start_excess;
        unsigned p = 0;
        while (p < width) {
            unsigned w = width - p >= 8 ? 8 : width - p;
            uint8_t b = static_cast<uint8_t>(word >> p);
            if (w == 8 && (target - run < t.pmin[b] || target - run > t.pmax[b])) {
                run += t.total[b];
                p += 8;
                continue;
            }
            for (unsigned i = 0; i < w; ++i) {
                run += ((b >> i) & 1) ? 1 : -1;
                if (run == target) return p + i;
            }
            p += w;
        }
        return std::nullopt;
    }
    int64_t run = start_excess;
    unsigned p = width;
    while (p > 0) {
        unsigned w = p % 8 ? p % 8 : 8;
        unsigned lo = p - w;
        uint8_t b = static_cast<uint8_t>(word >> lo);
        if (w == 8 && (target - run < t.smin[b] || target - run > t.smax[b])) {
            run += t.total[b];
            p = lo;
            continue;
        }
        for (unsigned i = w; i-- > 0;) {
            run += ((b >> i) & 1) ? 1 : -1;
            if (run == target) return lo + i;
        }
        p = lo;
    }
    return std::nullopt;
}

namespace bits {

namespace {

// Walk the bytes covering [from, to]. head/tail partial pieces are handled
// bit by bit, whole bytes through the lookup tables.
template <class WholeByte, class SingleBit>
inline void walk(bit_view v, uint64_t from, uint64_t to, WholeByte&& whole, SingleBit&& single) {
    uint64_t p = from;
    while (p <= to) {
        if (p % 8 == 0 && to - p >= 7) {
            if (!whole(byte_at(v, p / 8), p)) return;
            p += 8;
        } else {
            if (!single(v.get(p), p)) return;
            ++p;
        }
    }
}

}  // namespace

int64_t excess_delta(bit_view v, uint64_t from, uint64_t to) {
    const auto& t = tbl();
    int64_t run = 0;
    walk(
        v, from, to,
        [&](uint8_t b, uint64_t) {
            run += t.total[b];
            return true;
        },
        [&](bool bit, uint64_t) {
            run += bit ? 1 : -1;
            return true;
        });
    return run;
}

std::optional<uint64_t> fwd_find(bit_view v, uint64_t from, uint64_t to,
                                 int64_t start, int64_t target) {
    const auto& t = tbl();
    int64_t run = start;
    std::optional<uint64_t> hit;
    walk(
        v, from, to,
        [&](uint8_t b, uint64_t p) {
            if (target - run < t.pmin[b] || target - run > t.pmax[b]) {
                run += t.total[b];
                return true;
            }
            for (unsigned i = 0; i < 8; ++i) {
                run += ((b >> i) & 1) ? 1 : -1;
                if (run == target) {
                    hit = p + i;
                    return false;
                }
            }
            return true;
        },
        [&](bool bit, uint64_t p) {
            run += bit ? 1 : -1;
            if (run == target) {
                hit = p;
                return false;
            }
            return true;
        });
    return hit;
}

std::optional<uint64_t> bwd_find(bit_view v, uint64_t from, uint64_t to,
                                 int64_t start, int64_t target) {
    const auto& t = tbl();
    int64_t run = start;
    uint64_t p = to + 1;
    while (p > from) {
        if (p % 8 == 0 && p - from >= 8) {
            uint8_t b = byte_at(v, p / 8 - 1);
            if (target - run < t.smin[b] || target - run > t.smax[b]) {
                run += t.total[b];
                p -= 8;
                continue;
            }
            for (unsigned i = 8; i-- > 0;) {
                run += ((b >> i) & 1) ? 1 : -1;
                if (run == target) return p - 8 + i;
            }
            p -= 8;
        } else {
            --p;
            run += v.get(p) ? 1 : -1;
            if (run == target) return p;
        }
    }
    return std::nullopt;
}

extremum range_min(bit_view v, uint64_t from, uint64_t to, int64_t base) {
    const auto& t = tbl();
    int64_t run = base;
    int64_t best = INT64_MAX;
    uint64_t pos = from;
    walk(
        v, from, to,
        [&](uint8_t b, uint64_t p) {
            if (run + t.pmin[b] < best) {
                best = run + t.pmin[b];
                pos = p + t.pmin_pos[b];
            }
            run += t.total[b];
            return true;
        },
        [&](bool bit, uint64_t p) {
            run += bit ? 1 : -1;
            if (run < best) {
                best = run;
                pos = p;
            }
            return true;
        });
    return {best, pos};
}

extremum range_max(bit_view v, uint64_t from, uint64_t to, int64_t base) {
    const auto& t = tbl();
    int64_t run = base;
    int64_t best = INT64_MIN;
    uint64_t pos = from;
    walk(
        v, from, to,
        [&](uint8_t b, uint64_t p) {
            if (run + t.pmax[b] > best) {
                best = run + t.pmax[b];
                pos = p + t.pmax_pos[b];
            }
            run += t.total[b];
            return true;
        },
        [&](bool bit, uint64_t p) {
            run += bit ? 1 : -1;
            if (run > best) {
                best = run;
                pos = p;
            }
            return true;
        });
    return {best, pos};
}

uint64_t count_value(bit_view v, uint64_t from, uint64_t to, int64_t base, int64_t target) {
    const auto& t = tbl();
    int64_t run = base;
    uint64_t cnt = 0;
    walk(
        v, from, to,
        [&](uint8_t b, uint64_t) {
            int64_t d = target - run;
            if (d >= -8 && d <= 8) cnt += t.occ[b][d + 8];
            run += t.total[b];
            return true;
        },
        [&](bool bit, uint64_t) {
            run += bit ? 1 : -1;
            cnt += run == target;
            return true;
        });
    return cnt;
}

std::optional<uint64_t> select_value(bit_view v, uint64_t from, uint64_t to,
                                     int64_t base, int64_t target, uint64_t q) {
    const auto& t = tbl();
    int64_t run = base;
    std::optional<uint64_t> hit;
    walk(
        v, from, to,
        [&](uint8_t b, uint64_t p) {
            int64_t d = target - run;
            uint64_t c = (d >= -8 && d <= 8) ? t.occ[b][d + 8] : 0;
            if (c < q) {
                q -= c;
                run += t.total[b];
                return true;
            }
            for (unsigned i = 0; i < 8; ++i) {
                run += ((b >> i) & 1) ? 1 : -1;
                if (run == target && --q == 0) {
                    hit = p + i;
                    return false;
                }
            }
            return true;
        },
        [&](bool bit, uint64_t p) {
            run += bit ? 1 : -1;
            if (run == target && --q == 0) {
                hit = p;
                return false;
            }
            return true;
        });
    return hit;
}

uint64_t popcount_range(bit_view v, uint64_t from, uint64_t to) {
    uint64_t cnt = 0;
    uint64_t wi = from / word_bits, wlast = to / word_bits;
    for (; wi <= wlast; ++wi) {
        uint64_t w = v.word(wi);
        if (wi == from / word_bits) w &= ~mask_low(from % word_bits);
        if (wi == wlast && to % word_bits != 63) w &= mask_low(to % word_bits + 1);
        cnt += std::popcount(w);
    }
    return cnt;
}

namespace {

std::optional<uint64_t> select_in_masked(bit_view v, uint64_t from, uint64_t to,
                                         uint64_t q, bool ones) {
    uint64_t wi = from / word_bits, wlast = to / word_bits;
    for (; wi <= wlast; ++wi) {
        uint64_t keep = ~0ull;
        if (wi == from / word_bits) keep &= ~mask_low(from % word_bits);
        if (wi == wlast && to % word_bits != 63) keep &= mask_low(to % word_bits + 1);
        uint64_t w = (ones ? v.word(wi) : ~v.word(wi)) & keep;
        uint64_t c = std::popcount(w);
        if (c < q) {
            q -= c;
            continue;
        }
        while (--q > 0) w &= w - 1;
        return wi * word_bits + std::countr_zero(w);
    }
    return std::nullopt;
}

// Word of "10" (or "01") pair-start flags for word index wi.
inline uint64_t pat_word(bit_view v, uint64_t wi, bool ten) {
    uint64_t w = v.word(wi);
    uint64_t nxt = (w >> 1) | (v.word(wi + 1) << 63);
    return ten ? (w & ~nxt) : (~w & nxt);
}

uint64_t count_pat(bit_view v, uint64_t from, uint64_t to, bool ten) {
    uint64_t cnt = 0;
    uint64_t wi = from / word_bits, wlast = to / word_bits;
    for (; wi <= wlast; ++wi) {
        uint64_t w = pat_word(v, wi, ten);
        if (wi == from / word_bits) w &= ~mask_low(from % word_bits);
        if (wi == wlast && to % word_bits != 63) w &= mask_low(to % word_bits + 1);
        cnt += std::popcount(w);
    }
    return cnt;
}

std::optional<uint64_t> select_pat(bit_view v, uint64_t from, uint64_t to,
                                   uint64_t q, bool ten) {
    uint64_t wi = from / word_bits, wlast = to / word_bits;
    for (; wi <= wlast; ++wi) {
        uint64_t w = pat_word(v, wi, ten);
        if (wi == from / word_bits) w &= ~mask_low(from % word_bits);
        if (wi == wlast && to % word_bits != 63) w &= mask_low(to % word_bits + 1);
        uint64_t c = std::popcount(w);
        if (c < q) {
            q -= c;
            continue;
        }
        while (--q > 0) w &= w - 1;
        return wi * word_bits + std::countr_zero(w);
    }
    return std::nullopt;
}

}  // namespace

std::optional<uint64_t> select_one_range(bit_view v, uint64_t from, uint64_t to, uint64_t q) {
    return select_in_masked(v, from, to, q, true);
}

std::optional<uint64_t> select_zero_range(bit_view v, uint64_t from, uint64_t to, uint64_t q) {
    return select_in_masked(v, from, to, q, false);
}

uint64_t count_pat10(bit_view v, uint64_t from, uint64_t to) { return count_pat(v, from, to, true); }
uint64_t count_pat01(bit_view v, uint64_t from, uint64_t to) { return count_pat(v, from, to, false); }

std::optional<uint64_t> select_pat10(bit_view v, uint64_t from, uint64_t to, uint64_t q) {
    return select_pat(v, from, to, q, true);
}

std::optional<uint64_t> select_pat01(bit_view v, uint64_t from, uint64_t to, uint64_t q) {
    return select_pat(v, from, to, q, false);
}

uint64_t read_bits(const uint64_t* w, uint64_t pos, unsigned n) {
    if (n == 0) return 0;
    uint64_t idx = pos / word_bits;
    unsigned off = pos % word_bits;
    uint64_t lo = w[idx] >> off;
    if (off + n > word_bits) lo |= w[idx + 1] << (word_bits - off);
    return lo & mask_low(n);
}

void write_bits(uint64_t* w, uint64_t pos, uint64_t value, unsigned n) {
    if (n == 0) return;
    value &= mask_low(n);
    uint64_t idx = pos / word_bits;
    unsigned off = pos % word_bits;
    w[idx] = (w[idx] & ~(mask_low(n) << off)) | (value << off);
    if (off + n > word_bits) {
        unsigned hi = off + n - word_bits;
        w[idx + 1] = (w[idx + 1] & ~mask_low(hi)) | (value >> (word_bits - off));
    }
}

void insert_bits(std::vector<uint64_t>& w, uint64_t& len, uint64_t pos,
                 uint64_t value, unsigned n) {
    uint64_t new_len = len + n;
    w.resize((new_len + word_bits - 1) / word_bits + 1, 0);
    uint64_t count = len - pos;
    // move [pos, len) up to [pos+n, new_len); high-to-low chunks keep the
    // overlapping regions safe
    uint64_t r = count;
    while (r > 0) {
        unsigned c = r >= word_bits ? word_bits : static_cast<unsigned>(r);
        uint64_t chunk = read_bits(w.data(), pos + r - c, c);
        write_bits(w.data(), pos + n + r - c, chunk, c);
        r -= c;
    }
    write_bits(w.data(), pos, value, n);
    len = new_len;
    w.resize((len + word_bits - 1) / word_bits);
    clear_tail(w, len);
}

void erase_bits(std::vector<uint64_t>& w, uint64_t& len, uint64_t pos, unsigned n) {
    uint64_t count = len - pos - n;
    uint64_t r = 0;
    while (r < count) {
        unsigned c = count - r >= word_bits ? word_bits : static_cast<unsigned>(count - r);
        uint64_t chunk = read_bits(w.data(), pos + n + r, c);
        write_bits(w.data(), pos + r, chunk, c);
        r += c;
    }
    len -= n;
    w.resize((len + word_bits - 1) / word_bits);
    clear_tail(w, len);
}

void clear_tail(std::vector<uint64_t>& w, uint64_t len) {
    uint64_t full = len / word_bits;
    if (full < w.size() && len % word_bits) w[full] &= mask_low(len % word_bits);
    for (uint64_t i = full + (len % word_bits ? 1 : 0); i < w.size(); ++i) w[i] = 0;
}

}  // namespace bits
}  // namespace rmm
