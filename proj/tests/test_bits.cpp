#include <doctest.h>

#include <random>

#include "rmmtree/bits.hpp"

using namespace rmm;

namespace {

// bit-by-bit recomputation of chunk_stats
chunk_stats naive_stats(uint64_t word, unsigned width) {
    chunk_stats s;
    int32_t run = 0;
    s.min_prefix = INT32_MAX;
    s.max_prefix = INT32_MIN;
    for (unsigned t = 0; t < width; ++t) {
        int bit = (word >> t) & 1;
        run += bit ? 1 : -1;
        s.ones += bit;
        if (run < s.min_prefix) {
            s.min_prefix = run;
            s.min_count = 1;
        } else if (run == s.min_prefix) {
            s.min_count++;
        }
        if (run > s.max_prefix) s.max_prefix = run;
        if (t + 1 < width) {
            int nx = (word >> (t + 1)) & 1;
            s.pat10 += bit == 1 && nx == 0;
            s.pat01 += bit == 0 && nx == 1;
        }
    }
    s.total = run;
    s.first_bit = word & 1;
    s.last_bit = (word >> (width - 1)) & 1;
    return s;
}

bool same(const chunk_stats& a, const chunk_stats& b) {
    return a.total == b.total && a.min_prefix == b.min_prefix && a.max_prefix == b.max_prefix &&
           a.min_count == b.min_count && a.ones == b.ones && a.pat10 == b.pat10 &&
           a.pat01 == b.pat01 && a.first_bit == b.first_bit && a.last_bit == b.last_bit;
}

}  // namespace

TEST_CASE("word_stats spec examples") {
    // "11": two opens
    auto s = word_stats(0b11, 2);
    CHECK(s.total == 2);
    CHECK(s.min_prefix == 1);
    CHECK(s.max_prefix == 2);
    CHECK(s.min_count == 1);
    CHECK(s.ones == 2);
    CHECK(s.pat10 == 0);
    CHECK(s.pat01 == 0);

    // "10": bit 0 = 1, bit 1 = 0
    s = word_stats(0b01, 2);
    CHECK(s.total == 0);
    CHECK(s.min_prefix == 0);
    CHECK(s.max_prefix == 1);
    CHECK(s.min_count == 1);
    CHECK(s.pat10 == 1);

    // first seven bits of the reference sequence "(()(()()))", i.e. 1101101;
    // values frozen from the naive prefix scan
    uint64_t w = 0b1011011;
    s = word_stats(w, 7);
    auto n = naive_stats(w, 7);
    CHECK(same(s, n));
    CHECK(s.total == 3);
    CHECK(s.min_prefix == 1);
    CHECK(s.max_prefix == 3);
    CHECK(s.min_count == 2);
}

TEST_CASE("word_stats equals naive recomputation, exhaustive to width 16") {
    for (unsigned width = 1; width <= 16; ++width)
        for (uint64_t word = 0; word < (1ull << width); ++word) {
            auto got = word_stats(word, width);
            auto want = naive_stats(word, width);
            REQUIRE(same(got, want));
        }
}

TEST_CASE("word_stats randomized full-width words") {
    std::mt19937_64 rng(20240811);
    for (int it = 0; it < 20000; ++it) {
        uint64_t word = rng();
        unsigned width = 1 + rng() % 64;
        REQUIRE(same(word_stats(word, width), naive_stats(word, width)));
    }
    CHECK_THROWS_AS(word_stats(0, 0), std::invalid_argument);
}

TEST_CASE("stats decomposition law on random splits") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 20000; ++it) {
        unsigned width = 2 + rng() % 63;
        uint64_t word = rng() & ((width == 64 ? 0 : (1ull << width)) - 1);
        unsigned cut = 1 + rng() % (width - 1);
        auto a = word_stats(word, cut);
        auto b = word_stats(word >> cut, width - cut);
        REQUIRE(same(concat(a, b), word_stats(word, width)));
    }
}

TEST_CASE("scan_chunk spec examples") {
    CHECK(scan_chunk(0b01, 2, scan_dir::fwd, 0, 0) == 1);  // "()" closes at 1
    CHECK(!scan_chunk(0b11, 2, scan_dir::fwd, 0, 0));      // "((" never returns to 0
    // P[0..7] of the reference sequence: 11011010; findclose(3) = 8 lies
    // outside the chunk, so the in-chunk step from offset 3 must fail.
    // Excess before position 3 is 1, so the target value is 1; positions
    // 3..7 never reach it going forward from there.
    uint64_t w = 0b01011011;
    int64_t start = 0;
    for (int t = 0; t < 3; ++t) start += ((w >> t) & 1) ? 1 : -1;
    bool found = false;
    int64_t run = start;
    for (int t = 3; t < 8; ++t) {
        run += ((w >> t) & 1) ? 1 : -1;
        if (run == start) found = true;
    }
    CHECK(!found);
    auto r = scan_chunk(w >> 3, 5, scan_dir::fwd, start, start);
    CHECK(!r);
}

TEST_CASE("scan_chunk equals naive scan, exhaustive 16-bit words") {
    for (uint64_t word = 0; word < (1ull << 16); ++word) {
        for (int64_t d = -17; d <= 17; ++d) {
            // forward
            std::optional<unsigned> want;
            int64_t run = 0;
            for (unsigned t = 0; t < 16; ++t) {
                run += ((word >> t) & 1) ? 1 : -1;
                if (run == d) {
                    want = t;
                    break;
                }
            }
            REQUIRE(scan_chunk(word, 16, scan_dir::fwd, 0, d) == want);
            // backward
            want.reset();
            run = 0;
            for (unsigned t = 16; t-- > 0;) {
                run += ((word >> t) & 1) ? 1 : -1;
                if (run == d) {
                    want = t;
                    break;
                }
            }
            REQUIRE(scan_chunk(word, 16, scan_dir::bwd, 0, d) == want);
        }
    }
}

TEST_CASE("packed buffer editing") {
    std::mt19937_64 rng(99);
    std::vector<bool> ref;
    std::vector<uint64_t> buf;
    uint64_t len = 0;
    for (int it = 0; it < 4000; ++it) {
        if (ref.empty() || rng() % 3) {
            uint64_t pos = rng() % (ref.size() + 1);
            bool b = rng() & 1;
            ref.insert(ref.begin() + pos, b);
            bits::insert_bits(buf, len, pos, b ? 1 : 0, 1);
        } else {
            uint64_t pos = rng() % ref.size();
            ref.erase(ref.begin() + pos);
            bits::erase_bits(buf, len, pos, 1);
        }
        REQUIRE(len == ref.size());
        for (uint64_t t = 0; t < len; ++t)
            REQUIRE(((buf[t / 64] >> (t % 64)) & 1) == static_cast<uint64_t>(ref[t]));
        if (len % 64) REQUIRE((buf.back() >> (len % 64)) == 0);
    }
}

TEST_CASE("range helpers against bit loops") {
    std::mt19937_64 rng(123);
    for (int it = 0; it < 300; ++it) {
        uint64_t n = 1 + rng() % 300;
        std::vector<uint64_t> words((n + 63) / 64, 0);
        for (uint64_t t = 0; t < n; ++t)
            if (rng() & 1) words[t / 64] |= 1ull << (t % 64);
        bit_view v{words.data(), n};
        uint64_t i = rng() % n, j = rng() % n;
        if (i > j) std::swap(i, j);

        int64_t run = 0, mn = INT64_MAX, mx = INT64_MIN;
        uint64_t mnpos = i, mxpos = i, pc = 0, p10 = 0, p01 = 0;
        for (uint64_t t = i; t <= j; ++t) {
            run += v.get(t) ? 1 : -1;
            if (run < mn) {
                mn = run;
                mnpos = t;
            }
            if (run > mx) {
                mx = run;
                mxpos = t;
            }
            pc += v.get(t);
            bool nx = t + 1 < n ? v.get(t + 1) : false;
            p10 += v.get(t) && !nx;
            p01 += !v.get(t) && nx;
        }
        CHECK(bits::excess_delta(v, i, j) == run);
        auto rmin = bits::range_min(v, i, j, 0);
        CHECK(rmin.value == mn);
        CHECK(rmin.pos == mnpos);
        auto rmax = bits::range_max(v, i, j, 0);
        CHECK(rmax.value == mx);
        CHECK(rmax.pos == mxpos);
        CHECK(bits::popcount_range(v, i, j) == pc);
        CHECK(bits::count_pat10(v, i, j) == p10);
        CHECK(bits::count_pat01(v, i, j) == p01);
        CHECK(bits::count_value(v, i, j, 0, mn) >= 1);
        CHECK(bits::select_value(v, i, j, 0, mn, 1) == mnpos);
        if (pc) {
            uint64_t q = 1 + rng() % pc;
            uint64_t seen = 0, want = 0;
            for (uint64_t t = i; t <= j; ++t)
                if (v.get(t) && ++seen == q) want = t;
            CHECK(bits::select_one_range(v, i, j, q) == want);
        }
        if (p10) {
            uint64_t q = 1 + rng() % p10, seen = 0, want = 0;
            for (uint64_t t = i; t <= j; ++t) {
                bool nx = t + 1 < n ? v.get(t + 1) : false;
                if (v.get(t) && !nx && ++seen == q) want = t;
            }
            CHECK(bits::select_pat10(v, i, j, q) == want);
        }
    }
}
