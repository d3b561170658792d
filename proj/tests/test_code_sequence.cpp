#include <doctest.h>

#include <random>

#include "rmmtree/code_sequence.hpp"
#include "rmmtree/codecs.hpp"

using namespace rmm;

TEST_CASE("codec round trips") {
    gamma_codec g;
    delta_codec d;
    fixed_codec f(11);
    uint64_t enc[2];
    for (uint64_t v = 0; v < 4096; ++v) {
        unsigned len = g.encode(v, enc);
        std::vector<uint64_t> buf{enc[0], enc[1]};
        auto [w, l] = g.decode({buf.data(), 128}, 0);
        REQUIRE(w == v);
        REQUIRE(l == len);
        len = d.encode(v, enc);
        buf = {enc[0], enc[1]};
        auto [w2, l2] = d.decode({buf.data(), 128}, 0);
        REQUIRE(w2 == v);
        REQUIRE(l2 == len);
        if (v < (1ull << 11)) {
            len = f.encode(v, enc);
            buf = {enc[0], enc[1]};
            auto [w3, l3] = f.decode({buf.data(), 128}, 0);
            REQUIRE(w3 == v);
            REQUIRE(l3 == len);
        }
    }
    std::mt19937_64 rng(3);
    for (int it = 0; it < 20000; ++it) {
        uint64_t v = rng() >> (rng() % 40 + 33);  // keep gamma in range
        unsigned len = g.encode(v, enc);
        std::vector<uint64_t> buf{enc[0], enc[1]};
        REQUIRE(g.decode({buf.data(), 128}, 0) == std::pair<uint64_t, unsigned>{v, len});
        len = d.encode(v, enc);
        buf = {enc[0], enc[1]};
        REQUIRE(d.decode({buf.data(), 128}, 0) == std::pair<uint64_t, unsigned>{v, len});
    }
    CHECK_THROWS_AS(g.encode(1ull << 40, enc), std::invalid_argument);
    CHECK_THROWS_AS(f.encode(1ull << 12, enc), std::invalid_argument);
    CHECK_THROWS_AS(fixed_codec(0), std::invalid_argument);
}

TEST_CASE("sequence examples") {
    code_sequence<fixed_codec> s(fixed_codec(4), 64);
    uint64_t init[] = {3, 1, 4, 1, 5};
    for (uint64_t v : init) s.insert(s.count() + 1, v);
    CHECK(s.count() == 5);
    CHECK(s.access(2, 4) == std::vector<uint64_t>{1, 4, 1});
    s.update(2, 9);
    CHECK(s.access(2, 2) == std::vector<uint64_t>{9});
    s.update(2, 1);
    s.insert(1, 7);
    CHECK(s.access(1, 6) == std::vector<uint64_t>{7, 3, 1, 4, 1, 5});
    s.erase(1);

    CHECK(s.sum(0) == 0);
    CHECK(s.sum(3) == 8);
    CHECK(s.search(8) == 3);
    CHECK(s.search(7) == 2);
    CHECK(s.search(0) == 0);
    CHECK(s.search(100) == 5);
    CHECK_THROWS_AS(s.get(0), std::out_of_range);
    CHECK_THROWS_AS(s.get(6), std::out_of_range);
    CHECK_THROWS_AS(s.insert(1, 99), std::invalid_argument);  // oversize for 4 bits
    CHECK(!s.audit());
}

namespace {

template <class Codec>
void interleaving_vs_prefix_oracle(Codec codec, uint32_t leaf_bits, int steps, uint64_t maxval,
                                   uint64_t seed) {
    code_sequence<Codec> s(codec, leaf_bits);
    std::vector<uint64_t> ref;
    std::mt19937_64 rng(seed);
    for (int it = 0; it < steps; ++it) {
        int op = static_cast<int>(rng() % 6);
        if (ref.empty() || op == 0) {
            uint64_t pos = rng() % (ref.size() + 1);
            uint64_t v = rng() % maxval;
            s.insert(pos + 1, v);
            ref.insert(ref.begin() + pos, v);
        } else if (op == 1) {
            uint64_t pos = rng() % ref.size();
            s.erase(pos + 1);
            ref.erase(ref.begin() + pos);
        } else if (op == 2) {
            uint64_t pos = rng() % ref.size();
            uint64_t v = rng() % maxval;
            s.update(pos + 1, v);
            ref[pos] = v;
        } else if (op == 3) {
            uint64_t i = rng() % ref.size(), j = rng() % ref.size();
            if (i > j) std::swap(i, j);
            auto got = s.access(i + 1, j + 1);
            REQUIRE(got.size() == j - i + 1);
            for (uint64_t t = 0; t <= j - i; ++t) REQUIRE(got[t] == ref[i + t]);
        } else if (op == 4) {
            uint64_t i = rng() % (ref.size() + 1);
            uint64_t want = 0;
            for (uint64_t t = 0; t < i; ++t) want += ref[t];
            REQUIRE(s.sum(i) == want);
        } else {
            uint64_t total = 0;
            for (uint64_t v : ref) total += v;
            uint64_t q = rng() % (total + 2);
            uint64_t acc = 0, want = 0;
            for (uint64_t t = 0; t < ref.size(); ++t) {
                if (acc + ref[t] > q) break;
                acc += ref[t];
                want = t + 1;
            }
            uint64_t got = s.search(q);
            REQUIRE(got == want);
            // sandwich law
            REQUIRE(s.sum(got) <= q);
            if (got < s.count()) REQUIRE(q < s.sum(got + 1));
        }
        if (it % 500 == 0) REQUIRE(!s.audit());
    }
    REQUIRE(!s.audit());
}

}  // namespace

TEST_CASE("randomized interleaving matches the prefix-array oracle") {
    interleaving_vs_prefix_oracle(gamma_codec{}, 512, 4000, 1 << 16, 101);
    interleaving_vs_prefix_oracle(delta_codec{}, 256, 3000, 1 << 16, 102);
    interleaving_vs_prefix_oracle(fixed_codec(16), 256, 3000, 1 << 16, 103);
}

TEST_CASE("space report") {
    code_sequence<gamma_codec> s(gamma_codec{}, 2048);
    uint64_t payload = 0;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5000; ++i) {
        uint64_t v = rng() % 1000;
        payload += gamma_codec::length_of(v);
        s.insert(s.count() + 1, v);
    }
    auto sp = s.space();
    CHECK(sp.payload_bits == payload);
    CHECK(sp.structure_bytes * 8 > payload);
}
