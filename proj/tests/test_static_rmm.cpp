#include <doctest.h>

#include <random>

#include "generate.hpp"
#include "naive.hpp"
#include "rmmtree/static_rmm.hpp"

using namespace rmm;

namespace {

const char* kRef = "(()(()()))";  // E = 1,2,1,2,3,2,3,2,1,0

static_rmm small(const char* s, uint32_t chunk = 64, uint32_t arity = 2) {
    return static_rmm(paren_bitvector::from_string(s), {chunk, arity, static_rmm::summary_width::automatic});
}

// full argument sweep against the naive scans
void check_against_oracle(const static_rmm& t, const paren_bitvector& p) {
    uint64_t n = p.size();
    REQUIRE(t.size() == n);
    for (uint64_t i = 0; i < n; ++i) {
        REQUIRE(t.excess(i) == oracle::excess(p, i));
        REQUIRE(t.rank1(i) == oracle::rank1(p, i));
        REQUIRE(t.rank0(i) == oracle::rank0(p, i));
        REQUIRE(t.rank_p1(i) == oracle::rank_p1(p, i));
        REQUIRE(t.rank_p2(i) == oracle::rank_p2(p, i));
        for (int64_t d = -static_cast<int64_t>(n) - 1; d <= static_cast<int64_t>(n) + 1; ++d) {
            REQUIRE(t.fwd_search(i, d) == oracle::fwd_search(p, i, d));
            REQUIRE(t.bwd_search(i, d) == oracle::bwd_search(p, i, d));
        }
        for (uint64_t j = i; j < n; ++j) {
            auto want = oracle::rmqi(p, i, j);
            auto got = t.rmqi(i, j);
            REQUIRE(got.pos == want.pos);
            REQUIRE(got.value == want.value);
            auto wantM = oracle::rMqi(p, i, j);
            auto gotM = t.rMqi(i, j);
            REQUIRE(gotM.pos == wantM.pos);
            REQUIRE(gotM.value == wantM.value);
            uint64_t mc = oracle::min_count(p, i, j);
            REQUIRE(t.min_count(i, j) == mc);
            for (uint64_t q = 1; q <= mc; ++q)
                REQUIRE(t.min_select(i, j, q) == *oracle::min_select(p, i, j, q));
        }
    }
    for (uint64_t q = 1; q <= t.ones(); ++q) REQUIRE(t.select1(q) == *oracle::select1(p, q));
    for (uint64_t q = 1; q <= n - t.ones(); ++q) REQUIRE(t.select0(q) == *oracle::select0(p, q));
    for (uint64_t q = 1; q <= t.p1_ones(); ++q) REQUIRE(t.select_p1(q) == *oracle::select_p1(p, q));
    for (uint64_t q = 1; q <= t.p2_ones(); ++q) REQUIRE(t.select_p2(q) == *oracle::select_p2(p, q));
}

}  // namespace

TEST_CASE("build roots") {
    auto t = small("()");
    CHECK(t.total_excess() == 0);
    CHECK(t.min_excess() == 0);
    CHECK(t.rMqi(0, 1).value == 1);
    CHECK(t.min_count(0, 1) == 1);

    auto r = small(kRef);
    CHECK(r.total_excess() == 0);
    CHECK(r.min_excess() == 0);
    CHECK(r.rMqi(0, 9).value == 3);
    CHECK(r.min_count(0, 9) == 1);

    auto u = small("((");  // unbalanced input is allowed
    CHECK(u.total_excess() == 2);
    CHECK(u.min_excess() == 1);

    CHECK_THROWS_AS(static_rmm(paren_bitvector{}), std::invalid_argument);
    CHECK_THROWS_AS(static_rmm(paren_bitvector::from_string("()"), {100, 32}),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_rmm(paren_bitvector::from_string("()"), {512, 3}),
                    std::invalid_argument);
}

TEST_CASE("reference sequence primitives") {
    auto t = small(kRef);
    CHECK(t.fwd_search(0, 0) == 9);
    CHECK(t.fwd_search(3, 0) == 8);
    CHECK(t.fwd_search(1, -1) == 2);
    CHECK(t.bwd_search(8, 0) == 3);
    CHECK(t.bwd_search(4, 2) == 3);
    CHECK(t.bwd_search(1, 0) == 0);
    CHECK(t.excess(4) == 3);
    CHECK(t.sum(3, 8) == 0);
    CHECK(t.sum(0, 9) == 0);
    auto r = t.rmqi(1, 8);
    CHECK(r.pos == 2);
    CHECK(r.value == 1);
    auto R = t.rMqi(0, 9);
    CHECK(R.pos == 4);
    CHECK(R.value == 3);
    CHECK(t.rmqi(5, 5).pos == 5);
    CHECK(t.rmqi(5, 5).value == 2);
    CHECK(t.min_count(1, 8) == 2);
    CHECK(t.min_select(1, 8, 1) == 2);
    CHECK(t.min_select(1, 8, 2) == 8);
    CHECK_THROWS_AS(t.min_select(1, 8, 3), std::invalid_argument);
    CHECK(t.rank1(4) == 4);
    CHECK(t.select0(2) == 5);
    CHECK(t.rank_p1(4) == 2);
    CHECK(t.select_p1(3) == 6);
    CHECK(t.select_p2(2) == 5);
    CHECK(t.rank_p1(9) == 3);
    CHECK(t.p1_ones() == 3);
    CHECK(t.p2_ones() == 2);
    CHECK_THROWS_AS(t.excess(10), std::out_of_range);
    CHECK_THROWS_AS(t.sum(4, 3), std::out_of_range);
    CHECK_THROWS_AS(t.select1(6), std::invalid_argument);
}

TEST_CASE("virtual-bitmap lookahead on unbalanced tails") {
    // trailing '(' counts as a P1 one through the virtual closing 0
    auto t = small("()((");
    CHECK(t.p1_ones() == 2);
    CHECK(t.select_p1(2) == 3);
    CHECK(t.rank_p1(3) == 2);
}

TEST_CASE("oracle equivalence across configurations") {
    std::mt19937_64 rng(42);
    static_rmm::config cfgs[] = {
        {64, 2, static_rmm::summary_width::automatic},
        {64, 4, static_rmm::summary_width::automatic},
        {128, 8, static_rmm::summary_width::wide64},
        {512, 32, static_rmm::summary_width::automatic},
    };
    for (int it = 0; it < 24; ++it) {
        uint64_t nodes = 1 + rng() % 180;
        paren_bitvector p =
            it % 2 ? oracle::gen_tree(nodes, rng()) : oracle::gen_forest(nodes, rng());
        const auto& cfg = cfgs[it % 4];
        static_rmm t(p, cfg);
        REQUIRE(!t.audit());
        check_against_oracle(t, p);
    }
}

TEST_CASE("oracle equivalence on unbalanced sequences") {
    std::mt19937_64 rng(43);
    for (int it = 0; it < 12; ++it) {
        uint64_t n = 1 + rng() % 200;
        paren_bitvector p;
        for (uint64_t i = 0; i < n; ++i) p.push_back(rng() & 1);
        static_rmm t(p, {64, 2, static_rmm::summary_width::automatic});
        REQUIRE(!t.audit());
        check_against_oracle(t, p);
    }
}

TEST_CASE("phi/psi identity and search duality") {
    std::mt19937_64 rng(44);
    for (int it = 0; it < 10; ++it) {
        paren_bitvector p = oracle::gen_tree(1 + rng() % 300, rng());
        static_rmm t(p, {64, 4, static_rmm::summary_width::automatic});
        for (uint64_t i = 0; i < p.size(); ++i)
            REQUIRE(t.rank1(i) == static_cast<uint64_t>((i + 1 + t.excess(i)) / 2));
        for (uint64_t i = 0; i < p.size(); ++i) {
            if (!p[i]) continue;
            auto j = t.fwd_search(i, 0);
            REQUIRE(j);
            REQUIRE(t.bwd_search(*j, 0) == i);
        }
    }
}

TEST_CASE("sampled equivalence on larger trees") {
    std::mt19937_64 rng(45);
    paren_bitvector p = oracle::gen_tree(30000, 9001);
    static_rmm t(p);  // default 512/32
    REQUIRE(!t.audit());
    uint64_t n = p.size();
    for (int it = 0; it < 2000; ++it) {
        uint64_t i = rng() % n, j = rng() % n;
        if (i > j) std::swap(i, j);
        REQUIRE(t.excess(j) == oracle::excess(p, j));
        auto want = oracle::rmqi(p, i, j);
        auto got = t.rmqi(i, j);
        REQUIRE(got.pos == want.pos);
        REQUIRE(got.value == want.value);
        int64_t d = static_cast<int64_t>(rng() % 21) - 10;
        REQUIRE(t.fwd_search(i, d) == oracle::fwd_search(p, i, d));
        REQUIRE(t.bwd_search(j, d) == oracle::bwd_search(p, j, d));
        REQUIRE(t.min_count(i, j) == oracle::min_count(p, i, j));
    }
}
