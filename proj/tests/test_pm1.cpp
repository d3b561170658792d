#include <doctest.h>

#include <random>

#include "rmmtree/pm1_rmq.hpp"

using namespace rmm;

TEST_CASE("pm1 spec examples") {
    std::vector<int64_t> vals = {1, 2, 1, 2, 3, 2, 3, 2, 1, 0};
    auto a = pm1_array::from_values(vals, {64, 2, static_rmm::summary_width::automatic});
    CHECK(a.rmm().bits().to_string() == "(()(()()))");
    CHECK(a.value_at(4) == 3);
    CHECK(a.rmq(1, 8) == 2);
    CHECK(a.rMq(0, 9) == 4);
    CHECK(a.rmq(5, 5) == 5);
    for (size_t i = 0; i < vals.size(); ++i) CHECK(a.value_at(i) == vals[i]);

    std::vector<int64_t> bad = {0, 2};
    CHECK_THROWS_AS(pm1_array::from_values(bad), std::invalid_argument);
    CHECK_THROWS_AS(pm1_array::from_values({}), std::invalid_argument);
    CHECK_THROWS_AS(a.rmq(3, 2), std::out_of_range);
}

TEST_CASE("arbitrary base offsets round trip") {
    std::vector<int64_t> vals = {-40, -41, -42, -41, -40, -39};
    auto a = pm1_array::from_values(vals);
    for (size_t i = 0; i < vals.size(); ++i) CHECK(a.value_at(i) == vals[i]);
    CHECK(a.rmq(0, 5) == 2);
    CHECK(a.rMq(0, 5) == 5);

    auto d = pm1_array::from_deltas(paren_bitvector::from_string("(()(()()))"));
    CHECK(d.value_at(4) == 3);
    CHECK(d.base() == 0);
}

TEST_CASE("random walks match the naive scan") {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 6; ++it) {
        uint64_t n = 2000 + rng() % 3000;
        std::vector<int64_t> vals(n);
        vals[0] = static_cast<int64_t>(rng() % 100) - 50;
        for (uint64_t i = 1; i < n; ++i) vals[i] = vals[i - 1] + (rng() & 1 ? 1 : -1);
        auto a = pm1_array::from_values(vals);
        for (int q = 0; q < 800; ++q) {
            uint64_t i = rng() % n, j = rng() % n;
            if (i > j) std::swap(i, j);
            uint64_t mnp = i, mxp = i;
            for (uint64_t t = i; t <= j; ++t) {
                if (vals[t] < vals[mnp]) mnp = t;
                if (vals[t] > vals[mxp]) mxp = t;
            }
            REQUIRE(a.rmq(i, j) == mnp);
            REQUIRE(a.rMq(i, j) == mxp);
        }
    }
}
