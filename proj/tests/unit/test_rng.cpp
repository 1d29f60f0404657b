#include <doctest.h>

#include <cmath>
#include <set>

#include "fbw/rng.hpp"

using namespace fbw;

TEST_CASE("equal seeds give equal sequences") {
    RngStream a(123);
    RngStream b(123);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    RngStream c(124);
    RngStream d(123);
    CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("first outputs are pinned") {
    // xoshiro256** seeded through splitmix64; these values fix the algorithm.
    std::uint64_t sm = 0;
    CHECK(splitmix64(sm) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(sm) == 0x6e789e6aa1b965f4ULL);
    RngStream rng(0);
    const std::uint64_t first = rng.next_u64();
    RngStream again(0);
    CHECK(again.next_u64() == first);
}

TEST_CASE("uniform draws stay in [0, 1) and indices in range") {
    RngStream rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto k = rng.uniform_index(7);
        REQUIRE(k < 7);
        seen.insert(k);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("standard normal mean over 1e6 draws is within 4/sqrt(N)") {
    RngStream rng(77);
    const int n = 1'000'000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) <= 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(s2 / n - 1.0) <= 0.01);
}

TEST_CASE("derived streams are independent of parent consumption") {
    RngStream parent(9);
    const RngStream child_before = parent.derive(3);
    parent.next_u64();
    RngStream child_after = parent.derive(3);
    RngStream copy = child_before;
    CHECK(copy.next_u64() == child_after.next_u64());
    RngStream other = parent.derive(4);
    RngStream again = parent.derive(3);
    CHECK(other.next_u64() != again.next_u64());
}
