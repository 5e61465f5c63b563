#include <doctest.h>

#include <cmath>

#include "nocp/rng.hpp"

using nocp::Rng;

TEST_CASE("same seed and stream give the same sequence") {
    Rng a(42, 3);
    Rng b(42, 3);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("derived streams differ from each other and from the parent") {
    const Rng root(42);
    Rng parent(42);
    Rng c1 = root.derive(1);
    Rng c2 = root.derive(2);
    const auto p = parent.next_u64();
    const auto x1 = c1.next_u64();
    const auto x2 = c2.next_u64();
    CHECK(p != x1);
    CHECK(x1 != x2);
    Rng again = root.derive(1);
    CHECK(again.next_u64() == x1);
}

TEST_CASE("complex_normal has the requested variance split evenly") {
    Rng rng(5);
    const int n = 200000;
    double re2 = 0.0;
    double im2 = 0.0;
    double mean_re = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.complex_normal(2.0);
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
        mean_re += z.real();
    }
    // 5 sigma bounds for the sample moments
    CHECK(std::abs(re2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(im2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(mean_re / n) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform_index stays in range and rejects n = 0") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.uniform_index(7) < 7);
    }
    CHECK_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}
