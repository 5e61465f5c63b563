#include <doctest.h>

#include "../oracles.hpp"
#include "nocp/numerics.hpp"
#include "nocp/rng.hpp"

using namespace nocp;

namespace {

ComplexVector random_vector(std::size_t n, Rng& rng) {
    ComplexVector v(n);
    for (auto& x : v) {
        x = rng.complex_normal(1.0);
    }
    return v;
}

}  // namespace

TEST_CASE("dft matches direct summation for power-of-two and other lengths") {
    Rng rng(11);
    for (std::size_t n : {1, 2, 3, 5, 8, 12, 16, 31, 64, 100, 256}) {
        const ComplexVector x = random_vector(n, rng);
        CHECK(oracle::max_abs_diff(dft(x), oracle::direct_dft(x)) < 1e-10);
    }
}

TEST_CASE("idft inverts dft and both are unitary") {
    Rng rng(12);
    for (std::size_t n : {4, 7, 64, 256}) {
        const ComplexVector x = random_vector(n, rng);
        const ComplexVector f = dft(x);
        CHECK(oracle::max_abs_diff(idft(f), x) < 1e-12);
        CHECK(squared_norm(f) == doctest::Approx(squared_norm(x)).epsilon(1e-12));
    }
}

TEST_CASE("dft of a unit impulse is flat") {
    ComplexVector x(16);
    x[0] = 1.0;
    for (const auto& v : dft(x)) {
        CHECK(std::abs(v - Complex(0.25, 0.0)) < 1e-15);
    }
}

TEST_CASE("dft rejects an empty vector") { CHECK_THROWS_AS(dft(ComplexVector{}), std::invalid_argument); }

TEST_CASE("linear_convolve matches the double loop") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexVector a = random_vector(1 + rng.uniform_index(40), rng);
        const ComplexVector b = random_vector(1 + rng.uniform_index(15), rng);
        const ComplexVector c = linear_convolve(a, b);
        REQUIRE(c.size() == a.size() + b.size() - 1);
        CHECK(oracle::max_abs_diff(c, oracle::direct_convolve(a, b)) < 1e-12);
    }
}

TEST_CASE("LU solve leaves a small residual") {
    Rng rng(14);
    for (std::size_t n : {1, 2, 5, 10}) {
        ComplexMatrix a(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) = rng.complex_normal(1.0);
            }
        }
        const ComplexVector b = random_vector(n, rng);
        const ComplexVector x = solve_linear(a, b);
        CHECK(oracle::max_abs_diff(a * x, b) < 1e-10);

        const ComplexMatrix prod = a * LuFactorization(a).inverse();
        const ComplexMatrix eye = ComplexMatrix::identity(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                CHECK(std::abs(prod(r, c) - eye(r, c)) < 1e-10);
            }
        }
    }
}

TEST_CASE("rank-deficient systems raise SingularSystemError") {
    ComplexMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    CHECK_THROWS_AS(LuFactorization{a}, SingularSystemError);

    const SingularSystemError e = SingularSystemError().with_subcarrier(17);
    REQUIRE(e.subcarrier().has_value());
    CHECK(*e.subcarrier() == 17);
    CHECK(std::string(e.what()).find("17") != std::string::npos);
}

TEST_CASE("adjoint conjugates and transposes") {
    ComplexMatrix a(2, 3);
    a(0, 2) = Complex(1.0, 2.0);
    const ComplexMatrix h = a.adjoint();
    CHECK(h.rows() == 3);
    CHECK(h.cols() == 2);
    CHECK(h(2, 0) == Complex(1.0, -2.0));
}

TEST_CASE("is_power_of_two") {
    CHECK(is_power_of_two(1));
    CHECK(is_power_of_two(256));
    CHECK_FALSE(is_power_of_two(0));
    CHECK_FALSE(is_power_of_two(100));
}
