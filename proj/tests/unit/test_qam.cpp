#include <doctest.h>

#include <cmath>

#include "nocp/qam.hpp"
#include "nocp/rng.hpp"

using namespace nocp;

namespace {

std::vector<std::uint8_t> bits_of(unsigned value, std::size_t count) {
    std::vector<std::uint8_t> out(count);
    for (std::size_t b = 0; b < count; ++b) {
        out[b] = static_cast<std::uint8_t>((value >> (count - 1 - b)) & 1U);
    }
    return out;
}

}  // namespace

TEST_CASE("all-zero 16-QAM bits map to a corner with power 1.8") {
    const auto s = qam_map(std::vector<std::uint8_t>(4, 0), Constellation::qam16);
    REQUIRE(s.size() == 1);
    CHECK(std::norm(s[0]) == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(s[0].real() == doctest::Approx(-3.0 / std::sqrt(10.0)));
}

TEST_CASE("average symbol energy is exactly one") {
    for (auto c : {Constellation::qpsk, Constellation::qam16}) {
        const std::size_t bps = bits_per_symbol(c);
        double energy = 0.0;
        const unsigned points = 1U << bps;
        for (unsigned v = 0; v < points; ++v) {
            energy += std::norm(qam_map(bits_of(v, bps), c)[0]);
        }
        CHECK(energy / points == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("noiseless round trip of 10^4 random bits") {
    Rng rng(8);
    std::vector<std::uint8_t> bits(10000);
    for (auto& b : bits) {
        b = static_cast<std::uint8_t>(rng.next_u64() & 1U);
    }
    for (auto c : {Constellation::qpsk, Constellation::qam16}) {
        CHECK(qam_demap(qam_map(bits, c), c) == bits);
    }
}

TEST_CASE("Gray mapping: nearest neighbours differ in exactly one bit") {
    const double step = 2.0 / std::sqrt(10.0);
    for (unsigned a = 0; a < 16; ++a) {
        const auto sa = qam_map(bits_of(a, 4), Constellation::qam16)[0];
        for (unsigned b = 0; b < 16; ++b) {
            const auto sb = qam_map(bits_of(b, 4), Constellation::qam16)[0];
            if (std::abs(std::abs(sa - sb) - step) < 1e-12) {
                CHECK(__builtin_popcount(a ^ b) == 1);
            }
        }
    }
}

TEST_CASE("bit counts must be a multiple of bits per symbol") {
    CHECK_THROWS_AS(qam_map(std::vector<std::uint8_t>(3, 0), Constellation::qam16), std::invalid_argument);
    CHECK_THROWS_AS(qam_map(std::vector<std::uint8_t>(3, 0), Constellation::qpsk), std::invalid_argument);
}

TEST_CASE("hard decisions pick the nearest point") {
    const Complex near_corner(-0.9, 0.95);
    const auto bits = qam_demap(std::vector<Complex>{near_corner}, Constellation::qam16);
    const auto back = qam_map(bits, Constellation::qam16)[0];
    CHECK(back.real() == doctest::Approx(-3.0 / std::sqrt(10.0)));
    CHECK(back.imag() == doctest::Approx(3.0 / std::sqrt(10.0)));
}

TEST_CASE("constellation names parse") {
    CHECK(parse_constellation("qam16") == Constellation::qam16);
    CHECK(parse_constellation("16qam") == Constellation::qam16);
    CHECK(parse_constellation("qpsk") == Constellation::qpsk);
    CHECK_THROWS(parse_constellation("64qam"));
}
