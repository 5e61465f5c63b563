#include <doctest.h>

#include "../oracles.hpp"
#include "nocp/ofdm.hpp"

using namespace nocp;

namespace {

DataGrid random_grid(std::size_t q, std::size_t n, Rng& rng) {
    DataGrid g(q, n);
    for (std::size_t i = 0; i < q; ++i) {
        for (auto& v : g.row(i)) {
            v = rng.complex_normal(1.0);
        }
    }
    return g;
}

}  // namespace

TEST_CASE("CP-less modulation concatenates per-symbol IDFTs") {
    Rng rng(1);
    const FrameConfig cfg{16, 3, 0};
    const DataGrid g = random_grid(3, 16, rng);
    const ComplexVector x = modulate(g, cfg);
    REQUIRE(x.size() == 48);
    for (std::size_t i = 0; i < 3; ++i) {
        const ComplexVector d(g.row(i).begin(), g.row(i).end());
        const ComplexVector sym(x.begin() + static_cast<long>(16 * i), x.begin() + static_cast<long>(16 * (i + 1)));
        CHECK(oracle::max_abs_diff(oracle::direct_dft(sym), d) < 1e-12);
    }
}

TEST_CASE("cyclic prefix copies the symbol tail") {
    Rng rng(2);
    const FrameConfig cfg{8, 2, 3};
    const ComplexVector x = modulate(random_grid(2, 8, rng), cfg);
    REQUIRE(x.size() == 22);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t start = i * 11;
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(x[start + c] == x[start + 8 + c]);
        }
    }
}

TEST_CASE("demodulate_window inverts modulate with and without CP") {
    Rng rng(3);
    for (std::size_t cp : {0U, 4U}) {
        const FrameConfig cfg{32, 4, cp};
        const DataGrid g = random_grid(4, 32, rng);
        ComplexVector x = modulate(g, cfg);
        x.insert(x.begin(), 5, Complex{});
        for (std::size_t i = 0; i < 4; ++i) {
            const ComplexVector d(g.row(i).begin(), g.row(i).end());
            CHECK(oracle::max_abs_diff(demodulate_window(x, i, cfg, 5), d) < 1e-12);
        }
    }
}

TEST_CASE("frame arithmetic and validation") {
    const FrameConfig cfg{256, 10, 14};
    CHECK(cfg.symbol_period() == 270);
    CHECK(cfg.frame_length() == 2700);
    CHECK_THROWS_AS((FrameConfig{1, 1, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FrameConfig{8, 0, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FrameConfig{8, 1, 8}).validate(), std::invalid_argument);
}

TEST_CASE("a window past the end of the signal is out of range") {
    const FrameConfig cfg{8, 2, 0};
    const ComplexVector x(16);
    CHECK_NOTHROW(demodulate_window(x, 1, cfg, 0));
    CHECK_THROWS_AS(demodulate_window(x, 1, cfg, 1), std::out_of_range);
}
