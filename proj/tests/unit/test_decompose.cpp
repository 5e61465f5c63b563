#include <doctest.h>

#include "../oracles.hpp"
#include "nocp/analysis.hpp"
#include "nocp/montecarlo.hpp"

using namespace nocp;

namespace {

const Receiver kAll[] = {Receiver::mrc, Receiver::zf, Receiver::tr_mrc, Receiver::tr_zf, Receiver::cp_zf};

FrameConfig small_frame(Receiver rx, std::size_t taps) {
    return FrameConfig{16, 4, needs_cyclic_prefix(rx) ? taps - 1 : 0};
}

void check_against_impulses(const ResponsePowers& fast, const std::vector<oracle::ImpulseCell>& slow) {
    for (std::size_t k = 0; k < fast.users(); ++k) {
        for (std::size_t p = 0; p < fast.subcarriers(); ++p) {
            const SubcarrierPowers& a = fast.at(k, p);
            const oracle::ImpulseCell& b = slow[k * fast.subcarriers() + p];
            const double scale = 1e-9 * (b.signal + b.ici + b.isi_prev + b.isi_next + b.mui_prev + b.mui_cur +
                                         b.mui_next);
            CHECK(b.far < 1e-20);
            CHECK(std::abs(a.signal - b.signal) <= scale);
            CHECK(std::abs(a.ici - b.ici) <= scale);
            CHECK(std::abs(a.isi_prev - b.isi_prev) <= scale);
            CHECK(std::abs(a.isi_next - b.isi_next) <= scale);
            CHECK(std::abs(a.mui_prev - b.mui_prev) <= scale);
            CHECK(std::abs(a.mui_cur - b.mui_cur) <= scale);
            CHECK(std::abs(a.mui_next - b.mui_next) <= scale);
            CHECK(a.noise_gain == doctest::Approx(b.noise_gain).epsilon(1e-9));
        }
    }
}

double impulse_sinr(const std::vector<oracle::ImpulseCell>& cells, double noise_var) {
    double acc = 0.0;
    for (const auto& c : cells) {
        const double interference = c.ici + c.isi_prev + c.isi_next + c.mui_prev + c.mui_cur + c.mui_next;
        acc += c.signal / (interference + noise_var * c.noise_gain);
    }
    return acc / static_cast<double>(cells.size());
}

}  // namespace

TEST_CASE("every component matches impulse-by-impulse measurement through the receive chain") {
    Rng rng(31);
    const std::size_t taps = 4;
    const ChannelSet ch = sample_channels(exp_pdp(taps, 0.3), 2, 3, rng);
    for (Receiver rx : kAll) {
        CAPTURE(to_string(rx));
        const FrameConfig frame = small_frame(rx, taps);
        const ResponsePowers fast = response_powers(rx, ch, frame, taps - 1);
        check_against_impulses(fast, oracle::impulse_powers(rx, ch, frame, 1));
        CHECK(fast.audit_error() < 1e-12);
    }
}

TEST_CASE("time-reversal window delays other than L-1 are decomposed exactly") {
    Rng rng(32);
    const std::size_t taps = 4;
    const ChannelSet ch = sample_channels(exp_pdp(taps, 0.3), 2, 3, rng);
    for (std::size_t delay : {0U, 2U, 6U}) {
        CAPTURE(delay);
        const FrameConfig frame{16, 4, 0};
        const ResponsePowers fast = response_powers(Receiver::tr_zf, ch, frame, delay);
        check_against_impulses(fast, oracle::impulse_powers(Receiver::tr_zf, ch, frame, 2, delay));
    }
}

TEST_CASE("summarize matches per-symbol impulse SINR, interior and whole frame") {
    Rng rng(33);
    const std::size_t taps = 5;
    const ChannelSet ch = sample_channels(exp_pdp(taps, 0.2), 2, 4, rng);
    const FrameConfig frame{16, 4, 0};
    const double noise_var = 0.05;
    for (Receiver rx : {Receiver::mrc, Receiver::tr_zf}) {
        CAPTURE(to_string(rx));
        const ResponsePowers fast = response_powers(rx, ch, frame, taps - 1);
        std::vector<double> per_symbol;
        for (std::size_t i = 0; i < frame.symbols; ++i) {
            per_symbol.push_back(impulse_sinr(oracle::impulse_powers(rx, ch, frame, i), noise_var));
        }
        CHECK(summarize(fast, noise_var, 4, true).sinr_linear == doctest::Approx(per_symbol[1]).epsilon(1e-9));
        CHECK(per_symbol[1] == doctest::Approx(per_symbol[2]).epsilon(1e-9));
        const double whole = (per_symbol[0] + per_symbol[1] + per_symbol[2] + per_symbol[3]) / 4.0;
        CHECK(summarize(fast, noise_var, 4, false).sinr_linear == doctest::Approx(whole).epsilon(1e-9));
    }
}

TEST_CASE("components sum to the independent total over random shapes") {
    Rng rng(34);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t taps = 1 + rng.uniform_index(10);
        const std::size_t n = 2 * taps + rng.uniform_index(40);
        const std::size_t users = 1 + rng.uniform_index(4);
        const ChannelSet ch = sample_channels(exp_pdp(taps, 0.1), users, users + rng.uniform_index(8), rng);
        for (Receiver rx : kAll) {
            const FrameConfig frame{n, 5, needs_cyclic_prefix(rx) ? taps - 1 : 0};
            try {
                const ResponsePowers powers = response_powers(rx, ch, frame, taps - 1);
                CHECK(powers.audit_error() < 1e-6);
                const SinrBreakdown s = summarize(powers, 0.1, 5, true);
                const double sum = s.p_signal + s.p_ici + s.p_isi + s.p_mui + s.p_noise;
                CHECK(std::abs(sum - s.p_total) <= 1e-6 * s.p_total);
            } catch (const SingularSystemError&) {
            }
        }
    }
}

TEST_CASE("flat channel without CP has no ICI or ISI") {
    SimConfig cfg;
    cfg.N = 64;
    cfg.L = 1;
    cfg.K = 1;
    Rng rng(35);
    const ChannelSet ch = sample_channels(cfg.pdp(), 1, 8, rng);
    const SinrBreakdown s = decompose(cfg, Receiver::mrc, ch, 0.0);
    CHECK(s.p_signal > 0.0);
    CHECK(s.p_ici < 1e-15);
    CHECK(s.p_isi < 1e-15);
}

TEST_CASE("cp-zf with cp_len = L-1 is interference free") {
    SimConfig cfg;
    cfg.N = 64;
    cfg.K = 3;
    Rng rng(36);
    const ChannelSet ch = sample_channels(cfg.pdp(), 3, 12, rng);
    const SinrBreakdown s = decompose(cfg, Receiver::cp_zf, ch, 0.0);
    CHECK(s.p_signal == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.p_ici < 1e-12 * s.p_signal);
    CHECK(s.p_isi < 1e-12 * s.p_signal);
    CHECK(s.p_mui < 1e-12 * s.p_signal);
}

TEST_CASE("zero transmit power leaves only noise") {
    SimConfig cfg;
    cfg.N = 32;
    cfg.K = 2;
    cfg.tx_power = 0.0;
    Rng rng(37);
    const ChannelSet ch = sample_channels(cfg.pdp(), 2, 6, rng);
    for (Receiver rx : kAll) {
        const SinrBreakdown s = decompose(cfg, rx, ch, 0.1);
        CHECK(s.p_signal == 0.0);
        CHECK(s.p_ici == 0.0);
        CHECK(s.p_isi == 0.0);
        CHECK(s.p_mui == 0.0);
        CHECK(s.p_noise > 0.0);
    }
}

TEST_CASE("single-user MRC ICI and ISI at large M approach the closed form") {
    SimConfig cfg;
    cfg.K = 1;
    const SirTerms terms = asymptotic_sir(cfg.pdp(), cfg.N);
    double ici = 0.0;
    double isi = 0.0;
    double signal = 0.0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng(38).derive(static_cast<std::uint64_t>(t));
        const SinrBreakdown s = decompose(cfg, Receiver::mrc, sample_channels(cfg.pdp(), 1, 2048, rng), 0.0);
        ici += s.p_ici / trials;
        isi += s.p_isi / trials;
        signal += s.p_signal / trials;
    }
    CHECK(ici == doctest::Approx(terms.total_ici()).epsilon(0.10));
    CHECK(isi == doctest::Approx(terms.total_isi()).epsilon(0.10));
    CHECK(signal == doctest::Approx(terms.p_signal).epsilon(0.01));
}

TEST_CASE("two equal taps on two subcarriers saturate at SIR 3") {
    SimConfig cfg;
    cfg.N = 2;
    cfg.L = 2;
    cfg.alpha = 0.0;
    cfg.K = 1;
    double sir = 0.0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng(39).derive(static_cast<std::uint64_t>(t));
        sir += decompose(cfg, Receiver::mrc, sample_channels(cfg.pdp(), 1, 4096, rng), 0.0).sir_linear / trials;
    }
    CHECK(sir == doctest::Approx(3.0).epsilon(0.02));
    CHECK(asymptotic_sir(cfg.pdp(), 2).sir_linear == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("summarize rejects frames too short for interior statistics") {
    const ResponsePowers powers(1, 4);
    CHECK_THROWS_AS(summarize(powers, 0.1, 2, true), std::invalid_argument);
    CHECK_NOTHROW(summarize(powers, 0.1, 2, false));
}

TEST_CASE("response_powers checks the frame layout") {
    Rng rng(39);
    const ChannelSet ch = sample_channels(exp_pdp(4, 0.1), 1, 2, rng);
    CHECK_THROWS_AS(response_powers(Receiver::cp_zf, ch, FrameConfig{16, 3, 2}, 3), std::invalid_argument);
    CHECK_THROWS_AS(response_powers(Receiver::mrc, ch, FrameConfig{16, 3, 3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(response_powers(Receiver::tr_zf, ch, FrameConfig{4, 3, 0}, 3), std::invalid_argument);
}
