#include "nocp/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nocp/analysis.hpp"
#include "nocp/montecarlo.hpp"

namespace nocp {

namespace {

CheckResult finish(std::string name, double measured, double tolerance, std::string detail = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.measured = measured;
    r.tolerance = tolerance;
    r.passed = std::isfinite(measured) && measured <= tolerance;
    r.detail = std::move(detail);
    return r;
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform_index(hi - lo + 1));
}

ComplexVector random_vector(std::size_t n, Rng& rng) {
    ComplexVector v(n);
    for (auto& x : v) {
        x = rng.complex_normal(1.0);
    }
    return v;
}

DataGrid random_grid(std::size_t symbols, std::size_t n, Rng& rng) {
    DataGrid g(symbols, n);
    for (std::size_t i = 0; i < symbols; ++i) {
        for (auto& x : g.row(i)) {
            x = rng.complex_normal(1.0);
        }
    }
    return g;
}

PowerDelayProfile random_pdp(std::size_t taps, Rng& rng) {
    std::vector<double> w(taps);
    for (auto& x : w) {
        x = 0.05 + std::abs(rng.standard_normal());
    }
    return PowerDelayProfile::normalized(std::move(w));
}

}  // namespace

CheckResult check_matrix_model(const ValidationOptions& opt) {
    Rng rng = Rng(opt.seed).derive(1);
    double worst = 0.0;
    for (std::size_t c = 0; c < opt.cases; ++c) {
        const std::size_t n = pick(rng, 2, 64);
        const std::size_t taps = pick(rng, 1, n);
        const std::size_t symbols = pick(rng, 2, 4);
        const ComplexVector h = random_vector(taps, rng);
        const ComplexVector x = random_vector(symbols * n, rng);
        const ComplexVector r = linear_convolve(x, h);
        const IsiIciMatrices mats = build_isi_ici_matrices(h, n);
        for (std::size_t i = 1; i < symbols; ++i) {
            const std::span<const Complex> prev(x.data() + (i - 1) * n, n);
            const std::span<const Complex> cur(x.data() + i * n, n);
            const ComplexVector a = mats.isi * prev;
            const ComplexVector b = mats.ici * cur;
            for (std::size_t t = 0; t < n; ++t) {
                worst = std::max(worst, std::abs(a[t] + b[t] - r[i * n + t]));
            }
        }
    }
    return finish("matrix model vs convolution", worst, 1e-10);
}

CheckResult check_gtilde_diag(const ValidationOptions& opt) {
    Rng rng = Rng(opt.seed).derive(2);
    double worst = 0.0;
    for (std::size_t c = 0; c < opt.cases; ++c) {
        const std::size_t taps = pick(rng, 1, 6);
        const std::size_t n = pick(rng, 2 * taps, 32);
        const std::size_t users = pick(rng, 1, 3);
        const std::size_t antennas = pick(rng, 1, 4);
        const ChannelSet ch = sample_channels(random_pdp(taps, rng), users, antennas, rng);
        ComplexMatrix f(n, n);
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t t = 0; t < n; ++t) {
                const double turns = static_cast<double>((p * t) % n) / static_cast<double>(n);
                f(p, t) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), -2.0 * std::numbers::pi * turns);
            }
        }
        const TrChannel g = tr_channel(ch, pick(rng, 0, users - 1), pick(rng, 0, users - 1));
        const ComplexMatrix dense = f * build_G_matrices(g, n).current * f.adjoint();
        const ComplexVector diag = gtilde_diag(g, n);
        for (std::size_t p = 0; p < n; ++p) {
            worst = std::max(worst, std::abs(dense(p, p) - diag[p]));
        }
    }
    return finish("gtilde_diag vs F G F^H", worst, 1e-10);
}

CheckResult check_decomposition_audit(const ValidationOptions& opt) {
    Rng rng = Rng(opt.seed).derive(3);
    double worst = 0.0;
    const Receiver all[] = {Receiver::mrc, Receiver::zf, Receiver::tr_mrc, Receiver::tr_zf, Receiver::cp_zf};
    for (std::size_t c = 0; c < opt.cases; ++c) {
        const std::size_t taps = pick(rng, 1, 8);
        const std::size_t n = pick(rng, 2 * taps, 64);
        const std::size_t users = pick(rng, 1, 4);
        const std::size_t antennas = pick(rng, users, 3 * users);
        const ChannelSet ch = sample_channels(random_pdp(taps, rng), users, antennas, rng);
        for (Receiver rx : all) {
            FrameConfig frame{n, 4, needs_cyclic_prefix(rx) ? taps - 1 : 0};
            try {
                worst = std::max(worst, response_powers(rx, ch, frame, taps - 1).audit_error());
            } catch (const SingularSystemError&) {
            }
        }
    }
    return finish("decomposition sums to total", worst, 1e-6);
}

CheckResult check_cp_recovery(const ValidationOptions& opt) {
    Rng rng = Rng(opt.seed).derive(4);
    double worst = 0.0;
    for (std::size_t c = 0; c < opt.cases; ++c) {
        const std::size_t taps = pick(rng, 1, 8);
        const std::size_t n = pick(rng, taps, 64);
        const std::size_t users = pick(rng, 1, 4);
        const std::size_t antennas = pick(rng, users + 1, 4 * users);
        const FrameConfig frame{n, pick(rng, 1, 3), pick(rng, taps - 1, n - 1)};
        const ChannelSet ch = sample_channels(random_pdp(taps, rng), users, antennas, rng);
        std::vector<DataGrid> grids;
        std::vector<ComplexVector> tx;
        for (std::size_t k = 0; k < users; ++k) {
            grids.push_back(random_grid(frame.symbols, n, rng));
            tx.push_back(modulate(grids.back(), frame));
        }
        const auto received = apply_uplink(ch, tx, 0.0, rng);
        try {
            const auto est = detect_frame(Receiver::cp_zf, received, ch, frame);
            for (std::size_t k = 0; k < users; ++k) {
                for (std::size_t i = 0; i < frame.symbols; ++i) {
                    for (std::size_t p = 0; p < n; ++p) {
                        worst = std::max(worst, std::abs(est[k](i, p) - grids[k](i, p)));
                    }
                }
            }
        } catch (const SingularSystemError&) {
        }
    }
    return finish("cp-zf noiseless recovery", worst, 1e-8);
}

CheckResult check_crosstalk_decay(const ValidationOptions& opt) {
    Rng rng = Rng(opt.seed).derive(5);
    const PowerDelayProfile pdp = exp_pdp(15, 0.1);
    const std::size_t antenna_counts[] = {16, 32, 64, 128, 256};
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t m : antenna_counts) {
        double cross = 0.0;
        double main = 0.0;
        for (std::size_t t = 0; t < std::max<std::size_t>(opt.cases, 10); ++t) {
            const ChannelSet ch = sample_channels(pdp, 2, m, rng);
            const TrChannel own = tr_channel(ch, 0, 0);
            const TrChannel other = tr_channel(ch, 0, 1);
            main += std::norm(own.at(0));
            cross += squared_norm(other.taps());
        }
        x.push_back(std::log2(static_cast<double>(m)));
        y.push_back(std::log2(cross / main));
    }
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - xm) * (y[i] - ym);
        sxx += (x[i] - xm) * (x[i] - xm);
    }
    const double slope = sxy / sxx;
    std::ostringstream detail;
    detail << "log-log slope " << slope << ", expected -1";
    return finish("cross-talk decays as 1/M", std::abs(slope + 1.0), 0.3, detail.str());
}

CheckResult check_closed_form_sir(const ValidationOptions& opt) {
    SimConfig cfg;
    cfg.K = 1;
    cfg.receivers = {Receiver::mrc};
    const std::size_t antennas = 1024;
    const double expected = asymptotic_sir(cfg.pdp(), cfg.N).sir_db;
    Rng base(opt.seed);
    double sir = 0.0;
    const std::size_t trials = std::max<std::size_t>(opt.cases, 10);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = base.derive(6).derive(t);
        const ChannelSet ch = sample_channels(cfg.pdp(), 1, antennas, rng);
        sir += decompose(cfg, Receiver::mrc, ch, 0.0).sir_linear;
    }
    const double measured = 10.0 * std::log10(sir / static_cast<double>(trials));
    std::ostringstream detail;
    detail << "monte carlo " << measured << " dB vs closed form " << expected << " dB";
    return finish("closed-form SIR vs monte carlo", std::abs(measured - expected), 0.5, detail.str());
}

std::vector<CheckResult> run_validation_suite(const ValidationOptions& opt) {
    return {check_matrix_model(opt),     check_gtilde_diag(opt),      check_decomposition_audit(opt),
            check_cp_recovery(opt),      check_crosstalk_decay(opt),  check_closed_form_sir(opt)};
}

void print_results(const std::vector<CheckResult>& results, std::ostream& out) {
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " measured=" << r.measured << " tolerance=" << r.tolerance;
        if (!r.detail.empty()) {
            out << " (" << r.detail << ")";
        }
        out << '\n';
    }
}

}  // namespace nocp
