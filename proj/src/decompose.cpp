// Exact output-power decomposition of the receivers.
//
// Every receiver is linear in the transmitted symbols and the noise once the
// channel is fixed. For output (k, p) of symbol i and source user j the
// receiver collapses to an N-sample window over an effective lag response
//     y(n) = sum_l u(l) x_j(iN + n - l),   l = first_lag .. first_lag + Lf - 1,
// followed by the bin-p DFT. The functional this induces on the transmit
// stream is f(t) = N^{-1/2} e^{-j2pi tp/N} sum_{l : 0 <= t+l < N} v(l) with
// v(l) = u(l) e^{-j2pi lp/N}, so every symbol's share of the output power is a
// sum of |partial sums of v|^2. Interior t see the full sum; only the
// Lf - 1 samples at each edge need prefix sums.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nocp/montecarlo.hpp"

namespace nocp {

namespace {

struct LagPowers {
    Complex own{};      // coefficient on d_{j,i}(p)
    double prev = 0.0;  // power from symbol i-1
    double cur = 0.0;   // power from symbol i (all subcarriers)
    double next = 0.0;  // power from symbol i+1
    double reference = 0.0;
};

class PhaseTable {
public:
    explicit PhaseTable(std::size_t n) : n_(static_cast<std::ptrdiff_t>(n)), table_(n) {
        for (std::size_t q = 0; q < n; ++q) {
            table_[q] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n));
        }
    }

    /// e^{-j 2 pi a / N} for any integer a.
    [[nodiscard]] Complex operator()(std::ptrdiff_t a) const {
        std::ptrdiff_t r = a % n_;
        if (r < 0) {
            r += n_;
        }
        return table_[static_cast<std::size_t>(r)];
    }

private:
    std::ptrdiff_t n_;
    ComplexVector table_;
};

class LagPowerKernel {
public:
    LagPowerKernel(std::size_t subcarriers, bool cyclic)
        : n_(static_cast<std::ptrdiff_t>(subcarriers)), cyclic_(cyclic), phase_(subcarriers) {}

    LagPowers operator()(std::span<const Complex> taps, std::ptrdiff_t first_lag, std::size_t p) {
        const auto lf = static_cast<std::ptrdiff_t>(taps.size());
        const std::ptrdiff_t lmin = first_lag;
        const std::ptrdiff_t lmax = first_lag + lf - 1;
        const auto pp = static_cast<std::ptrdiff_t>(p);
        const double nd = static_cast<double>(n_);

        v_.resize(taps.size());
        prefix_.assign(taps.size() + 1, Complex{});
        for (std::ptrdiff_t i = 0; i < lf; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            v_[ui] = taps[ui] * phase_((lmin + i) * pp);
            prefix_[ui + 1] = prefix_[ui] + v_[ui];
        }

        LagPowers out;
        if (cyclic_) {
            out.own = prefix_.back();
            out.cur = std::norm(out.own);
            out.reference = out.cur;
            return out;
        }

        for (std::ptrdiff_t i = 0; i < lf; ++i) {
            out.own += v_[static_cast<std::size_t>(i)] * (nd - std::abs(static_cast<double>(lmin + i)));
        }
        out.own /= nd;

        auto bucket = [&](std::ptrdiff_t t) -> double& {
            if (t < 0) {
                return out.prev;
            }
            return t < n_ ? out.cur : out.next;
        };
        auto add_range = [&](std::ptrdiff_t t_begin, std::ptrdiff_t t_end, double value) {
            // t in [t_begin, t_end], split across the three symbols
            const std::ptrdiff_t bounds[4] = {-n_, 0, n_, 2 * n_};
            for (int s = 0; s < 3; ++s) {
                const std::ptrdiff_t lo = std::max(t_begin, bounds[s]);
                const std::ptrdiff_t hi = std::min(t_end, bounds[s + 1] - 1);
                if (hi >= lo) {
                    bucket(bounds[s]) += static_cast<double>(hi - lo + 1) * value;
                }
            }
        };

        const std::ptrdiff_t full_begin = -lmin;
        const std::ptrdiff_t full_end = n_ - 1 - lmax;
        add_range(full_begin, full_end, std::norm(prefix_.back()) / nd);

        auto edge = [&](std::ptrdiff_t t) {
            const std::ptrdiff_t lo = std::max(lmin, -t);
            const std::ptrdiff_t hi = std::min(lmax, n_ - 1 - t);
            if (hi < lo) {
                return;
            }
            const Complex partial =
                prefix_[static_cast<std::size_t>(hi - lmin + 1)] - prefix_[static_cast<std::size_t>(lo - lmin)];
            bucket(t) += std::norm(partial) / nd;
        };
        for (std::ptrdiff_t t = -lmax; t < full_begin; ++t) {
            edge(t);
        }
        for (std::ptrdiff_t t = full_end + 1; t <= n_ - 1 - lmin; ++t) {
            edge(t);
        }

        // Independent route: E|y_p|^2 for a white unit-variance stream.
        double reference = 0.0;
        for (std::ptrdiff_t a = 0; a < lf; ++a) {
            const Complex va = v_[static_cast<std::size_t>(a)];
            reference += std::norm(va) * nd;
            for (std::ptrdiff_t b = a + 1; b < lf; ++b) {
                const double w = nd - static_cast<double>(b - a);
                reference += 2.0 * w * std::real(va * std::conj(v_[static_cast<std::size_t>(b)]));
            }
        }
        out.reference = reference / nd;
        return out;
    }

    void check_span(std::ptrdiff_t first_lag, std::size_t length) const {
        const std::ptrdiff_t last = first_lag + static_cast<std::ptrdiff_t>(length) - 1;
        if (static_cast<std::ptrdiff_t>(length) > n_ || first_lag <= -n_ || last >= n_) {
            throw std::invalid_argument("effective response does not fit one symbol window");
        }
    }

private:
    std::ptrdiff_t n_;
    bool cyclic_;
    PhaseTable phase_;
    ComplexVector v_;
    ComplexVector prefix_;
};

void accumulate(SubcarrierPowers& out, const LagPowers& lp, bool own_user, double tx_power) {
    if (own_user) {
        const double signal = std::norm(lp.own);
        out.signal = tx_power * signal;
        out.ici = tx_power * std::max(0.0, lp.cur - signal);
        out.isi_prev = tx_power * lp.prev;
        out.isi_next = tx_power * lp.next;
    } else {
        out.mui_prev += tx_power * lp.prev;
        out.mui_cur += tx_power * lp.cur;
        out.mui_next += tx_power * lp.next;
    }
    out.total_reference += tx_power * lp.reference;
}

// R[k][j][a][b] = sum_m conj(h_{k,m}(a)) h_{j,m}(b)
ComplexVector channel_correlation(const ChannelSet& ch) {
    const std::size_t users = ch.users();
    const std::size_t taps = ch.taps();
    ComplexVector r(users * users * taps * taps);
    for (std::size_t m = 0; m < ch.antennas(); ++m) {
        for (std::size_t k = 0; k < users; ++k) {
            const auto hk = ch.cir(k, m);
            for (std::size_t a = 0; a < taps; ++a) {
                const Complex c = std::conj(hk[a]);
                for (std::size_t j = 0; j < users; ++j) {
                    const auto hj = ch.cir(j, m);
                    Complex* row = r.data() + ((k * users + j) * taps + a) * taps;
                    for (std::size_t b = 0; b < taps; ++b) {
                        row[b] += c * hj[b];
                    }
                }
            }
        }
    }
    return r;
}

ResponsePowers conventional_powers(Receiver receiver, const ChannelSet& ch, std::size_t subcarriers,
                                   bool cyclic, double tx_power) {
    const std::size_t users = ch.users();
    const std::size_t taps = ch.taps();
    const ComplexVector corr = channel_correlation(ch);
    const PhaseTable phase(subcarriers);
    LagPowerKernel kernel(subcarriers, cyclic);
    kernel.check_span(0, taps);

    ResponsePowers out(users, subcarriers);
    ComplexVector matched(users * users * taps);  // u^MF[k][j][b]
    ComplexVector combined(users * users * taps);
    ComplexMatrix gram(users, users);
    for (std::size_t p = 0; p < subcarriers; ++p) {
        const auto pp = static_cast<std::ptrdiff_t>(p);
        std::fill(matched.begin(), matched.end(), Complex{});
        for (std::size_t kj = 0; kj < users * users; ++kj) {
            for (std::size_t a = 0; a < taps; ++a) {
                const Complex e = std::conj(phase(static_cast<std::ptrdiff_t>(a) * pp));
                const Complex* row = corr.data() + (kj * taps + a) * taps;
                Complex* dst = matched.data() + kj * taps;
                for (std::size_t b = 0; b < taps; ++b) {
                    dst[b] += e * row[b];
                }
            }
        }
        for (std::size_t k = 0; k < users; ++k) {
            for (std::size_t j = 0; j < users; ++j) {
                Complex g{};
                const Complex* src = matched.data() + (k * users + j) * taps;
                for (std::size_t b = 0; b < taps; ++b) {
                    g += src[b] * phase(static_cast<std::ptrdiff_t>(b) * pp);
                }
                gram(k, j) = g;
            }
        }

        if (receiver == Receiver::mrc) {
            for (std::size_t k = 0; k < users; ++k) {
                const double energy = gram(k, k).real();
                if (!(energy > 0.0)) {
                    throw SingularSystemError(p);
                }
                for (std::size_t jb = 0; jb < users * taps; ++jb) {
                    combined[k * users * taps + jb] = matched[k * users * taps + jb] / energy;
                }
                out.at(k, p).noise_gain = 1.0 / energy;
            }
        } else {
            ComplexMatrix inv;
            try {
                inv = LuFactorization(gram).inverse();
            } catch (const SingularSystemError& e) {
                throw e.with_subcarrier(p);
            }
            std::fill(combined.begin(), combined.end(), Complex{});
            for (std::size_t k = 0; k < users; ++k) {
                for (std::size_t kk = 0; kk < users; ++kk) {
                    const Complex a = inv(k, kk);
                    const Complex* src = matched.data() + kk * users * taps;
                    Complex* dst = combined.data() + k * users * taps;
                    for (std::size_t jb = 0; jb < users * taps; ++jb) {
                        dst[jb] += a * src[jb];
                    }
                }
                out.at(k, p).noise_gain = inv(k, k).real();
            }
        }

        for (std::size_t k = 0; k < users; ++k) {
            for (std::size_t j = 0; j < users; ++j) {
                const std::span<const Complex> u(combined.data() + (k * users + j) * taps, taps);
                accumulate(out.at(k, p), kernel(u, 0, p), j == k, tx_power);
            }
        }
    }
    return out;
}

ResponsePowers time_reversal_powers(Receiver receiver, const ChannelSet& ch, std::size_t subcarriers,
                                    std::size_t tr_delay, double tx_power) {
    const std::size_t users = ch.users();
    const auto g = tr_channels(ch);
    const GtildeStack gstack = build_gtilde_stack(g, users, subcarriers);
    const std::size_t lf = 2 * ch.taps() - 1;
    const auto first_lag = -static_cast<std::ptrdiff_t>(tr_delay);
    LagPowerKernel kernel(subcarriers, false);
    kernel.check_span(first_lag, lf);
    const double noise_scale = 1.0 / std::sqrt(static_cast<double>(ch.antennas()));

    ResponsePowers out(users, subcarriers);
    ComplexVector combined(lf);
    for (std::size_t p = 0; p < subcarriers; ++p) {
        const ComplexMatrix& gp = gstack.at(p);
        ComplexMatrix z(users, users);
        if (receiver == Receiver::tr_zf) {
            try {
                z = LuFactorization(gp).inverse();
            } catch (const SingularSystemError& e) {
                throw e.with_subcarrier(p);
            }
        } else {
            for (std::size_t k = 0; k < users; ++k) {
                if (gp(k, k) == Complex{}) {
                    throw SingularSystemError(p);
                }
                z(k, k) = 1.0 / gp(k, k);
            }
        }
        // Noise after TR filtering has covariance (sigma^2 / sqrt(M)) G~_p across users.
        const ComplexMatrix noise_cov = z * gp * z.adjoint();
        for (std::size_t k = 0; k < users; ++k) {
            auto& cell = out.at(k, p);
            cell.noise_gain = noise_scale * noise_cov(k, k).real();
            for (std::size_t j = 0; j < users; ++j) {
                std::fill(combined.begin(), combined.end(), Complex{});
                for (std::size_t kk = 0; kk < users; ++kk) {
                    const Complex a = z(k, kk);
                    if (a == Complex{}) {
                        continue;
                    }
                    const auto taps = g[kk * users + j].taps();
                    for (std::size_t i = 0; i < lf; ++i) {
                        combined[i] += a * taps[i];
                    }
                }
                accumulate(cell, kernel(combined, first_lag, p), j == k, tx_power);
            }
        }
    }
    return out;
}

}  // namespace

ResponsePowers::ResponsePowers(std::size_t users, std::size_t subcarriers)
    : users_(users), subcarriers_(subcarriers), data_(users * subcarriers) {}

double ResponsePowers::audit_error() const {
    double worst = 0.0;
    for (const auto& cell : data_) {
        const double total = cell.total_reference;
        const double sum = cell.component_sum();
        if (total == 0.0) {
            worst = std::max(worst, sum == 0.0 ? 0.0 : 1.0);
            continue;
        }
        worst = std::max(worst, std::abs(sum - total) / total);
    }
    return worst;
}

ResponsePowers response_powers(Receiver receiver, const ChannelSet& channels, const FrameConfig& frame,
                               std::size_t tr_delay, double tx_power) {
    frame.validate();
    if (channels.taps() > frame.subcarriers) {
        throw std::invalid_argument("channel longer than symbol");
    }
    if (needs_cyclic_prefix(receiver)) {
        if (frame.cp_len + 1 < channels.taps()) {
            throw std::invalid_argument("cp-zf needs cp_len >= L - 1");
        }
    } else if (frame.cp_len != 0) {
        throw std::invalid_argument(std::string(to_string(receiver)) + " operates on CP-less frames");
    }
    if (is_zero_forcing(receiver) && channels.antennas() < channels.users() && !is_time_reversal(receiver)) {
        throw std::invalid_argument("zero forcing needs at least as many antennas as users");
    }
    if (is_time_reversal(receiver)) {
        return time_reversal_powers(receiver, channels, frame.subcarriers, tr_delay, tx_power);
    }
    return conventional_powers(receiver, channels, frame.subcarriers, needs_cyclic_prefix(receiver), tx_power);
}

SinrBreakdown summarize(const ResponsePowers& powers, double noise_var, std::size_t symbols, bool interior_only) {
    if (symbols == 0) {
        throw std::invalid_argument("summarize: frame has no symbols");
    }
    if (interior_only && symbols < 3) {
        throw std::invalid_argument("interior-only statistics need at least 3 symbols per frame");
    }
    struct SymbolKind {
        bool has_prev;
        bool has_next;
        double weight;
    };
    std::vector<SymbolKind> kinds;
    if (interior_only) {
        kinds.push_back({true, true, 1.0});
    } else if (symbols == 1) {
        kinds.push_back({false, false, 1.0});
    } else {
        const double q = static_cast<double>(symbols);
        kinds.push_back({false, true, 1.0 / q});
        kinds.push_back({true, false, 1.0 / q});
        if (symbols > 2) {
            kinds.push_back({true, true, (q - 2.0) / q});
        }
    }

    SinrBreakdown s;
    const double cells = static_cast<double>(powers.users() * powers.subcarriers());
    bool sir_infinite = false;
    for (std::size_t k = 0; k < powers.users(); ++k) {
        for (std::size_t p = 0; p < powers.subcarriers(); ++p) {
            const auto& c = powers.at(k, p);
            const double noise = noise_var * c.noise_gain;
            for (const auto& kind : kinds) {
                const double isi = (kind.has_prev ? c.isi_prev : 0.0) + (kind.has_next ? c.isi_next : 0.0);
                const double mui = c.mui_cur + (kind.has_prev ? c.mui_prev : 0.0) + (kind.has_next ? c.mui_next : 0.0);
                const double dropped = (kind.has_prev ? 0.0 : c.isi_prev + c.mui_prev) +
                                       (kind.has_next ? 0.0 : c.isi_next + c.mui_next);
                const double interference = c.ici + isi + mui;
                const double w = kind.weight / cells;
                s.p_signal += w * c.signal;
                s.p_ici += w * c.ici;
                s.p_isi += w * isi;
                s.p_mui += w * mui;
                s.p_noise += w * noise;
                s.p_total += w * (c.total_reference - dropped + noise);
                s.sinr_linear += w * (c.signal / (interference + noise));
                if (interference > 0.0) {
                    s.sir_linear += w * (c.signal / interference);
                } else if (c.signal > 0.0) {
                    sir_infinite = true;
                }
            }
        }
    }
    if (sir_infinite) {
        s.sir_linear = std::numeric_limits<double>::infinity();
    }
    s.sinr_db = 10.0 * std::log10(s.sinr_linear);
    s.sir_db = 10.0 * std::log10(s.sir_linear);
    s.audit_error = powers.audit_error();
    return s;
}

SinrBreakdown decompose(const SimConfig& cfg, Receiver receiver, const ChannelSet& channels, double noise_var) {
    const FrameConfig frame = cfg.frame(receiver);
    const ResponsePowers powers =
        response_powers(receiver, channels, frame, cfg.effective_tr_delay(), cfg.tx_power);
    return summarize(powers, noise_var, cfg.Q, cfg.interior_only);
}

}  // namespace nocp
