#include "nocp/equalizers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nocp {

namespace {

Complex unit_phase(double turns) { return std::polar(1.0, -2.0 * std::numbers::pi * turns); }

void require_demod_shape(const ComplexMatrix& demod, const FreqResponseSet& fr) {
    if (demod.rows() != fr.antennas() || demod.cols() != fr.subcarriers()) {
        throw std::invalid_argument("demodulator output is " + std::to_string(demod.rows()) + "x" +
                                    std::to_string(demod.cols()) + ", expected " +
                                    std::to_string(fr.antennas()) + "x" + std::to_string(fr.subcarriers()));
    }
}

}  // namespace

std::string_view to_string(Receiver r) {
    switch (r) {
        case Receiver::mrc:
            return "mrc";
        case Receiver::zf:
            return "zf";
        case Receiver::tr_mrc:
            return "tr-mrc";
        case Receiver::tr_zf:
            return "tr-zf";
        case Receiver::cp_zf:
            return "cp-zf";
    }
    return "?";
}

Receiver parse_receiver(std::string_view name) {
    for (Receiver r : {Receiver::mrc, Receiver::zf, Receiver::tr_mrc, Receiver::tr_zf, Receiver::cp_zf}) {
        if (name == to_string(r)) {
            return r;
        }
    }
    throw std::invalid_argument("unknown receiver '" + std::string(name) + "' (expected mrc|zf|tr-mrc|tr-zf|cp-zf)");
}

FreqResponseSet::FreqResponseSet(std::size_t users, std::size_t antennas, std::size_t subcarriers)
    : users_(users), antennas_(antennas), subcarriers_(subcarriers), data_(users * antennas * subcarriers) {}

std::span<const Complex> FreqResponseSet::response(std::size_t k, std::size_t m) const {
    return {data_.data() + (k * antennas_ + m) * subcarriers_, subcarriers_};
}

std::span<Complex> FreqResponseSet::response(std::size_t k, std::size_t m) {
    return {data_.data() + (k * antennas_ + m) * subcarriers_, subcarriers_};
}

FreqResponseSet freq_responses(const ChannelSet& channels, std::size_t subcarriers) {
    if (channels.taps() > subcarriers) {
        throw std::invalid_argument("channel longer than symbol");
    }
    FreqResponseSet fr(channels.users(), channels.antennas(), subcarriers);
    const double scale = std::sqrt(static_cast<double>(subcarriers));
    ComplexVector padded(subcarriers);
    for (std::size_t k = 0; k < channels.users(); ++k) {
        for (std::size_t m = 0; m < channels.antennas(); ++m) {
            const auto h = channels.cir(k, m);
            std::fill(padded.begin(), padded.end(), Complex{});
            std::copy(h.begin(), h.end(), padded.begin());
            const ComplexVector spectrum = dft(padded);
            auto out = fr.response(k, m);
            for (std::size_t p = 0; p < subcarriers; ++p) {
                out[p] = spectrum[p] * scale;
            }
        }
    }
    return fr;
}

ComplexVector mrc_combine(const ComplexMatrix& demod, const FreqResponseSet& fr, std::size_t k) {
    require_demod_shape(demod, fr);
    if (k >= fr.users()) {
        throw std::out_of_range("mrc_combine: user index out of range");
    }
    const std::size_t n = fr.subcarriers();
    ComplexVector out(n);
    for (std::size_t p = 0; p < n; ++p) {
        Complex acc{};
        double energy = 0.0;
        for (std::size_t m = 0; m < fr.antennas(); ++m) {
            const Complex gamma = fr(k, m, p);
            acc += std::conj(gamma) * demod(m, p);
            energy += std::norm(gamma);
        }
        if (energy == 0.0) {
            throw std::runtime_error("dead subcarrier " + std::to_string(p));
        }
        out[p] = acc / energy;
    }
    return out;
}

ComplexMatrix zf_combine_freq(const ComplexMatrix& demod, const FreqResponseSet& fr) {
    require_demod_shape(demod, fr);
    const std::size_t users = fr.users();
    const std::size_t antennas = fr.antennas();
    if (antennas < users) {
        throw std::invalid_argument("zero forcing needs at least as many antennas as users");
    }
    const std::size_t n = fr.subcarriers();
    ComplexMatrix out(users, n);
    ComplexMatrix gram(users, users);
    ComplexVector matched(users);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t a = 0; a < users; ++a) {
            Complex mf{};
            for (std::size_t m = 0; m < antennas; ++m) {
                mf += std::conj(fr(a, m, p)) * demod(m, p);
            }
            matched[a] = mf;
            for (std::size_t b = 0; b < users; ++b) {
                Complex g{};
                for (std::size_t m = 0; m < antennas; ++m) {
                    g += std::conj(fr(a, m, p)) * fr(b, m, p);
                }
                gram(a, b) = g;
            }
        }
        ComplexVector x;
        try {
            x = solve_linear(gram, matched);
        } catch (const SingularSystemError& e) {
            throw e.with_subcarrier(p);
        }
        for (std::size_t a = 0; a < users; ++a) {
            out(a, p) = x[a];
        }
    }
    return out;
}

ComplexVector tr_mrc(std::span<const ComplexVector> received, const ChannelSet& channels, std::size_t k) {
    if (received.size() != channels.antennas()) {
        throw std::invalid_argument("tr_mrc: expected one received vector per antenna");
    }
    if (k >= channels.users()) {
        throw std::out_of_range("tr_mrc: user index out of range");
    }
    const std::size_t taps = channels.taps();
    const std::size_t len = received.front().size();
    ComplexVector out(len + taps - 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(channels.antennas()));
    ComplexVector reversed(taps);
    for (std::size_t m = 0; m < channels.antennas(); ++m) {
        if (received[m].size() != len) {
            throw std::invalid_argument("tr_mrc: received vectors have different lengths");
        }
        const auto h = channels.cir(k, m);
        for (std::size_t l = 0; l < taps; ++l) {
            reversed[l] = std::conj(h[taps - 1 - l]) * scale;
        }
        const auto& r = received[m];
        for (std::size_t l = 0; l < taps; ++l) {
            const Complex c = reversed[l];
            for (std::size_t n = 0; n < len; ++n) {
                out[n + l] += c * r[n];
            }
        }
    }
    return out;
}

TrChannel::TrChannel(std::size_t k, std::size_t j, std::size_t cir_taps, ComplexVector taps)
    : k_(k), j_(j), cir_taps_(cir_taps), taps_(std::move(taps)) {
    if (cir_taps_ == 0 || taps_.size() != 2 * cir_taps_ - 1) {
        throw std::invalid_argument("time-reversal channel needs 2L-1 taps");
    }
}

Complex TrChannel::at(std::ptrdiff_t lag) const {
    if (lag < first_lag() || lag > last_lag()) {
        return {};
    }
    return taps_[static_cast<std::size_t>(lag - first_lag())];
}

TrChannel tr_channel(const ChannelSet& channels, std::size_t k, std::size_t j) {
    if (k >= channels.users() || j >= channels.users()) {
        throw std::out_of_range("tr_channel: user index out of range");
    }
    const std::size_t taps = channels.taps();
    ComplexVector g(2 * taps - 1);
    ComplexVector reversed(taps);
    for (std::size_t m = 0; m < channels.antennas(); ++m) {
        const auto hk = channels.cir(k, m);
        for (std::size_t l = 0; l < taps; ++l) {
            reversed[l] = std::conj(hk[taps - 1 - l]);
        }
        const ComplexVector part = linear_convolve(channels.cir(j, m), reversed);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] += part[i];
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(channels.antennas()));
    for (auto& v : g) {
        v *= scale;
    }
    return TrChannel(k, j, taps, std::move(g));
}

std::vector<TrChannel> tr_channels(const ChannelSet& channels) {
    std::vector<TrChannel> all;
    all.reserve(channels.users() * channels.users());
    for (std::size_t k = 0; k < channels.users(); ++k) {
        for (std::size_t j = 0; j < channels.users(); ++j) {
            all.push_back(tr_channel(channels, k, j));
        }
    }
    return all;
}

ComplexVector gtilde_diag(const TrChannel& g, std::size_t subcarriers) {
    if (2 * g.cir_taps() - 1 > subcarriers) {
        throw std::invalid_argument("time-reversal channel longer than symbol");
    }
    const double n = static_cast<double>(subcarriers);
    ComplexVector out(subcarriers);
    for (std::size_t p = 0; p < subcarriers; ++p) {
        Complex acc{};
        for (std::ptrdiff_t lag = g.first_lag(); lag <= g.last_lag(); ++lag) {
            const double weight = (n - std::abs(static_cast<double>(lag))) / n;
            const auto turns = static_cast<double>((lag * static_cast<std::ptrdiff_t>(p)) %
                                                   static_cast<std::ptrdiff_t>(subcarriers)) / n;
            acc += g.at(lag) * unit_phase(turns) * weight;
        }
        out[p] = acc;
    }
    return out;
}

WindowMatrices build_G_matrices(const TrChannel& g, std::size_t subcarriers) {
    if (2 * g.cir_taps() - 1 > subcarriers) {
        throw std::invalid_argument("time-reversal channel longer than symbol");
    }
    return window_matrices(g.taps(), g.first_lag(), subcarriers);
}

GtildeStack::GtildeStack(std::size_t users, std::size_t subcarriers)
    : users_(users), per_subcarrier_(subcarriers, ComplexMatrix(users, users)) {}

GtildeStack build_gtilde_stack(std::span<const TrChannel> g, std::size_t users, std::size_t subcarriers) {
    if (g.size() != users * users) {
        throw std::invalid_argument("build_gtilde_stack: expected K*K time-reversal channels");
    }
    GtildeStack stack(users, subcarriers);
    for (const auto& gkj : g) {
        const ComplexVector diag = gtilde_diag(gkj, subcarriers);
        for (std::size_t p = 0; p < subcarriers; ++p) {
            stack.at(p)(gkj.user(), gkj.source()) = diag[p];
        }
    }
    return stack;
}

GtildeStack build_gtilde_stack(const ChannelSet& channels, std::size_t subcarriers) {
    const auto g = tr_channels(channels);
    return build_gtilde_stack(g, channels.users(), subcarriers);
}

ComplexMatrix tr_zf_detect(const ComplexMatrix& tr_demod, const GtildeStack& gstack) {
    if (tr_demod.rows() != gstack.users() || tr_demod.cols() != gstack.subcarriers()) {
        throw std::invalid_argument("tr_zf_detect: input does not match the G~ stack dimensions");
    }
    const std::size_t users = gstack.users();
    ComplexMatrix out(users, gstack.subcarriers());
    ComplexVector column(users);
    for (std::size_t p = 0; p < gstack.subcarriers(); ++p) {
        for (std::size_t k = 0; k < users; ++k) {
            column[k] = tr_demod(k, p);
        }
        ComplexVector x;
        try {
            x = solve_linear(gstack.at(p), column);
        } catch (const SingularSystemError& e) {
            throw e.with_subcarrier(p);
        }
        for (std::size_t k = 0; k < users; ++k) {
            out(k, p) = x[k];
        }
    }
    return out;
}

std::vector<DataGrid> detect_frame(Receiver receiver, std::span<const ComplexVector> received,
                                   const ChannelSet& channels, const FrameConfig& cfg,
                                   std::optional<std::size_t> tr_delay) {
    cfg.validate();
    const std::size_t users = channels.users();
    const std::size_t antennas = channels.antennas();
    const std::size_t n = cfg.subcarriers;
    if (received.size() != antennas) {
        throw std::invalid_argument("detect_frame: expected one received vector per antenna");
    }
    if (needs_cyclic_prefix(receiver) && cfg.cp_len + 1 < channels.taps()) {
        throw std::invalid_argument("cp-zf needs cp_len >= L - 1");
    }
    if (is_time_reversal(receiver) && cfg.cp_len != 0) {
        throw std::invalid_argument("time-reversal receivers operate on CP-less frames");
    }
    std::vector<DataGrid> out(users, DataGrid(cfg.symbols, n));

    if (!is_time_reversal(receiver)) {
        const FreqResponseSet fr = freq_responses(channels, n);
        ComplexMatrix demod(antennas, n);
        for (std::size_t i = 0; i < cfg.symbols; ++i) {
            for (std::size_t m = 0; m < antennas; ++m) {
                const ComplexVector bins = demodulate_window(received[m], i, cfg, 0);
                std::copy(bins.begin(), bins.end(), demod.row(m).begin());
            }
            if (receiver == Receiver::mrc) {
                for (std::size_t k = 0; k < users; ++k) {
                    const ComplexVector est = mrc_combine(demod, fr, k);
                    std::copy(est.begin(), est.end(), out[k].row(i).begin());
                }
            } else {
                const ComplexMatrix est = zf_combine_freq(demod, fr);
                for (std::size_t k = 0; k < users; ++k) {
                    std::copy(est.row(k).begin(), est.row(k).end(), out[k].row(i).begin());
                }
            }
        }
        return out;
    }

    const std::size_t delay = tr_delay.value_or(channels.taps() - 1);
    const auto g = tr_channels(channels);
    const GtildeStack gstack = build_gtilde_stack(g, users, n);
    std::vector<ComplexVector> tr_out;
    tr_out.reserve(users);
    for (std::size_t k = 0; k < users; ++k) {
        tr_out.push_back(tr_mrc(received, channels, k));
    }
    ComplexMatrix tr_demod(users, n);
    for (std::size_t i = 0; i < cfg.symbols; ++i) {
        for (std::size_t k = 0; k < users; ++k) {
            const ComplexVector bins = demodulate_window(tr_out[k], i, cfg, delay);
            std::copy(bins.begin(), bins.end(), tr_demod.row(k).begin());
        }
        if (receiver == Receiver::tr_zf) {
            const ComplexMatrix est = tr_zf_detect(tr_demod, gstack);
            for (std::size_t k = 0; k < users; ++k) {
                std::copy(est.row(k).begin(), est.row(k).end(), out[k].row(i).begin());
            }
        } else {
            for (std::size_t k = 0; k < users; ++k) {
                for (std::size_t p = 0; p < n; ++p) {
                    out[k](i, p) = tr_demod(k, p) / gstack.at(p)(k, k);
                }
            }
        }
    }
    return out;
}

}  // namespace nocp
