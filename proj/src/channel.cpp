#include "nocp/channel.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nocp {

PowerDelayProfile::PowerDelayProfile(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) {
        throw std::invalid_argument("power delay profile needs at least one tap");
    }
    double sum = 0.0;
    for (double t : taps_) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("power delay profile taps must be finite and nonnegative");
        }
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("power delay profile is not normalized (sum = " + std::to_string(sum) + ")");
    }
}

PowerDelayProfile PowerDelayProfile::normalized(std::vector<double> taps) {
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    if (!(sum > 0.0)) {
        throw std::invalid_argument("power delay profile has zero total power");
    }
    for (auto& t : taps) {
        t /= sum;
    }
    return PowerDelayProfile(std::move(taps));
}

PowerDelayProfile exp_pdp(std::size_t taps, double alpha) {
    if (taps == 0) {
        throw std::invalid_argument("exp_pdp: L must be at least 1");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("exp_pdp: alpha must be nonnegative");
    }
    std::vector<double> rho(taps);
    for (std::size_t l = 0; l < taps; ++l) {
        rho[l] = std::exp(-alpha * static_cast<double>(l));
    }
    return PowerDelayProfile::normalized(std::move(rho));
}

PowerDelayProfile load_pdp_file(const std::filesystem::path& path, std::ostream& warnings) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open PDP file " + path.string());
    }
    std::vector<double> taps;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ss(line);
        double v = 0.0;
        if (!(ss >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": not a number");
        }
        std::string rest;
        if (ss >> rest) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected one value per line");
        }
        taps.push_back(v);
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    if (!taps.empty() && std::abs(sum - 1.0) > 1e-6) {
        warnings << "warning: PDP in " << path.string() << " sums to " << sum << "; normalizing\n";
    }
    return PowerDelayProfile::normalized(std::move(taps));
}

ChannelSet::ChannelSet(std::size_t users, std::size_t antennas, std::size_t taps)
    : users_(users), antennas_(antennas), taps_(taps), data_(users * antennas * taps) {
    if (users == 0 || antennas == 0 || taps == 0) {
        throw std::invalid_argument("channel set dimensions must be positive");
    }
}

std::span<const Complex> ChannelSet::cir(std::size_t k, std::size_t m) const {
    return {data_.data() + (k * antennas_ + m) * taps_, taps_};
}

std::span<Complex> ChannelSet::cir(std::size_t k, std::size_t m) {
    return {data_.data() + (k * antennas_ + m) * taps_, taps_};
}

ChannelSet sample_channels(const PowerDelayProfile& pdp, std::size_t users, std::size_t antennas, Rng& rng) {
    ChannelSet set(users, antennas, pdp.length());
    for (std::size_t k = 0; k < users; ++k) {
        for (std::size_t m = 0; m < antennas; ++m) {
            auto h = set.cir(k, m);
            for (std::size_t l = 0; l < h.size(); ++l) {
                h[l] = rng.complex_normal(pdp[l]);
            }
        }
    }
    return set;
}

ComplexVector awgn(std::size_t length, double noise_var, Rng& rng) {
    if (length == 0) {
        throw std::invalid_argument("awgn: length must be at least 1");
    }
    if (!(noise_var >= 0.0)) {
        throw std::invalid_argument("awgn: negative noise variance");
    }
    ComplexVector out(length);
    if (noise_var == 0.0) {
        return out;
    }
    for (auto& v : out) {
        v = rng.complex_normal(noise_var);
    }
    return out;
}

std::vector<ComplexVector> apply_uplink(const ChannelSet& channels, std::span<const ComplexVector> tx,
                                        double noise_var, Rng& rng) {
    if (tx.size() != channels.users()) {
        throw std::invalid_argument("apply_uplink: expected one transmit vector per user");
    }
    const std::size_t len = tx.front().size();
    if (len == 0) {
        throw std::invalid_argument("apply_uplink: empty transmit vector");
    }
    for (const auto& x : tx) {
        if (x.size() != len) {
            throw std::invalid_argument("apply_uplink: transmit vectors have different lengths");
        }
    }
    const std::size_t taps = channels.taps();
    const std::size_t out_len = len + taps - 1;
    std::vector<ComplexVector> rx;
    rx.reserve(channels.antennas());
    for (std::size_t m = 0; m < channels.antennas(); ++m) {
        ComplexVector r = awgn(out_len, noise_var, rng);
        for (std::size_t k = 0; k < channels.users(); ++k) {
            const auto h = channels.cir(k, m);
            const auto& x = tx[k];
            for (std::size_t l = 0; l < taps; ++l) {
                const Complex hl = h[l];
                for (std::size_t n = 0; n < len; ++n) {
                    r[n + l] += hl * x[n];
                }
            }
        }
        rx.push_back(std::move(r));
    }
    return rx;
}

WindowMatrices window_matrices(std::span<const Complex> taps, std::ptrdiff_t first_lag, std::size_t n) {
    const auto nn = static_cast<std::ptrdiff_t>(n);
    const auto last_lag = first_lag + static_cast<std::ptrdiff_t>(taps.size()) - 1;
    if (taps.empty() || -first_lag >= nn || last_lag >= nn) {
        throw std::invalid_argument("channel longer than symbol");
    }
    WindowMatrices w{ComplexMatrix(n, n), ComplexMatrix(n, n), ComplexMatrix(n, n)};
    auto tap = [&](std::ptrdiff_t lag) -> Complex {
        if (lag < first_lag || lag > last_lag) {
            return {};
        }
        return taps[static_cast<std::size_t>(lag - first_lag)];
    };
    for (std::ptrdiff_t r = 0; r < nn; ++r) {
        for (std::ptrdiff_t c = 0; c < nn; ++c) {
            const auto ur = static_cast<std::size_t>(r);
            const auto uc = static_cast<std::size_t>(c);
            w.previous(ur, uc) = tap(r - c + nn);
            w.current(ur, uc) = tap(r - c);
            w.next(ur, uc) = tap(r - c - nn);
        }
    }
    return w;
}

IsiIciMatrices build_isi_ici_matrices(std::span<const Complex> h, std::size_t n) {
    if (h.size() > n) {
        throw std::invalid_argument("channel longer than symbol");
    }
    auto w = window_matrices(h, 0, n);
    return {std::move(w.previous), std::move(w.current)};
}

}  // namespace nocp
