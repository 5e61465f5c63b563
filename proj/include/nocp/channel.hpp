// Multipath channel statistics, realizations and the uplink signal model.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "nocp/numerics.hpp"
#include "nocp/rng.hpp"

namespace nocp {

/// Normalized tap powers rho(0..L-1).
class PowerDelayProfile {
public:
    /// Taps must be nonnegative and sum to one within 1e-12.
    explicit PowerDelayProfile(std::vector<double> taps);

    /// Rescales arbitrary nonnegative taps to unit sum.
    static PowerDelayProfile normalized(std::vector<double> taps);

    [[nodiscard]] std::size_t length() const noexcept { return taps_.size(); }
    [[nodiscard]] std::span<const double> taps() const noexcept { return taps_; }
    [[nodiscard]] double operator[](std::size_t l) const { return taps_[l]; }

private:
    std::vector<double> taps_;
};

/// rho(l) = e^{-alpha l} / sum_i e^{-alpha i}, l = 0..L-1.
PowerDelayProfile exp_pdp(std::size_t taps, double alpha);

/// One nonnegative real per line ('#' comments and blank lines skipped).
/// Rescaled to unit sum; a warning goes to `warnings` when the file's sum
/// is off by more than 1e-6.
PowerDelayProfile load_pdp_file(const std::filesystem::path& path, std::ostream& warnings);

/// K x M channel impulse responses h_{k,m}, each of length L.
class ChannelSet {
public:
    ChannelSet(std::size_t users, std::size_t antennas, std::size_t taps);

    [[nodiscard]] std::size_t users() const noexcept { return users_; }
    [[nodiscard]] std::size_t antennas() const noexcept { return antennas_; }
    [[nodiscard]] std::size_t taps() const noexcept { return taps_; }

    [[nodiscard]] std::span<const Complex> cir(std::size_t k, std::size_t m) const;
    [[nodiscard]] std::span<Complex> cir(std::size_t k, std::size_t m);

private:
    std::size_t users_;
    std::size_t antennas_;
    std::size_t taps_;
    ComplexVector data_;
};

/// Independent CN(0, diag(rho)) taps for every (user, antenna) pair.
ChannelSet sample_channels(const PowerDelayProfile& pdp, std::size_t users, std::size_t antennas,
                           Rng& rng);

/// i.i.d. CN(0, noise_var) samples.
ComplexVector awgn(std::size_t length, double noise_var, Rng& rng);

/// r_m = sum_k x_k * h_{k,m} + nu_m for every antenna; each output has
/// length len(x) + L - 1. Noise is drawn antenna by antenna from `rng`.
std::vector<ComplexVector> apply_uplink(const ChannelSet& channels, std::span<const ComplexVector> tx,
                                        double noise_var, Rng& rng);

/// The three N x N matrices mapping the previous, current and next
/// transmitted symbol onto an N-sample receive window, for a response whose
/// taps cover lags first_lag .. first_lag + taps.size() - 1:
///   window(n) = sum_l taps(l) x(n - l)
/// where x runs over the concatenated symbols and n - l < 0 / >= N reach into
/// the neighbours.
struct WindowMatrices {
    ComplexMatrix previous;
    ComplexMatrix current;
    ComplexMatrix next;
};

WindowMatrices window_matrices(std::span<const Complex> taps, std::ptrdiff_t first_lag, std::size_t n);

/// Time-domain ISI (tail of symbol i-1) and ICI (symbol i) matrices of a
/// causal CIR.
struct IsiIciMatrices {
    ComplexMatrix isi;
    ComplexMatrix ici;
};

IsiIciMatrices build_isi_ici_matrices(std::span<const Complex> h, std::size_t n);

}  // namespace nocp
