// Uplink receivers: per-subcarrier MRC and ZF after one OFDM demodulator per
// antenna, and time-reversal MRC (one demodulator per user) optionally
// followed by per-subcarrier K x K zero-forcing post-equalization.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nocp/channel.hpp"
#include "nocp/numerics.hpp"
#include "nocp/ofdm.hpp"

namespace nocp {

enum class Receiver { mrc, zf, tr_mrc, tr_zf, cp_zf };

std::string_view to_string(Receiver r);
Receiver parse_receiver(std::string_view name);

[[nodiscard]] constexpr bool is_time_reversal(Receiver r) { return r == Receiver::tr_mrc || r == Receiver::tr_zf; }
[[nodiscard]] constexpr bool needs_cyclic_prefix(Receiver r) { return r == Receiver::cp_zf; }
[[nodiscard]] constexpr bool is_zero_forcing(Receiver r) {
    return r == Receiver::zf || r == Receiver::tr_zf || r == Receiver::cp_zf;
}

/// N-point channel frequency responses h~_{k,m}(p) = sum_l h_{k,m}(l) e^{-j 2 pi l p / N}.
class FreqResponseSet {
public:
    FreqResponseSet(std::size_t users, std::size_t antennas, std::size_t subcarriers);

    [[nodiscard]] std::size_t users() const noexcept { return users_; }
    [[nodiscard]] std::size_t antennas() const noexcept { return antennas_; }
    [[nodiscard]] std::size_t subcarriers() const noexcept { return subcarriers_; }

    [[nodiscard]] std::span<const Complex> response(std::size_t k, std::size_t m) const;
    [[nodiscard]] std::span<Complex> response(std::size_t k, std::size_t m);
    [[nodiscard]] Complex operator()(std::size_t k, std::size_t m, std::size_t p) const {
        return data_[(k * antennas_ + m) * subcarriers_ + p];
    }

private:
    std::size_t users_;
    std::size_t antennas_;
    std::size_t subcarriers_;
    ComplexVector data_;
};

FreqResponseSet freq_responses(const ChannelSet& channels, std::size_t subcarriers);

/// psi_p = gamma_p / ||gamma_p||^2 applied to the M x N matrix of
/// per-antenna demodulator outputs; returns user k's N estimates.
ComplexVector mrc_combine(const ComplexMatrix& demod, const FreqResponseSet& fr, std::size_t k);

/// Per-subcarrier left inverse of the M x K matrix [gamma_p^(0) ... gamma_p^(K-1)].
/// Returns K x N estimates.
ComplexMatrix zf_combine_freq(const ComplexMatrix& demod, const FreqResponseSet& fr);

/// r^TR_k = M^{-1/2} sum_m r_m * conj(reverse(h_{k,m})); length P + L - 1.
ComplexVector tr_mrc(std::span<const ComplexVector> received, const ChannelSet& channels, std::size_t k);

/// Equivalent time-reversal channel g_kj over lags -(L-1)..(L-1).
class TrChannel {
public:
    TrChannel(std::size_t k, std::size_t j, std::size_t cir_taps, ComplexVector taps);

    [[nodiscard]] std::size_t user() const noexcept { return k_; }
    [[nodiscard]] std::size_t source() const noexcept { return j_; }
    [[nodiscard]] std::size_t cir_taps() const noexcept { return cir_taps_; }
    [[nodiscard]] std::ptrdiff_t first_lag() const noexcept { return -static_cast<std::ptrdiff_t>(cir_taps_) + 1; }
    [[nodiscard]] std::ptrdiff_t last_lag() const noexcept { return static_cast<std::ptrdiff_t>(cir_taps_) - 1; }

    /// Taps in lag order, index 0 = lag -(L-1).
    [[nodiscard]] std::span<const Complex> taps() const noexcept { return taps_; }
    [[nodiscard]] Complex at(std::ptrdiff_t lag) const;

private:
    std::size_t k_;
    std::size_t j_;
    std::size_t cir_taps_;
    ComplexVector taps_;
};

/// g_kj = M^{-1/2} sum_m h_{j,m} * conj(reverse(h_{k,m})).
TrChannel tr_channel(const ChannelSet& channels, std::size_t k, std::size_t j);

/// Diagonal of F G^ICI F^H: sum_l g(l) e^{-j 2 pi l p / N} (N - |l|) / N.
ComplexVector gtilde_diag(const TrChannel& g, std::size_t subcarriers);

/// Time-domain ISI_1 (previous symbol), ICI and ISI_2 (next symbol) matrices
/// of the time-reversal output windowed with its main tap at the symbol start.
WindowMatrices build_G_matrices(const TrChannel& g, std::size_t subcarriers);

/// Per-subcarrier K x K matrices [G~_p]_{kj} = [F G^ICI_kj F^H]_{pp}.
class GtildeStack {
public:
    GtildeStack(std::size_t users, std::size_t subcarriers);

    [[nodiscard]] std::size_t users() const noexcept { return users_; }
    [[nodiscard]] std::size_t subcarriers() const noexcept { return per_subcarrier_.size(); }
    [[nodiscard]] const ComplexMatrix& at(std::size_t p) const { return per_subcarrier_.at(p); }
    [[nodiscard]] ComplexMatrix& at(std::size_t p) { return per_subcarrier_.at(p); }

private:
    std::size_t users_;
    std::vector<ComplexMatrix> per_subcarrier_;
};

GtildeStack build_gtilde_stack(std::span<const TrChannel> g, std::size_t users, std::size_t subcarriers);
GtildeStack build_gtilde_stack(const ChannelSet& channels, std::size_t subcarriers);

/// All K x K time-reversal channels, row-major by (k, j).
std::vector<TrChannel> tr_channels(const ChannelSet& channels);

/// d^TR-ZF(p) = G~_p^{-1} d^TR(p) for each subcarrier of one OFDM symbol
/// (K x N input, one demodulator output per user).
ComplexMatrix tr_zf_detect(const ComplexMatrix& tr_demod, const GtildeStack& gstack);

/// Runs a complete receiver over a received frame and returns one Q x N grid
/// of data estimates per user. The TR receivers window their output at
/// `tr_delay` samples (default L - 1, which puts the main TR tap at the
/// symbol start). TR-MRC estimates are scaled by 1 / [G~_p]_kk.
std::vector<DataGrid> detect_frame(Receiver receiver, std::span<const ComplexVector> received,
                                   const ChannelSet& channels, const FrameConfig& cfg,
                                   std::optional<std::size_t> tr_delay = std::nullopt);

}  // namespace nocp
