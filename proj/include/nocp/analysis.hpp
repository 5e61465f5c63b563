// Closed-form large-antenna SIR of conventional per-subcarrier MRC for
// OFDM without cyclic prefix. Everything here is a function of the power
// delay profile and N alone.

#pragma once

#include <cstddef>
#include <vector>

#include "nocp/channel.hpp"
#include "nocp/numerics.hpp"

namespace nocp {

struct SirTerms {
    double p_signal = 0.0;
    std::vector<double> p_ici;  // index d - 1 for d = 1..N-1
    std::vector<double> p_isi;  // index d for d = 0..N-1
    double sir_linear = 0.0;    // +inf for a single-tap channel
    double sir_db = 0.0;        // +inf for a single-tap channel

    [[nodiscard]] double total_ici() const;
    [[nodiscard]] double total_isi() const;
};

/// Mean delay sum_l l rho(l).
double avg_delay_spread(const PowerDelayProfile& pdp);

/// rho_bar(d) = sum_l rho(l) e^{-j 2 pi l d / N}; plain sum, so rho_bar(0) = 1.
ComplexVector pdp_dft(const PowerDelayProfile& pdp, std::size_t subcarriers);

/// (1 - tau/N)^2.
double signal_power(const PowerDelayProfile& pdp, std::size_t subcarriers);

/// |1 - rho_bar(d)|^2 / (4 N^2 sin^2(pi d / N)) for 1 <= d <= N-1.
double ici_power(const PowerDelayProfile& pdp, std::size_t subcarriers, std::size_t d);

/// Equal to ici_power for d != 0; (tau/N)^2 for d = 0.
double isi_power(const PowerDelayProfile& pdp, std::size_t subcarriers, std::size_t d);

/// P_s / (sum_d P_ICI(d) + sum_d P_ISI(d)).
SirTerms asymptotic_sir(const PowerDelayProfile& pdp, std::size_t subcarriers);

}  // namespace nocp
