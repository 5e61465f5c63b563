#include "nocp/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nocp {

namespace {

void require_fits(const PowerDelayProfile& pdp, std::size_t subcarriers) {
    if (subcarriers < 2) {
        throw std::invalid_argument("N must be at least 2");
    }
    if (pdp.length() > subcarriers) {
        throw std::invalid_argument("channel longer than symbol");
    }
}

// Shared by ici_power, isi_power and asymptotic_sir so all three agree bit for bit.
double distance_power(Complex rho_bar_d, std::size_t subcarriers, std::size_t d) {
    const double n = static_cast<double>(subcarriers);
    const double s = std::sin(std::numbers::pi * static_cast<double>(d) / n);
    return std::norm(1.0 - rho_bar_d) / (4.0 * n * n * s * s);
}

Complex pdp_dft_bin(const PowerDelayProfile& pdp, std::size_t subcarriers, std::size_t d) {
    Complex acc{};
    for (std::size_t l = 0; l < pdp.length(); ++l) {
        const double turns = static_cast<double>((l * d) % subcarriers) / static_cast<double>(subcarriers);
        acc += pdp[l] * std::polar(1.0, -2.0 * std::numbers::pi * turns);
    }
    return acc;
}

}  // namespace

double SirTerms::total_ici() const { return std::accumulate(p_ici.begin(), p_ici.end(), 0.0); }

double SirTerms::total_isi() const { return std::accumulate(p_isi.begin(), p_isi.end(), 0.0); }

double avg_delay_spread(const PowerDelayProfile& pdp) {
    double tau = 0.0;
    for (std::size_t l = 0; l < pdp.length(); ++l) {
        tau += static_cast<double>(l) * pdp[l];
    }
    return tau;
}

ComplexVector pdp_dft(const PowerDelayProfile& pdp, std::size_t subcarriers) {
    require_fits(pdp, subcarriers);
    ComplexVector out(subcarriers);
    for (std::size_t d = 0; d < subcarriers; ++d) {
        out[d] = pdp_dft_bin(pdp, subcarriers, d);
    }
    return out;
}

double signal_power(const PowerDelayProfile& pdp, std::size_t subcarriers) {
    require_fits(pdp, subcarriers);
    const double loss = 1.0 - avg_delay_spread(pdp) / static_cast<double>(subcarriers);
    return loss * loss;
}

double ici_power(const PowerDelayProfile& pdp, std::size_t subcarriers, std::size_t d) {
    require_fits(pdp, subcarriers);
    if (d == 0) {
        throw std::invalid_argument("d=0 is the signal term");
    }
    if (d >= subcarriers) {
        throw std::out_of_range("subcarrier distance must be below N");
    }
    return distance_power(pdp_dft_bin(pdp, subcarriers, d), subcarriers, d);
}

double isi_power(const PowerDelayProfile& pdp, std::size_t subcarriers, std::size_t d) {
    require_fits(pdp, subcarriers);
    if (d >= subcarriers) {
        throw std::out_of_range("subcarrier distance must be below N");
    }
    if (d == 0) {
        const double ratio = avg_delay_spread(pdp) / static_cast<double>(subcarriers);
        return ratio * ratio;
    }
    return ici_power(pdp, subcarriers, d);
}

SirTerms asymptotic_sir(const PowerDelayProfile& pdp, std::size_t subcarriers) {
    require_fits(pdp, subcarriers);
    SirTerms terms;
    terms.p_signal = signal_power(pdp, subcarriers);
    terms.p_ici.resize(subcarriers - 1);
    terms.p_isi.resize(subcarriers);
    terms.p_isi[0] = isi_power(pdp, subcarriers, 0);
    for (std::size_t d = 1; d < subcarriers; ++d) {
        const double p = distance_power(pdp_dft_bin(pdp, subcarriers, d), subcarriers, d);
        terms.p_ici[d - 1] = p;
        terms.p_isi[d] = p;
    }
    const double interference = terms.total_ici() + terms.total_isi();
    if (interference == 0.0) {
        terms.sir_linear = std::numeric_limits<double>::infinity();
        terms.sir_db = std::numeric_limits<double>::infinity();
    } else {
        terms.sir_linear = terms.p_signal / interference;
        terms.sir_db = 10.0 * std::log10(terms.sir_linear);
    }
    return terms;
}

}  // namespace nocp
