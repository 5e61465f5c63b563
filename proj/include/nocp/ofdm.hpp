// OFDM framing: CP-less (cp_len = 0) and CP-based modulation with
// rectangular-window demodulation.

#pragma once

#include <cstddef>
#include <span>

#include "nocp/numerics.hpp"

namespace nocp {

struct FrameConfig {
    std::size_t subcarriers = 256;  // N
    std::size_t symbols = 10;       // Q
    std::size_t cp_len = 0;         // 0 = no cyclic prefix

    /// Throws std::invalid_argument unless N >= 2, Q >= 1, cp_len < N.
    void validate() const;

    [[nodiscard]] std::size_t symbol_period() const noexcept { return subcarriers + cp_len; }
    [[nodiscard]] std::size_t frame_length() const noexcept { return symbols * symbol_period(); }
};

/// Q x N grid of data symbols: row i holds d_i(0..N-1).
using DataGrid = ComplexMatrix;

/// x = [x_0; ...; x_{Q-1}], x_i = idft(d_i), each optionally prefixed with its
/// last cp_len samples.
ComplexVector modulate(const DataGrid& grid, const FrameConfig& cfg);

/// dft of the N samples starting at delay + i (N + cp_len) + cp_len.
ComplexVector demodulate_window(std::span<const Complex> r, std::size_t symbol, const FrameConfig& cfg,
                                std::size_t delay);

}  // namespace nocp
