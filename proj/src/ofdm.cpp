#include "nocp/ofdm.hpp"

#include <stdexcept>
#include <string>

namespace nocp {

void FrameConfig::validate() const {
    if (subcarriers < 2) {
        throw std::invalid_argument("frame config: N must be at least 2");
    }
    if (symbols < 1) {
        throw std::invalid_argument("frame config: Q must be at least 1");
    }
    if (cp_len >= subcarriers) {
        throw std::invalid_argument("frame config: cp_len must be smaller than N");
    }
}

ComplexVector modulate(const DataGrid& grid, const FrameConfig& cfg) {
    cfg.validate();
    if (grid.rows() != cfg.symbols || grid.cols() != cfg.subcarriers) {
        throw std::invalid_argument("modulate: grid is " + std::to_string(grid.rows()) + "x" +
                                    std::to_string(grid.cols()) + ", frame expects " +
                                    std::to_string(cfg.symbols) + "x" + std::to_string(cfg.subcarriers));
    }
    const std::size_t n = cfg.subcarriers;
    ComplexVector out;
    out.reserve(cfg.frame_length());
    for (std::size_t i = 0; i < cfg.symbols; ++i) {
        const ComplexVector x = idft(grid.row(i));
        out.insert(out.end(), x.end() - static_cast<std::ptrdiff_t>(cfg.cp_len), x.end());
        out.insert(out.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return out;
}

ComplexVector demodulate_window(std::span<const Complex> r, std::size_t symbol, const FrameConfig& cfg,
                                std::size_t delay) {
    cfg.validate();
    const std::size_t start = delay + symbol * cfg.symbol_period() + cfg.cp_len;
    if (start + cfg.subcarriers > r.size()) {
        throw std::out_of_range("demodulate_window: window [" + std::to_string(start) + ", " +
                                std::to_string(start + cfg.subcarriers) + ") exceeds received length " +
                                std::to_string(r.size()));
    }
    return dft(r.subspan(start, cfg.subcarriers));
}

}  // namespace nocp
