#include "nocp/qam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nocp {

namespace {

const double kQpskScale = 1.0 / std::sqrt(2.0);
const double kQam16Scale = 1.0 / std::sqrt(10.0);

double map_axis_qam16(std::uint8_t b0, std::uint8_t b1) {
    // 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    const double magnitude = b1 ? 1.0 : 3.0;
    return b0 ? magnitude : -magnitude;
}

void demap_axis_qam16(double v, std::uint8_t* out) {
    out[0] = v > 0.0 ? 1 : 0;
    out[1] = std::abs(v) < 2.0 ? 1 : 0;
}

}  // namespace

std::string_view to_string(Constellation c) {
    switch (c) {
        case Constellation::qpsk:
            return "qpsk";
        case Constellation::qam16:
            return "qam16";
    }
    return "?";
}

Constellation parse_constellation(std::string_view name) {
    if (name == "qpsk" || name == "4qam") {
        return Constellation::qpsk;
    }
    if (name == "qam16" || name == "16qam") {
        return Constellation::qam16;
    }
    throw std::invalid_argument("unknown constellation '" + std::string(name) + "'");
}

std::size_t bits_per_symbol(Constellation c) { return c == Constellation::qpsk ? 2 : 4; }

ComplexVector qam_map(std::span<const std::uint8_t> bits, Constellation c) {
    const std::size_t bps = bits_per_symbol(c);
    if (bits.size() % bps != 0) {
        throw std::invalid_argument("qam_map: bit count " + std::to_string(bits.size()) +
                                    " is not a multiple of " + std::to_string(bps));
    }
    ComplexVector out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto b = bits.subspan(s * bps, bps);
        if (c == Constellation::qpsk) {
            out[s] = Complex(b[0] ? 1.0 : -1.0, b[1] ? 1.0 : -1.0) * kQpskScale;
        } else {
            out[s] = Complex(map_axis_qam16(b[0], b[1]), map_axis_qam16(b[2], b[3])) * kQam16Scale;
        }
    }
    return out;
}

std::vector<std::uint8_t> qam_demap(std::span<const Complex> symbols, Constellation c) {
    const std::size_t bps = bits_per_symbol(c);
    std::vector<std::uint8_t> bits(symbols.size() * bps);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        std::uint8_t* b = bits.data() + s * bps;
        if (c == Constellation::qpsk) {
            b[0] = symbols[s].real() > 0.0 ? 1 : 0;
            b[1] = symbols[s].imag() > 0.0 ? 1 : 0;
        } else {
            const Complex v = symbols[s] / kQam16Scale;
            demap_axis_qam16(v.real(), b);
            demap_axis_qam16(v.imag(), b + 2);
        }
    }
    return bits;
}

}  // namespace nocp
