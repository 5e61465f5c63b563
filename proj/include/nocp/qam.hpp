// Gray-mapped square QAM with unit average symbol energy.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nocp/numerics.hpp"

namespace nocp {

enum class Constellation { qpsk, qam16 };

std::string_view to_string(Constellation c);
Constellation parse_constellation(std::string_view name);

std::size_t bits_per_symbol(Constellation c);

/// Bits are 0/1 bytes. Per axis the first bit of each pair (qam16) selects
/// the sign and the second the magnitude, Gray ordered: 00 -3, 01 -1, 11 +1, 10 +3.
/// Real axis takes the first half of a symbol's bits.
ComplexVector qam_map(std::span<const std::uint8_t> bits, Constellation c);

/// Hard-decision nearest-point demapping.
std::vector<std::uint8_t> qam_demap(std::span<const Complex> symbols, Constellation c);

}  // namespace nocp
