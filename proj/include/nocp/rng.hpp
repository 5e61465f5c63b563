#pragma once

#include <cstdint>
#include <random>

#include "nocp/numerics.hpp"

namespace nocp {

/// Seeded random stream. Streams are identified by (seed, stream id); each
/// Monte Carlo trial derives its own stream so results do not depend on
/// which worker thread ran it.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

    /// Independent child stream keyed by `child`.
    [[nodiscard]] Rng derive(std::uint64_t child) const;

    std::uint64_t next_u64() { return engine_(); }
    double standard_normal() { return normal_(engine_); }

    /// Circularly-symmetric CN(0, variance): variance/2 per real/imag part.
    Complex complex_normal(double variance);

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nocp
