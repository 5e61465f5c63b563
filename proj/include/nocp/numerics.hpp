// Complex vector/matrix kernels shared by the simulator: unitary DFT,
// linear convolution and small dense solves.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nocp {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Raised when a linear system is numerically singular. Callers that know
/// which subcarrier the system belongs to attach it via `with_subcarrier`.
class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(std::optional<std::size_t> subcarrier = std::nullopt);

    [[nodiscard]] std::optional<std::size_t> subcarrier() const noexcept { return subcarrier_; }
    [[nodiscard]] SingularSystemError with_subcarrier(std::size_t p) const { return SingularSystemError(p); }

private:
    std::optional<std::size_t> subcarrier_;
};

/// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);

    static ComplexMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    [[nodiscard]] std::span<const Complex> elements() const noexcept { return data_; }

    [[nodiscard]] ComplexMatrix adjoint() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    ComplexVector data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x);

/// Forward DFT with 1/sqrt(N) scaling: X[p] = N^{-1/2} sum_n x[n] e^{-j 2 pi n p / N}.
/// Radix-2 for power-of-two lengths, direct summation otherwise.
ComplexVector dft(std::span<const Complex> x);

/// Inverse of `dft`, same 1/sqrt(N) scaling.
ComplexVector idft(std::span<const Complex> x);

/// Full linear convolution, length La + Lb - 1.
ComplexVector linear_convolve(std::span<const Complex> a, std::span<const Complex> b);

/// LU factorization with partial pivoting of a small square system.
/// Throws SingularSystemError when the 1-norm condition estimate exceeds
/// `kMaxCondition` or a pivot vanishes.
class LuFactorization {
public:
    static constexpr double kMaxCondition = 1e12;

    explicit LuFactorization(const ComplexMatrix& a);

    [[nodiscard]] std::size_t size() const noexcept { return lu_.rows(); }
    [[nodiscard]] ComplexVector solve(std::span<const Complex> b) const;
    [[nodiscard]] ComplexMatrix inverse() const;
    [[nodiscard]] double condition_estimate() const noexcept { return condition_; }

private:
    ComplexMatrix lu_;
    std::vector<std::size_t> perm_;
    double condition_ = 0.0;
};

/// Solve A x = b for square A.
ComplexVector solve_linear(const ComplexMatrix& a, std::span<const Complex> b);

double norm2(std::span<const Complex> x);
double squared_norm(std::span<const Complex> x);

/// True when `n` is a power of two (and nonzero).
constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace nocp
