#include "nocp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nocp {

namespace {

std::string singular_message(std::optional<std::size_t> subcarrier) {
    if (subcarrier) {
        return "singular system at subcarrier " + std::to_string(*subcarrier);
    }
    return "singular system";
}

// In-place iterative radix-2 transform without normalization.
void fft_radix2(ComplexVector& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::size_t half = len / 2;
        // Twiddles computed directly rather than by recurrence to keep
        // round-off at the 1e-15 level for N in the thousands.
        ComplexVector twiddle(half);
        for (std::size_t k = 0; k < half; ++k) {
            twiddle[k] = std::polar(1.0, angle * static_cast<double>(k));
        }
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = a[start + k];
                const Complex v = a[start + k + half] * twiddle[k];
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
    }
}

ComplexVector transform(std::span<const Complex> x, bool inverse) {
    const std::size_t n = x.size();
    if (n == 0) {
        throw std::invalid_argument("empty vector");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexVector out;
    if (is_power_of_two(n)) {
        out.assign(x.begin(), x.end());
        fft_radix2(out, inverse);
    } else {
        out.assign(n, Complex{});
        const double sign = inverse ? 1.0 : -1.0;
        for (std::size_t p = 0; p < n; ++p) {
            Complex acc{};
            for (std::size_t t = 0; t < n; ++t) {
                const auto idx = static_cast<double>((t * p) % n);
                acc += x[t] * std::polar(1.0, sign * 2.0 * std::numbers::pi * idx / static_cast<double>(n));
            }
            out[p] = acc;
        }
    }
    for (auto& v : out) {
        v *= scale;
    }
    return out;
}

}  // namespace

SingularSystemError::SingularSystemError(std::optional<std::size_t> subcarrier)
    : std::runtime_error(singular_message(subcarrier)), subcarrier_(subcarrier) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matrix dimension mismatch");
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.cols() != x.size()) {
        throw std::invalid_argument("matrix/vector dimension mismatch");
    }
    ComplexVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex acc{};
        for (std::size_t k = 0; k < a.cols(); ++k) {
            acc += a(i, k) * x[k];
        }
        out[i] = acc;
    }
    return out;
}

ComplexVector dft(std::span<const Complex> x) { return transform(x, false); }

ComplexVector idft(std::span<const Complex> x) { return transform(x, true); }

ComplexVector linear_convolve(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("empty vector");
    }
    ComplexVector out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Complex ai = a[i];
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += ai * b[j];
        }
    }
    return out;
}

LuFactorization::LuFactorization(const ComplexMatrix& a) : lu_(a), perm_(a.rows()) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n) {
        throw std::invalid_argument("solve_linear needs a nonempty square matrix");
    }
    double norm_a = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            col += std::abs(a(r, c));
        }
        norm_a = std::max(norm_a, col);
    }
    if (norm_a == 0.0 || !std::isfinite(norm_a)) {
        throw SingularSystemError();
    }
    for (std::size_t i = 0; i < n; ++i) {
        perm_[i] = i;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (const double v = std::abs(lu_(r, k)); v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best <= norm_a * 1e-300) {
            throw SingularSystemError();
        }
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(lu_(k, c), lu_(pivot, c));
            }
            std::swap(perm_[k], perm_[pivot]);
        }
        const Complex inv_pivot = 1.0 / lu_(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const Complex factor = lu_(r, k) * inv_pivot;
            lu_(r, k) = factor;
            if (factor == Complex{}) {
                continue;
            }
            for (std::size_t c = k + 1; c < n; ++c) {
                lu_(r, c) -= factor * lu_(k, c);
            }
        }
    }
    // Exact 1-norm of the inverse; K stays small here, so the O(K^3) cost is fine.
    const ComplexMatrix inv = inverse();
    double norm_inv = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            col += std::abs(inv(r, c));
        }
        norm_inv = std::max(norm_inv, col);
    }
    condition_ = norm_a * norm_inv;
    if (!std::isfinite(condition_) || condition_ > kMaxCondition) {
        throw SingularSystemError();
    }
}

ComplexVector LuFactorization::solve(std::span<const Complex> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) {
        throw std::invalid_argument("right-hand side size mismatch");
    }
    ComplexVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = b[perm_[i]];
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            x[i] -= lu_(i, k) * x[k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) {
            x[i] -= lu_(i, k) * x[k];
        }
        x[i] /= lu_(i, i);
    }
    return x;
}

ComplexMatrix LuFactorization::inverse() const {
    const std::size_t n = lu_.rows();
    ComplexMatrix inv(n, n);
    ComplexVector e(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::fill(e.begin(), e.end(), Complex{});
        e[c] = 1.0;
        const ComplexVector col = solve(e);
        for (std::size_t r = 0; r < n; ++r) {
            inv(r, c) = col[r];
        }
    }
    return inv;
}

ComplexVector solve_linear(const ComplexMatrix& a, std::span<const Complex> b) {
    return LuFactorization(a).solve(b);
}

double squared_norm(std::span<const Complex> x) {
    double acc = 0.0;
    for (const auto& v : x) {
        acc += std::norm(v);
    }
    return acc;
}

double norm2(std::span<const Complex> x) { return std::sqrt(squared_norm(x)); }

}  // namespace nocp
