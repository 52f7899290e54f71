// Discrete Fourier and partial Fourier matrices, the Fourier-row multisets,
// closed-form row-mean moments for partial Fourier matrices, and seeded
// Gaussian test matrices.
#ifndef COHERE_FOURIER_HPP
#define COHERE_FOURIER_HPP

#include "cohere/core.hpp"
#include "cohere/matrix_metrics.hpp"
#include "cohere/subset_stats.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace cohere {

/// Strictly increasing row selection from the n x n DFT matrix.
class PartialFourierSpec {
public:
    PartialFourierSpec(std::size_t n, std::vector<std::size_t> rows) : n_(n), rows_(std::move(rows))
    {
        if (n_ < 2)
            throw DomainError("partial Fourier needs n >= 2");
        if (rows_.empty() || rows_.size() > n_)
            throw DomainError("partial Fourier needs between 1 and n rows");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i] >= n_)
                throw DomainError("row index " + std::to_string(rows_[i]) + " out of range [0, " +
                                  std::to_string(n_ - 1) + "]");
            if (i > 0 && rows_[i] <= rows_[i - 1])
                throw DomainError("row indices must be strictly increasing");
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return rows_.size(); }
    const std::vector<std::size_t>& rows() const noexcept { return rows_; }
    bool has_first_row() const noexcept { return rows_.front() == 0; }

private:
    std::size_t n_;
    std::vector<std::size_t> rows_;
};

namespace detail {

/// e^{sign * 2 pi j r / n} with r reduced modulo n before the angle is formed.
template <typename Scalar>
Complex<Scalar> unit_root(std::uint64_t r, std::uint64_t n, int sign)
{
    r %= n;
    constexpr long double two_pi = 6.283185307179586476925286766559L;
    // Symmetric reduction into (-pi, pi].
    const long double frac = 2 * r > n ? static_cast<long double>(r) - static_cast<long double>(n)
                                       : static_cast<long double>(r);
    const long double angle = sign * two_pi * frac / static_cast<long double>(n);
    return {static_cast<Scalar>(std::cos(angle)), static_cast<Scalar>(std::sin(angle))};
}

}  // namespace detail

/// F(i, k) = exp(2 pi j i k / n) / sqrt(n).
template <typename Scalar = double>
Matrix<Scalar> dft_matrix(std::size_t n)
{
    if (n < 1)
        throw DomainError("DFT size must be positive");
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(n));
    Matrix<Scalar> f(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            f(i, k) = scale * detail::unit_root<Scalar>(static_cast<std::uint64_t>(i) * k, n, +1);
    return f;
}

template <typename Scalar = double>
Matrix<Scalar> partial_fourier(const PartialFourierSpec& spec)
{
    const std::size_t n = spec.n();
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(n));
    Matrix<Scalar> f(spec.m(), n);
    for (std::size_t l = 0; l < spec.m(); ++l)
        for (std::size_t k = 0; k < n; ++k)
            f(l, k) = scale * detail::unit_root<Scalar>(static_cast<std::uint64_t>(spec.rows()[l]) * k, n, +1);
    return f;
}

/// Uniform m-subset of {0..n-1} without replacement, sorted.
inline PartialFourierSpec sample_row_indices(std::size_t n, std::size_t m, Seed seed)
{
    if (m < 1 || m > n)
        throw DomainError("need 1 <= m <= n, got m=" + std::to_string(m) + " n=" + std::to_string(n));
    Rng rng(seed);
    auto rows = draw_without_replacement(rng, n, m);
    std::sort(rows.begin(), rows.end());
    return PartialFourierSpec(n, std::move(rows));
}

/// {exp(-2 pi j t l / n) : t = 1..n}.
template <typename Scalar = double>
Multiset<Scalar> fourier_row_multiset(std::size_t l, std::size_t n)
{
    if (n < 1)
        throw DomainError("multiset size must be positive");
    if (l >= n)
        throw DomainError("frequency l=" + std::to_string(l) + " out of range [0, " + std::to_string(n - 1) + "]");
    std::vector<Complex<Scalar>> values(n);
    for (std::size_t t = 1; t <= n; ++t)
        values[t - 1] = detail::unit_root<Scalar>(static_cast<std::uint64_t>(t) * l, n, -1);
    return Multiset<Scalar>(std::move(values));
}

/// Row-mean moments of an m-row partial Fourier matrix, which depend only on
/// whether the all-constant row 0 is selected.
template <typename Scalar = double>
MomentReport<Scalar> partial_fourier_closed_form(std::size_t n, std::size_t m, bool has_first_row)
{
    if (n < 2)
        throw DomainError("partial Fourier needs n >= 2");
    if (m < 1 || m > n)
        throw DomainError("need 1 <= m <= n, got m=" + std::to_string(m) + " n=" + std::to_string(n));
    const Scalar nn = static_cast<Scalar>(n);
    const Scalar mm = static_cast<Scalar>(m);
    MomentReport<Scalar> r;
    if (has_first_row) {
        r.mean = Scalar(1) / std::sqrt(nn);
        r.variance = (nn - mm) * (mm - 1) / (mm * nn * (nn - 1));
    } else {
        r.mean = 0;
        r.variance = (nn - mm) / (nn * (nn - 1));
    }
    r.second_abs_moment = r.variance + abs_sq(r.mean);
    return r;
}

/// Independent standard normal real and imaginary parts, row-major from the
/// seeded stream; optionally column-normalized.
template <typename Scalar = double>
Matrix<Scalar> random_matrix(std::size_t m, std::size_t n, Seed seed, bool normalized)
{
    if (m < 1 || n < 1)
        throw DomainError("random matrix needs positive dimensions");
    Rng rng(seed);
    Matrix<Scalar> a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const auto [re, im] = rng.normal_pair();
            a(i, k) = Complex<Scalar>(static_cast<Scalar>(re), static_cast<Scalar>(im));
        }
    return normalized ? normalize_columns(a) : a;
}

}  // namespace cohere

#endif  // COHERE_FOURIER_HPP
