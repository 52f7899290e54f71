// Row ensemble of an m x N matrix: each row is a multiset, each row gets an
// independent subset-sum variable X_i, and the row mean is (1/m) sum_i X_i.
// Variance identities and the inequalities that tie it to the Frobenius and
// spectral norms and to the coherence live here.
#ifndef COHERE_ROW_ENSEMBLE_HPP
#define COHERE_ROW_ENSEMBLE_HPP

#include "cohere/core.hpp"
#include "cohere/matrix_metrics.hpp"
#include "cohere/subset_stats.hpp"

#include <string>
#include <vector>

namespace cohere {

template <typename Scalar>
struct RowMeanStats {
    Complex<Scalar> mean{};
    Scalar variance{};
    Scalar std_dev{};
    std::vector<Scalar> row_sum_abs_sq;
};

enum class BoundKind { lower, upper };

/// Outcome of one inequality. Violations are reported here, never thrown.
struct BoundCheck {
    std::string label;
    BoundKind kind = BoundKind::upper;
    double lhs = 0;
    double rhs = 0;
    bool holds = false;
    bool equality = false;
};

namespace bound_label {
inline constexpr const char* spectral_lower = "variance_ge_spectral";
inline constexpr const char* frobenius_upper = "variance_le_frobenius";
inline constexpr const char* coherence_scaled = "stddev_le_coherence_scaled";
inline constexpr const char* coherence_plain = "stddev_le_coherence";
}  // namespace bound_label

/// Row-sum zero test is absolute, scaled by the Frobenius norm.
inline constexpr double row_sum_zero_tol = 1e-10;

template <typename Derived>
Multiset<typename Derived::RealScalar> row_multiset(const Eigen::MatrixBase<Derived>& a, Eigen::Index row)
{
    using Real = typename Derived::RealScalar;
    if (row < 0 || row >= a.rows())
        throw DomainError("row index " + std::to_string(row) + " out of range for " +
                          std::to_string(a.rows()) + " rows");
    std::vector<Complex<Real>> values(static_cast<std::size_t>(a.cols()));
    for (Eigen::Index k = 0; k < a.cols(); ++k)
        values[static_cast<std::size_t>(k)] = a(row, k);
    return Multiset<Real>(std::move(values));
}

namespace detail {

template <typename Real>
Real row_mean_variance(Real n, Real subset, Real frob_sq, Real row_sums_sq)
{
    if (n == 1)
        return 0;
    return clamp_nonnegative((n - subset) / (subset * n * n * (n - 1)) * (n * frob_sq - row_sums_sq));
}

template <typename Derived>
typename Derived::RealScalar total_row_sum_abs_sq(const Eigen::MatrixBase<Derived>& a)
{
    using Real = typename Derived::RealScalar;
    CompensatedSum<Real> acc;
    const auto sums = row_sums(a);
    for (Eigen::Index i = 0; i < sums.size(); ++i)
        acc.add(abs_sq(sums(i)));
    return acc.value();
}

template <typename Derived>
bool all_row_sums_zero(const Eigen::MatrixBase<Derived>& a)
{
    const auto sums = row_sums(a);
    const double tol = row_sum_zero_tol * static_cast<double>(frobenius_norm(a));
    for (Eigen::Index i = 0; i < sums.size(); ++i)
        if (std::abs(sums(i)) > tol)
            return false;
    return true;
}

inline BoundCheck make_bound(const char* label, BoundKind kind, double lhs, double rhs,
                             const TolerancePolicy& policy)
{
    BoundCheck b;
    b.label = label;
    b.kind = kind;
    b.lhs = lhs;
    b.rhs = rhs;
    b.holds = kind == BoundKind::lower ? lhs >= rhs - policy.abs_tol : lhs <= rhs + policy.abs_tol;
    b.equality = policy.close(lhs, rhs);
    return b;
}

template <typename Derived>
void require_bound_shape(const Eigen::MatrixBase<Derived>& a)
{
    require_wide(a);
    if (a.cols() < 2)
        throw DomainError("bound checks need at least two columns");
}

}  // namespace detail

/// Mean and variance of (1/s) sum_i X_i(s) when each row draws s = `subset_size`
/// elements. The matrix's own row count is the canonical subset size; the
/// mean does not depend on s.
template <typename Derived>
RowMeanStats<typename Derived::RealScalar> row_mean_moments(const Eigen::MatrixBase<Derived>& a,
                                                             Eigen::Index subset_size)
{
    using Real = typename Derived::RealScalar;
    validate_matrix(a);
    if (subset_size < 1 || subset_size > a.cols())
        throw DomainError("subset size " + std::to_string(subset_size) + " must lie in [1, " +
                          std::to_string(a.cols()) + "]");
    const Real n = static_cast<Real>(a.cols());
    const Real subset = static_cast<Real>(subset_size);

    RowMeanStats<Real> r;
    const auto sums = row_sums(a);
    CompensatedSum<Complex<Real>> total;
    CompensatedSum<Real> sums_sq;
    for (Eigen::Index i = 0; i < sums.size(); ++i) {
        total.add(sums(i));
        r.row_sum_abs_sq.push_back(abs_sq(sums(i)));
        sums_sq.add(r.row_sum_abs_sq.back());
    }
    r.mean = total.value() / n;
    const Real frob = frobenius_norm(a);
    r.variance = detail::row_mean_variance(n, subset, frob * frob, sums_sq.value());
    r.std_dev = std::sqrt(r.variance);
    return r;
}

template <typename Derived>
RowMeanStats<typename Derived::RealScalar> row_mean_moments(const Eigen::MatrixBase<Derived>& a)
{
    require_wide(a);
    return row_mean_moments(a, a.rows());
}

/// Var >= (N - m)/(m N^2 (N - 1)) (N sigma_max^2 - sum_i |row sum_i|^2).
template <typename Derived>
BoundCheck spectral_lower_bound(const Eigen::MatrixBase<Derived>& a,
                                const SpectralEstimate<typename Derived::RealScalar>& est,
                                const TolerancePolicy& policy = {})
{
    using Real = typename Derived::RealScalar;
    detail::require_bound_shape(a);
    const Real n = static_cast<Real>(a.cols());
    const Real m = static_cast<Real>(a.rows());
    const auto stats = row_mean_moments(a);
    const Real rhs = (n - m) / (m * n * n * (n - 1)) *
                     (n * est.lambda_max - detail::total_row_sum_abs_sq(a));
    return detail::make_bound(bound_label::spectral_lower, BoundKind::lower, stats.variance, rhs, policy);
}

/// Var <= (N - m)/(m N (N - 1)) ||A||_F^2; equality exactly when every row sums to zero.
template <typename Derived>
BoundCheck frobenius_upper_bound(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& policy = {})
{
    using Real = typename Derived::RealScalar;
    detail::require_bound_shape(a);
    const Real n = static_cast<Real>(a.cols());
    const Real m = static_cast<Real>(a.rows());
    const Real frob = frobenius_norm(a);
    const auto stats = row_mean_moments(a);
    auto b = detail::make_bound(bound_label::frobenius_upper, BoundKind::upper, stats.variance,
                                (n - m) / (m * n * (n - 1)) * frob * frob, policy);
    b.equality = detail::all_row_sums_zero(a);
    return b;
}

/// Row-mean statistics specialized to unit-norm columns, where ||A||_F^2 = N.
template <typename Derived>
RowMeanStats<typename Derived::RealScalar> normalized_column_stats(const Eigen::MatrixBase<Derived>& a,
                                                                    const TolerancePolicy& policy = {})
{
    using Real = typename Derived::RealScalar;
    detail::require_bound_shape(a);
    require_normalized_columns(a, policy);
    const Real n = static_cast<Real>(a.cols());
    const Real m = static_cast<Real>(a.rows());

    RowMeanStats<Real> r;
    const auto sums = row_sums(a);
    CompensatedSum<Complex<Real>> total;
    CompensatedSum<Real> sums_sq;
    for (Eigen::Index i = 0; i < sums.size(); ++i) {
        total.add(sums(i));
        r.row_sum_abs_sq.push_back(abs_sq(sums(i)));
        sums_sq.add(r.row_sum_abs_sq.back());
    }
    r.mean = total.value() / n;
    r.variance = detail::clamp_nonnegative((n - m) / (m * (n - 1)) * (1 - sums_sq.value() / (n * n)));
    r.std_dev = std::sqrt(r.variance);
    return r;
}

/// sigma <= mu sqrt(1 - sum_i |row sum_i|^2 / N^2) and sigma <= mu, for
/// unit-norm columns. Equality flags compare the two sides within policy.
template <typename Derived>
std::vector<BoundCheck> coherence_bounds_check(const Eigen::MatrixBase<Derived>& a,
                                               const CoherenceReport<typename Derived::RealScalar>& coh,
                                               const TolerancePolicy& policy = {})
{
    using Real = typename Derived::RealScalar;
    const auto stats = normalized_column_stats(a, policy);
    const Real n = static_cast<Real>(a.cols());
    const Real factor = std::sqrt(detail::clamp_nonnegative(1 - detail::total_row_sum_abs_sq(a) / (n * n)));
    return {
        detail::make_bound(bound_label::coherence_scaled, BoundKind::upper, stats.std_dev, coh.mu * factor, policy),
        detail::make_bound(bound_label::coherence_plain, BoundKind::upper, stats.std_dev, coh.mu, policy),
    };
}

/// Monte Carlo row mean: per draw, every row independently draws a
/// `subset_size`-subset without replacement; the row sums are averaged.
template <typename Derived>
SampleStats<typename Derived::RealScalar> sample_row_mean(const Eigen::MatrixBase<Derived>& a,
                                                          Eigen::Index subset_size, Seed seed,
                                                          std::uint64_t k)
{
    using Real = typename Derived::RealScalar;
    validate_matrix(a);
    if (k == 0)
        throw DomainError("number of draws must be positive");
    if (subset_size < 1 || subset_size > a.cols())
        throw DomainError("subset size " + std::to_string(subset_size) + " must lie in [1, " +
                          std::to_string(a.cols()) + "]");
    const auto n = static_cast<std::size_t>(a.cols());
    const auto sub = static_cast<std::size_t>(subset_size);
    detail::DrawAccumulator<Real> acc;
    for (std::uint64_t d = 0; d < k; ++d) {
        Rng rng(seed, d);
        Complex<Real> total{};
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            auto picked = draw_without_replacement(rng, n, sub);
            std::sort(picked.begin(), picked.end());
            Complex<Real> s{};
            for (std::size_t c : picked)
                s += a(i, static_cast<Eigen::Index>(c));
            total += s;
        }
        acc.add(total / static_cast<Real>(subset_size));
    }
    return acc.stats();
}

template <typename Derived>
SampleStats<typename Derived::RealScalar> sample_row_mean(const Eigen::MatrixBase<Derived>& a, Seed seed,
                                                          std::uint64_t k)
{
    require_wide(a);
    return sample_row_mean(a, a.rows(), seed, k);
}

}  // namespace cohere

#endif  // COHERE_ROW_ENSEMBLE_HPP
