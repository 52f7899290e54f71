// Matrix quality metrics for measurement matrices: norms, Gram matrix,
// coherence against the Welch bound, and equiangular tight frame detection.
#ifndef COHERE_MATRIX_METRICS_HPP
#define COHERE_MATRIX_METRICS_HPP

#include "cohere/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace cohere {

template <typename Scalar>
struct SpectralEstimate {
    Scalar sigma_max{};
    Scalar lambda_max{};
    std::size_t iterations = 0;
    Scalar residual{};
};

template <typename Scalar>
struct CoherenceReport {
    Scalar mu{};
    std::pair<Eigen::Index, Eigen::Index> argmax_pair{0, 1};
    Scalar welch{};
    Scalar slack{};
};

template <typename Scalar>
struct EtfVerdict {
    bool is_etf = false;
    Scalar equiangular_spread{};
    Scalar tightness_residual{};
    bool columns_normalized = false;
};

struct PowerIterationOptions {
    double rel_change_tol = 1e-13;
    double residual_tol = 1e-10;  // relative to lambda
    std::size_t max_iterations = 100'000;
    std::uint64_t restart_seed = 0x5eed5eed5eed5eedULL;
};

inline constexpr double etf_default_tol = 1e-8;

template <typename Derived>
typename Derived::RealScalar frobenius_norm(const Eigen::MatrixBase<Derived>& a)
{
    using Real = typename Derived::RealScalar;
    CompensatedSum<Real> acc;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            acc.add(abs_sq(Complex<Real>(a(i, k))));
    return std::sqrt(acc.value());
}

/// G(i, k) = <a_i, a_k> = sum_row a(row, i) * conj(a(row, k)).
template <typename Derived>
Matrix<typename Derived::RealScalar> gram(const Eigen::MatrixBase<Derived>& a)
{
    return a.transpose() * a.conjugate();
}

/// Column l2 norms.
template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> column_norms(const Eigen::MatrixBase<Derived>& a)
{
    return a.colwise().norm().transpose();
}

/// Row sums sum_k a(i, k).
template <typename Derived>
Vector<typename Derived::RealScalar> row_sums(const Eigen::MatrixBase<Derived>& a)
{
    return a.rowwise().sum();
}

template <typename Derived>
bool columns_normalized(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& policy = {})
{
    const auto norms = column_norms(a);
    for (Eigen::Index k = 0; k < norms.size(); ++k)
        if (std::abs(norms(k) - 1) > policy.rel_tol)
            return false;
    return true;
}

/// Throws PreconditionError naming the column furthest from unit norm.
template <typename Derived>
void require_normalized_columns(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& policy = {})
{
    const auto norms = column_norms(a);
    Eigen::Index worst = 0;
    double worst_dev = -1;
    for (Eigen::Index k = 0; k < norms.size(); ++k) {
        const double dev = std::abs(static_cast<double>(norms(k)) - 1.0);
        if (dev > worst_dev) {
            worst_dev = dev;
            worst = k;
        }
    }
    if (worst_dev > policy.rel_tol)
        throw PreconditionError("column " + std::to_string(worst) + " is not l2-normalized (norm " +
                                    std::to_string(static_cast<double>(norms(worst))) + ")",
                                worst);
}

namespace detail {

template <typename Scalar>
struct PowerRun {
    Scalar lambda{};
    Scalar residual{};
    std::size_t iterations = 0;
    bool converged = false;
};

template <typename Scalar>
PowerRun<Scalar> power_iterate(const Matrix<Scalar>& hermitian, Vector<Scalar> v,
                               const PowerIterationOptions& opt)
{
    PowerRun<Scalar> run;
    Scalar prev = 0;
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        const Vector<Scalar> w = hermitian * v;
        const Scalar lambda = std::real(v.dot(w));  // v normalized, dot conjugates v
        run.residual = (w - lambda * v).norm();
        run.lambda = lambda;
        run.iterations = it;
        const Scalar wn = w.norm();
        if (wn == 0 || lambda <= 0) {
            // v lies in the null space; lambda is exactly zero along it.
            run.lambda = 0;
            run.residual = 0;
            run.converged = true;
            return run;
        }
        if (run.residual <= opt.residual_tol * lambda ||
            (it > 1 && std::abs(lambda - prev) <= opt.rel_change_tol * lambda)) {
            run.converged = true;
            return run;
        }
        prev = lambda;
        v = w / wn;
    }
    return run;
}

}  // namespace detail

/// Largest singular value by power iteration on A*A.
///
/// The run from the normalized all-ones vector is always paired with one run
/// from a seeded pseudo-random start: the all-ones start is orthogonal to the
/// top eigenvector for every matrix with zero row sums, and that case is not
/// visible from the converged value alone. The larger eigenvalue wins.
template <typename Derived>
SpectralEstimate<typename Derived::RealScalar> spectral(const Eigen::MatrixBase<Derived>& a,
                                                        const PowerIterationOptions& opt = {})
{
    using Real = typename Derived::RealScalar;
    validate_matrix(a);
    const Eigen::Index n = a.cols();
    const Matrix<Real> ata = a.adjoint() * a;

    Vector<Real> ones = Vector<Real>::Ones(n) / std::sqrt(static_cast<Real>(n));
    auto first = detail::power_iterate<Real>(ata, ones, opt);

    Rng rng(Seed{opt.restart_seed});
    Vector<Real> start(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto [re, im] = rng.normal_pair();
        start(k) = Complex<Real>(static_cast<Real>(re), static_cast<Real>(im));
    }
    start /= start.norm();
    auto second = detail::power_iterate<Real>(ata, start, opt);

    if (!first.converged && !second.converged)
        throw NumericalError("power iteration did not converge after " +
                                 std::to_string(opt.max_iterations) + " iterations",
                             static_cast<double>(std::min(first.residual, second.residual)));
    const auto& best = !first.converged ? second
                     : !second.converged ? first
                     : (second.lambda > first.lambda ? second : first);

    SpectralEstimate<Real> est;
    est.lambda_max = best.lambda;
    est.sigma_max = std::sqrt(best.lambda);
    est.iterations = first.iterations + second.iterations;
    est.residual = best.residual;
    return est;
}

/// Lower bound on the coherence of any m x n matrix with unit columns.
inline double welch_bound(std::size_t m, std::size_t n)
{
    if (n < 2)
        throw DomainError("Welch bound needs n >= 2");
    if (m < 1 || m > n)
        throw DomainError("Welch bound needs 1 <= m <= n, got m=" + std::to_string(m) +
                          " n=" + std::to_string(n));
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return std::sqrt((nn - mm) / (mm * (nn - 1)));
}

/// Maximum |<a_i, a_k>| over distinct columns, with the lexicographically
/// smallest maximizing pair.
template <typename Derived>
CoherenceReport<typename Derived::RealScalar> coherence(const Eigen::MatrixBase<Derived>& a,
                                                        const TolerancePolicy& policy = {})
{
    using Real = typename Derived::RealScalar;
    validate_matrix(a);
    if (a.cols() < 2)
        throw DomainError("coherence needs at least two columns");
    require_normalized_columns(a, policy);

    const Matrix<Real> g = gram(a);
    CoherenceReport<Real> r;
    r.mu = -1;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index k = i + 1; k < g.cols(); ++k) {
            const Real v = std::abs(g(i, k));
            if (v > r.mu) {
                r.mu = v;
                r.argmax_pair = {i, k};
            }
        }
    r.welch = static_cast<Real>(welch_bound(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols())));
    r.slack = r.mu - r.welch;
    return r;
}

template <typename Derived>
Matrix<typename Derived::RealScalar> normalize_columns(const Eigen::MatrixBase<Derived>& a)
{
    using Real = typename Derived::RealScalar;
    validate_matrix(a);
    Matrix<Real> out = a;
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
        const Real norm = out.col(k).norm();
        if (norm == 0)
            throw DomainError("column " + std::to_string(k) + " is zero and cannot be normalized");
        out.col(k) /= norm;
    }
    return out;
}

/// Unit columns, equal off-diagonal Gram magnitudes, and AA* = (n/m) I.
template <typename Derived>
EtfVerdict<typename Derived::RealScalar> etf_check(const Eigen::MatrixBase<Derived>& a,
                                                   const TolerancePolicy& policy = {},
                                                   double structure_tol = etf_default_tol)
{
    using Real = typename Derived::RealScalar;
    validate_matrix(a);
    if (a.cols() < 2)
        throw DomainError("ETF check needs at least two columns");

    EtfVerdict<Real> v;
    v.columns_normalized = columns_normalized(a, policy);

    const Matrix<Real> g = gram(a);
    Real lo = std::numeric_limits<Real>::infinity();
    Real hi = 0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index k = 0; k < g.cols(); ++k) {
            if (i == k)
                continue;
            const Real mag = std::abs(g(i, k));
            lo = std::min(lo, mag);
            hi = std::max(hi, mag);
        }
    v.equiangular_spread = hi - lo;

    const Real frame_bound = static_cast<Real>(a.cols()) / static_cast<Real>(a.rows());
    Matrix<Real> frame = a * a.adjoint();
    frame.diagonal().array() -= frame_bound;
    v.tightness_residual = frame.cwiseAbs().maxCoeff();

    v.is_etf = v.columns_normalized && v.equiangular_spread <= structure_tol &&
               v.tightness_residual <= structure_tol;
    return v;
}

}  // namespace cohere

#endif  // COHERE_MATRIX_METRICS_HPP
