// Shared numeric types, error hierarchy, tolerance policy and the seeded
// random stream used throughout the library.
#ifndef COHERE_CORE_HPP
#define COHERE_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cohere {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// Dense complex matrix, row-major like the on-disk format.
template <typename Scalar>
using Matrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

using ComplexD = Complex<double>;
using MatrixD = Matrix<double>;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition on the data (e.g. unit-norm columns) failed.
class PreconditionError : public Error {
public:
    PreconditionError(const std::string& what, std::ptrdiff_t index = -1)
        : Error(what), index_(index) {}
    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

/// Work bound exceeded (enumeration cap).
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Iterative method failed to converge.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// ---------------------------------------------------------------------------
// Tolerances

struct TolerancePolicy {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;

    void validate() const
    {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || abs_tol > rel_tol)
            throw DomainError("tolerance policy requires 0 < abs_tol <= rel_tol");
    }

    /// |a - b| <= max(abs_tol, rel_tol * max(|a|, |b|))
    template <typename T>
    bool close(const T& a, const T& b) const
    {
        using std::abs;
        const double scale = std::max<double>(abs(a), abs(b));
        return abs(a - b) <= std::max(abs_tol, rel_tol * scale);
    }
};

template <typename Scalar>
bool is_finite(const Complex<Scalar>& z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// re^2 + im^2 without the square root of std::abs.
template <typename Scalar>
constexpr Scalar abs_sq(const Complex<Scalar>& z)
{
    return z.real() * z.real() + z.imag() * z.imag();
}

/// Neumaier-compensated running sum.
template <typename T>
class CompensatedSum {
public:
    void add(const T& x)
    {
        if constexpr (std::is_floating_point_v<T>) {
            add_real(sum_, comp_, x);
        } else {
            auto re = sum_.real(), ci = comp_.real();
            auto im = sum_.imag(), cj = comp_.imag();
            add_real(re, ci, x.real());
            add_real(im, cj, x.imag());
            sum_ = T(re, im);
            comp_ = T(ci, cj);
        }
    }
    T value() const { return sum_ + comp_; }

private:
    template <typename R>
    static void add_real(R& sum, R& comp, R x)
    {
        const R t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    T sum_{};
    T comp_{};
};

// ---------------------------------------------------------------------------
// Randomness

struct Seed {
    std::uint64_t value = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic 64-bit stream. Only the raw engine output is used;
/// the integer and normal transforms below are ours so results do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(Seed seed) : engine_(splitmix64(seed.value)) {}

    /// Independent substream for the given counter (one per Monte Carlo draw).
    Rng(Seed seed, std::uint64_t counter)
        : engine_(splitmix64(splitmix64(seed.value) ^ splitmix64(counter + 0x632be59bd9b4e019ULL)))
    {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound), unbiased by rejection.
    std::uint64_t uniform_index(std::uint64_t bound)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform double in (0, 1].
    double uniform_open_closed() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Pair of independent standard normals by Box-Muller.
    std::pair<double, double> normal_pair()
    {
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double u1 = uniform_open_closed();
        const double u2 = uniform_open_closed();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

private:
    std::mt19937_64 engine_;
};

/// Partial Fisher-Yates over 0..n-1: the first m entries of the result form a
/// uniformly random m-subset, in draw order.
inline std::vector<std::size_t> draw_without_replacement(Rng& rng, std::size_t n, std::size_t m)
{
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    for (std::size_t t = 0; t < m; ++t) {
        const std::size_t j = t + static_cast<std::size_t>(rng.uniform_index(n - t));
        std::swap(idx[t], idx[j]);
    }
    idx.resize(m);
    return idx;
}

// ---------------------------------------------------------------------------
// Multiset

/// Ordered list of complex values with multiplicity kept positionally, plus
/// the two aggregates every closed form needs.
template <typename Scalar>
class Multiset {
public:
    explicit Multiset(std::vector<Complex<Scalar>> values) : elements_(std::move(values))
    {
        if (elements_.empty())
            throw DomainError("multiset must contain at least one element");
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (!is_finite(elements_[i]))
                throw DomainError("multiset element " + std::to_string(i) + " is not finite");
            sum_ += elements_[i];
            sum_abs_sq_ += abs_sq(elements_[i]);
        }
    }

    std::size_t size() const noexcept { return elements_.size(); }
    std::span<const Complex<Scalar>> elements() const noexcept { return elements_; }
    const Complex<Scalar>& operator[](std::size_t i) const { return elements_[i]; }
    Complex<Scalar> sum() const noexcept { return sum_; }
    Scalar sum_abs_sq() const noexcept { return sum_abs_sq_; }

private:
    std::vector<Complex<Scalar>> elements_;
    Complex<Scalar> sum_{};
    Scalar sum_abs_sq_{};
};

template <typename Scalar>
Multiset<Scalar> multiset_from_values(std::vector<Complex<Scalar>> values)
{
    return Multiset<Scalar>(std::move(values));
}

// ---------------------------------------------------------------------------
// Matrix checks

/// Rejects empty matrices and non-finite entries.
template <typename Derived>
void validate_matrix(const Eigen::MatrixBase<Derived>& a)
{
    if (a.rows() < 1 || a.cols() < 1)
        throw DomainError("matrix must have at least one row and one column");
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            if (!is_finite(a(i, k)))
                throw DomainError("matrix entry (" + std::to_string(i) + ", " + std::to_string(k) +
                                  ") is not finite");
}

/// 1 <= m <= n, as required by every analysis operation.
template <typename Derived>
void require_wide(const Eigen::MatrixBase<Derived>& a)
{
    validate_matrix(a);
    if (a.rows() > a.cols())
        throw DomainError("analysis requires rows <= columns, got " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()));
}

}  // namespace cohere

#endif  // COHERE_CORE_HPP
