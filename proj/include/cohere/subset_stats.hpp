// The subset-sum random variable: the sum of m elements drawn uniformly
// without replacement from a complex multiset.
//
// Closed forms depend only on N, m, sum(z) and sum(|z|^2). The enumeration
// routines are exact over all C(N, m) index subsets and double as the
// reference for the closed forms; the sampler gives Monte Carlo estimates.
#ifndef COHERE_SUBSET_STATS_HPP
#define COHERE_SUBSET_STATS_HPP

#include "cohere/core.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

namespace cohere {

template <typename Scalar>
struct MomentReport {
    Complex<Scalar> mean{};
    Scalar variance{};
    Scalar second_abs_moment{};
};

template <typename Scalar>
struct PmfAtom {
    Complex<Scalar> value{};
    std::uint64_t count = 0;
};

template <typename Scalar>
struct Pmf {
    std::vector<PmfAtom<Scalar>> atoms;  // lexicographic in (re, im)
    std::uint64_t total = 0;             // C(N, m)

    double probability(std::size_t i) const
    {
        return static_cast<double>(atoms[i].count) / static_cast<double>(total);
    }
};

template <typename Scalar>
struct SampleStats {
    std::uint64_t draws = 0;
    Complex<Scalar> sample_mean{};
    Scalar sample_variance{};  // unbiased (K - 1 denominator); 0 when K = 1
    Scalar sample_second_abs_moment{};
};

inline constexpr std::uint64_t default_enumeration_cap = 10'000'000;
/// Subset sums closer than this in both components share one PMF atom.
inline constexpr double pmf_merge_tol = 1e-9;

/// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

namespace detail {

inline void require_subset_size(std::size_t n, std::size_t m)
{
    if (m < 1 || m > n)
        throw DomainError("subset size m=" + std::to_string(m) + " must satisfy 1 <= m <= N=" +
                          std::to_string(n));
}

inline std::uint64_t require_enumerable(std::size_t n, std::size_t m, std::uint64_t cap)
{
    require_subset_size(n, m);
    const std::uint64_t total = binomial(n, m);
    if (total > cap)
        throw ResourceError("enumeration of C(" + std::to_string(n) + ", " + std::to_string(m) +
                            ") subsets exceeds the cap of " + std::to_string(cap));
    return total;
}

/// Visits every m-subset of {0..n-1} in lexicographic order, passing the
/// subset sum (index-ascending left-to-right addition).
template <typename Scalar, typename Visit>
void for_each_subset_sum(const Multiset<Scalar>& phi, std::size_t m, Visit&& visit)
{
    const std::size_t n = phi.size();
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i)
        idx[i] = i;
    while (true) {
        Complex<Scalar> s{};
        for (std::size_t i : idx)
            s += phi[i];
        visit(s);

        std::size_t pos = m;
        while (pos > 0 && idx[pos - 1] == n - m + pos - 1)
            --pos;
        if (pos == 0)
            return;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < m; ++i)
            idx[i] = idx[i - 1] + 1;
    }
}

template <typename Scalar>
Scalar clamp_nonnegative(Scalar v)
{
    return v < Scalar(0) ? Scalar(0) : v;
}

}  // namespace detail

/// Exact mean, variance and E|X|^2 of X(m, phi). N = 1 is the point mass at z_1.
template <typename Scalar>
MomentReport<Scalar> closed_form_moments(const Multiset<Scalar>& phi, std::size_t m)
{
    const std::size_t n_elems = phi.size();
    detail::require_subset_size(n_elems, m);
    const Scalar n = static_cast<Scalar>(n_elems);
    const Scalar mm = static_cast<Scalar>(m);
    const Complex<Scalar> s = phi.sum();
    const Scalar q = phi.sum_abs_sq();

    MomentReport<Scalar> r;
    r.mean = (mm / n) * s;
    if (n_elems == 1) {
        r.variance = 0;
        r.second_abs_moment = q;
        return r;
    }
    r.variance = detail::clamp_nonnegative(mm * (n - mm) / (n * n * (n - 1)) * (n * q - abs_sq(s)));
    r.second_abs_moment = mm / (n * (n - 1)) * ((n - mm) * q + (mm - 1) * abs_sq(s));
    return r;
}

/// Variance through the sum of squared pairwise distances.
template <typename Scalar>
Scalar variance_pairwise(const Multiset<Scalar>& phi, std::size_t m)
{
    const std::size_t n_elems = phi.size();
    if (n_elems < 2)
        throw DomainError("pairwise variance needs N >= 2");
    detail::require_subset_size(n_elems, m);
    CompensatedSum<Scalar> acc;
    for (std::size_t i = 0; i < n_elems; ++i)
        for (std::size_t k = i + 1; k < n_elems; ++k)
            acc.add(abs_sq(phi[i] - phi[k]));
    const Scalar n = static_cast<Scalar>(n_elems);
    const Scalar mm = static_cast<Scalar>(m);
    return mm * (n - mm) / (n * n * (n - 1)) * acc.value();
}

/// Moments of X(m, phi) / m, the mean of the m drawn elements.
template <typename Scalar>
MomentReport<Scalar> scaled_mean_moments(const Multiset<Scalar>& phi, std::size_t m)
{
    const auto base = closed_form_moments(phi, m);
    const Scalar mm = static_cast<Scalar>(m);
    MomentReport<Scalar> r;
    r.mean = phi.sum() / static_cast<Scalar>(phi.size());
    if (phi.size() == 1) {
        r.variance = 0;
    } else {
        const Scalar n = static_cast<Scalar>(phi.size());
        r.variance = detail::clamp_nonnegative((n - mm) / (mm * n * n * (n - 1)) *
                                               (n * phi.sum_abs_sq() - abs_sq(phi.sum())));
    }
    r.second_abs_moment = base.second_abs_moment / (mm * mm);
    return r;
}

/// Exact distribution of X(m, phi). Sums are grouped when both components
/// agree within pmf_merge_tol, scanning in lexicographic (re, im) order; an
/// atom's value is the first (smallest) sum of its group.
template <typename Scalar>
Pmf<Scalar> enumerate_pmf(const Multiset<Scalar>& phi, std::size_t m,
                          std::uint64_t cap = default_enumeration_cap)
{
    const std::uint64_t total = detail::require_enumerable(phi.size(), m, cap);

    std::vector<Complex<Scalar>> sums;
    sums.reserve(static_cast<std::size_t>(total));
    detail::for_each_subset_sum(phi, m, [&](const Complex<Scalar>& s) { sums.push_back(s); });
    std::sort(sums.begin(), sums.end(), [](const auto& a, const auto& b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });

    Pmf<Scalar> pmf;
    pmf.total = total;
    // Atoms whose representative real part is still within reach of the
    // current sum, keyed by imaginary part.
    std::multimap<Scalar, std::size_t> active;
    std::deque<std::size_t> window;
    const Scalar tol = static_cast<Scalar>(pmf_merge_tol);
    for (const auto& s : sums) {
        while (!window.empty() && pmf.atoms[window.front()].value.real() < s.real() - tol) {
            const std::size_t gone = window.front();
            window.pop_front();
            auto [lo, hi] = active.equal_range(pmf.atoms[gone].value.imag());
            for (auto it = lo; it != hi; ++it)
                if (it->second == gone) {
                    active.erase(it);
                    break;
                }
        }
        auto it = active.lower_bound(s.imag() - tol);
        if (it != active.end() && it->first <= s.imag() + tol) {
            ++pmf.atoms[it->second].count;
            continue;
        }
        pmf.atoms.push_back({s, 1});
        const std::size_t id = pmf.atoms.size() - 1;
        active.emplace(s.imag(), id);
        window.push_back(id);
    }
    return pmf;
}

/// Moments by direct averaging over all C(N, m) subset sums.
template <typename Scalar>
MomentReport<Scalar> brute_force_moments(const Multiset<Scalar>& phi, std::size_t m,
                                         std::uint64_t cap = default_enumeration_cap)
{
    const std::uint64_t total = detail::require_enumerable(phi.size(), m, cap);
    const Scalar count = static_cast<Scalar>(total);

    CompensatedSum<Complex<Scalar>> sum;
    CompensatedSum<Scalar> sum_sq;
    detail::for_each_subset_sum(phi, m, [&](const Complex<Scalar>& s) {
        sum.add(s);
        sum_sq.add(abs_sq(s));
    });
    MomentReport<Scalar> r;
    r.mean = sum.value() / count;
    r.second_abs_moment = sum_sq.value() / count;

    // Second pass about the mean keeps the variance free of cancellation.
    CompensatedSum<Scalar> dev;
    detail::for_each_subset_sum(phi, m, [&](const Complex<Scalar>& s) { dev.add(abs_sq(s - r.mean)); });
    r.variance = dev.value() / count;
    return r;
}

namespace detail {

/// Welford accumulation over complex draws; exact zero variance for constant input.
template <typename Scalar>
class DrawAccumulator {
public:
    void add(const Complex<Scalar>& x)
    {
        ++k_;
        const Complex<Scalar> delta = x - mean_;
        mean_ += delta / static_cast<Scalar>(k_);
        m2_ += std::real(delta * std::conj(x - mean_));
        sq_.add(abs_sq(x));
    }

    SampleStats<Scalar> stats() const
    {
        SampleStats<Scalar> s;
        s.draws = k_;
        s.sample_mean = mean_;
        s.sample_variance = k_ > 1 ? clamp_nonnegative(m2_ / static_cast<Scalar>(k_ - 1)) : Scalar(0);
        s.sample_second_abs_moment = sq_.value() / static_cast<Scalar>(k_);
        return s;
    }

private:
    std::uint64_t k_ = 0;
    Complex<Scalar> mean_{};
    Scalar m2_{};
    CompensatedSum<Scalar> sq_;
};

}  // namespace detail

/// K seeded draws of X(m, phi). Draw d uses substream (seed, d).
template <typename Scalar>
SampleStats<Scalar> sample_sum(const Multiset<Scalar>& phi, std::size_t m, Seed seed, std::uint64_t k)
{
    if (k == 0)
        throw DomainError("number of draws must be positive");
    detail::require_subset_size(phi.size(), m);
    detail::DrawAccumulator<Scalar> acc;
    for (std::uint64_t d = 0; d < k; ++d) {
        Rng rng(seed, d);
        auto picked = draw_without_replacement(rng, phi.size(), m);
        std::sort(picked.begin(), picked.end());
        Complex<Scalar> s{};
        for (std::size_t i : picked)
            s += phi[i];
        acc.add(s);
    }
    return acc.stats();
}

}  // namespace cohere

#endif  // COHERE_SUBSET_STATS_HPP
