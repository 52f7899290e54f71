#include "cohere/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace cohere;

TEST(Multiset, FourthRootsOfUnity)
{
    const auto phi = multiset_from_values<double>({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    EXPECT_EQ(phi.size(), 4u);
    EXPECT_EQ(phi.sum(), ComplexD(0, 0));
    EXPECT_DOUBLE_EQ(phi.sum_abs_sq(), 4.0);
}

TEST(Multiset, ZeroAndConjugatePair)
{
    const auto zero = multiset_from_values<double>({{0, 0}});
    EXPECT_EQ(zero.sum(), ComplexD(0, 0));
    EXPECT_EQ(zero.sum_abs_sq(), 0.0);

    const auto pair = multiset_from_values<double>({{1, 1}, {1, -1}});
    EXPECT_EQ(pair.sum(), ComplexD(2, 0));
    EXPECT_DOUBLE_EQ(pair.sum_abs_sq(), 4.0);
}

TEST(Multiset, KeepsMultiplicityAndOrder)
{
    const auto phi = multiset_from_values<double>({{1, 0}, {1, 0}, {2, 0}});
    ASSERT_EQ(phi.size(), 3u);
    EXPECT_EQ(phi[0], phi[1]);
    EXPECT_EQ(phi[2], ComplexD(2, 0));
}

TEST(Multiset, RejectsEmptyAndNonFinite)
{
    EXPECT_THROW(multiset_from_values<double>({}), DomainError);
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(multiset_from_values<double>({{1, 0}, {inf, 0}}), DomainError);
    EXPECT_THROW(multiset_from_values<double>({{0, nan}}), DomainError);
}

TEST(Multiset, CachedAggregatesMatchRefold)
{
    const TolerancePolicy tol;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(Seed{s});
        const std::size_t n = 1 + rng.uniform_index(20);
        std::vector<ComplexD> v;
        for (std::size_t i = 0; i < n; ++i) {
            auto [re, im] = rng.normal_pair();
            v.emplace_back(re * 10, im * 10);
        }
        const auto phi = multiset_from_values(v);
        ComplexD sum = 0;
        long double sq = 0;
        for (const auto& z : v) {
            sum += z;
            sq += std::norm(std::complex<long double>(z.real(), z.imag()));
        }
        EXPECT_NEAR(phi.sum().real(), sum.real(), tol.abs_tol);
        EXPECT_NEAR(phi.sum().imag(), sum.imag(), tol.abs_tol);
        EXPECT_TRUE(tol.close(phi.sum_abs_sq(), static_cast<double>(sq)));
    }
}

TEST(AbsSq, Examples)
{
    EXPECT_EQ(abs_sq(ComplexD(3, 4)), 25.0);
    EXPECT_EQ(abs_sq(ComplexD(0, 0)), 0.0);
    const double pi = 3.14159265358979323846;
    EXPECT_NEAR(abs_sq(std::polar(1.0, -2 * pi / 8)), 1.0, 1e-15);
}

TEST(AbsSq, ScalesByModulusSquared)
{
    const TolerancePolicy tol;
    Rng rng(Seed{42});
    for (int t = 0; t < 500; ++t) {
        auto [a, b] = rng.normal_pair();
        auto [c, d] = rng.normal_pair();
        const ComplexD c1(a, b), z(c, d);
        EXPECT_TRUE(tol.close(abs_sq(c1 * z), abs_sq(c1) * abs_sq(z)));
    }
}

TEST(TolerancePolicy, Validation)
{
    EXPECT_NO_THROW(TolerancePolicy{}.validate());
    EXPECT_THROW((TolerancePolicy{0.0, 1e-9}.validate()), DomainError);
    EXPECT_THROW((TolerancePolicy{1e-6, 1e-9}.validate()), DomainError);
    EXPECT_THROW((TolerancePolicy{1e-12, -1.0}.validate()), DomainError);
}

TEST(CompensatedSum, RecoversCancelledDigits)
{
    CompensatedSum<double> acc;
    acc.add(1e16);
    for (int i = 0; i < 10; ++i)
        acc.add(1.0);
    acc.add(-1e16);
    EXPECT_EQ(acc.value(), 10.0);
}

TEST(Rng, SameSeedSameStream)
{
    Rng a(Seed{7}), b(Seed{7}), c(Seed{8});
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        differs |= x != c.next();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, SubstreamsDifferByCounter)
{
    Rng a(Seed{7}, 0), b(Seed{7}, 1), a2(Seed{7}, 0);
    EXPECT_NE(a.next(), b.next());
    Rng a3(Seed{7}, 0);
    EXPECT_EQ(a2.next(), a3.next());
}

TEST(Rng, UniformIndexCoversRange)
{
    Rng rng(Seed{1});
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i)
        ++hits[rng.uniform_index(7)];
    for (int h : hits)
        EXPECT_GT(h, 800);
}

TEST(Rng, DrawWithoutReplacementIsASubset)
{
    Rng rng(Seed{3});
    for (int t = 0; t < 100; ++t) {
        const auto picked = draw_without_replacement(rng, 10, 4);
        ASSERT_EQ(picked.size(), 4u);
        std::set<std::size_t> unique(picked.begin(), picked.end());
        EXPECT_EQ(unique.size(), 4u);
        EXPECT_LT(*unique.rbegin(), 10u);
    }
}

TEST(Matrix, ValidateAndShape)
{
    MatrixD a(2, 3);
    a.setZero();
    EXPECT_NO_THROW(validate_matrix(a));
    EXPECT_NO_THROW(require_wide(a));
    EXPECT_THROW(require_wide(MatrixD(a.transpose())), DomainError);
    a(1, 2) = ComplexD(std::numeric_limits<double>::quiet_NaN(), 0);
    EXPECT_THROW(validate_matrix(a), DomainError);
    EXPECT_THROW(validate_matrix(MatrixD(0, 0)), DomainError);
}
