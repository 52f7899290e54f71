#include "cohere/fourier.hpp"
#include "cohere/matrix_metrics.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace cohere;

namespace {

MatrixD rank_one(std::size_t m, std::size_t n, std::uint64_t seed)
{
    const MatrixD u = random_matrix(m, 1, Seed{seed}, false);
    const MatrixD v = random_matrix(1, n, Seed{seed + 1}, false);
    return u * v;
}

}  // namespace

TEST(Frobenius, Examples)
{
    EXPECT_NEAR(frobenius_norm(MatrixD::Identity(2, 2)), std::sqrt(2.0), 1e-15);
    MatrixD row(1, 2);
    row << ComplexD(3, 0), ComplexD(4, 0);
    EXPECT_NEAR(frobenius_norm(row), 5.0, 1e-15);
    for (std::size_t n : {1u, 4u, 9u, 32u})
        EXPECT_NEAR(frobenius_norm(dft_matrix(n)), std::sqrt(double(n)), 1e-12);
}

TEST(Frobenius, EqualsRootTraceOfAAstar)
{
    for (std::uint64_t s = 0; s < 100; ++s) {
        const MatrixD a = random_matrix(1 + s % 5, 1 + s % 7, Seed{s}, false);
        const double via_trace = std::sqrt(std::real((a * a.adjoint()).trace()));
        EXPECT_NEAR(frobenius_norm(a), via_trace, 1e-9 * via_trace);
    }
}

TEST(Gram, Examples)
{
    const MatrixD q = dft_matrix(5);
    EXPECT_LE((gram(q) - MatrixD::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);

    MatrixD dup(2, 2);
    dup << ComplexD(0.6, 0), ComplexD(0.6, 0), ComplexD(0, 0.8), ComplexD(0, 0.8);
    EXPECT_NEAR(std::abs(gram(dup)(0, 1)), 1.0, 1e-15);

    const MatrixD mb = oracle::mercedes_benz();
    const MatrixD g = gram(mb);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            if (i != k) {
                EXPECT_NEAR(std::abs(g(i, k)), 0.5, 1e-15);
            }
}

TEST(Gram, ConventionAndHermitian)
{
    const MatrixD a = random_matrix(3, 4, Seed{9}, false);
    const MatrixD g = gram(a);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            ComplexD ip = 0;
            for (int r = 0; r < 3; ++r)
                ip += a(r, i) * std::conj(a(r, k));
            EXPECT_NEAR(std::abs(g(i, k) - ip), 0.0, 1e-13);
            EXPECT_NEAR(std::abs(g(i, k) - std::conj(g(k, i))), 0.0, 1e-13);
        }
}

TEST(Spectral, Examples)
{
    MatrixD d = MatrixD::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = 1;
    EXPECT_NEAR(spectral(d).sigma_max, 3.0, 1e-12);

    MatrixD r1(2, 2);
    r1 << 1.0, 2.0, 2.0, 4.0;
    const auto est = spectral(r1);
    EXPECT_NEAR(est.sigma_max, 5.0, 1e-12);
    EXPECT_NEAR(est.sigma_max, frobenius_norm(r1), 1e-12);

    for (std::size_t n : {2u, 8u, 16u})
        EXPECT_NEAR(spectral(dft_matrix(n)).sigma_max, 1.0, 1e-10);
}

TEST(Spectral, TopEigenvectorOrthogonalToOnes)
{
    // Row sums vanish, so the all-ones start lies in the null space of A.
    MatrixD a(1, 2);
    a << 1.0, -1.0;
    EXPECT_NEAR(spectral(a).sigma_max, std::sqrt(2.0), 1e-12);

    MatrixD b = random_matrix(3, 6, Seed{31}, false);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        b.row(i).array() -= b.row(i).sum() / double(b.cols());
    EXPECT_NEAR(spectral(b).lambda_max, oracle::largest_eigenvalue_ata(b), 1e-9 * oracle::largest_eigenvalue_ata(b));
}

TEST(Spectral, ZeroMatrix)
{
    const auto est = spectral(MatrixD::Zero(3, 4));
    EXPECT_EQ(est.sigma_max, 0.0);
    EXPECT_EQ(est.lambda_max, 0.0);
}

TEST(Spectral, MatchesSelfAdjointSolver)
{
    for (std::uint64_t s = 0; s < 100; ++s) {
        const MatrixD a = random_matrix(1 + s % 6, 2 + s % 9, Seed{100 + s}, s % 2 == 0);
        const auto est = spectral(a);
        const double ref = oracle::largest_eigenvalue_ata(a);
        EXPECT_NEAR(est.lambda_max, ref, 1e-9 * ref);
        EXPECT_NEAR(est.sigma_max * est.sigma_max, est.lambda_max, 1e-12 * est.lambda_max);
        EXPECT_LE(est.sigma_max, frobenius_norm(a) + 1e-12);
    }
}

TEST(Spectral, AdjointInvariance)
{
    for (std::uint64_t s = 0; s < 50; ++s) {
        const MatrixD a = random_matrix(2 + s % 4, 3 + s % 5, Seed{700 + s}, false);
        const double s1 = spectral(a).sigma_max;
        const double s2 = spectral(MatrixD(a.adjoint())).sigma_max;
        EXPECT_NEAR(s1, s2, 1e-9 * s1);
    }
}

TEST(Spectral, RankOneEqualsFrobenius)
{
    for (std::uint64_t s = 0; s < 50; ++s) {
        const MatrixD a = rank_one(2 + s % 4, 3 + s % 6, 2 * s + 1);
        const double f = frobenius_norm(a);
        EXPECT_NEAR(spectral(a).sigma_max, f, 1e-9 * f);
    }
}

TEST(Spectral, IterationCapRaisesNumericalError)
{
    PowerIterationOptions opt;
    opt.max_iterations = 1;
    const MatrixD a = random_matrix(4, 6, Seed{5}, false);
    try {
        spectral(a, opt);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(Welch, Examples)
{
    EXPECT_NEAR(welch_bound(2, 4), std::sqrt(1.0 / 3.0), 1e-15);
    EXPECT_NEAR(welch_bound(2, 4), 0.5773503, 1e-7);
    for (std::size_t n = 2; n < 20; ++n) {
        EXPECT_EQ(welch_bound(n, n), 0.0);
        EXPECT_EQ(welch_bound(1, n), 1.0);
    }
    EXPECT_THROW(welch_bound(5, 4), DomainError);
    EXPECT_THROW(welch_bound(1, 1), DomainError);
    EXPECT_THROW(welch_bound(0, 4), DomainError);
}

TEST(Coherence, SquareOrthonormal)
{
    const auto r = coherence(MatrixD::Identity(4, 4));
    EXPECT_EQ(r.mu, 0.0);
    EXPECT_EQ(r.welch, 0.0);
    EXPECT_EQ(r.slack, 0.0);
    EXPECT_EQ(r.argmax_pair, std::make_pair(Eigen::Index(0), Eigen::Index(1)));
}

TEST(Coherence, MercedesBenzMeetsWelch)
{
    const auto r = coherence(MatrixD(oracle::mercedes_benz()));
    EXPECT_NEAR(r.mu, 0.5, 1e-15);
    EXPECT_NEAR(r.welch, 0.5, 1e-15);
    EXPECT_NEAR(r.slack, 0.0, 1e-12);
}

TEST(Coherence, DuplicatedColumn)
{
    MatrixD a = random_matrix(3, 5, Seed{4}, true);
    a.col(3) = a.col(1);
    const auto r = coherence(a);
    EXPECT_NEAR(r.mu, 1.0, 1e-12);
    EXPECT_EQ(r.argmax_pair, std::make_pair(Eigen::Index(1), Eigen::Index(3)));
}

TEST(Coherence, MatchesOracleAndWelch)
{
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t m = 2 + s % 3, n = m + 1 + s % 6;
        const MatrixD a = random_matrix(m, n, Seed{s}, true);
        const auto r = coherence(a);
        EXPECT_NEAR(r.mu, oracle::max_offdiag_gram(a), 1e-14);
        EXPECT_GE(r.slack, -1e-12);
        EXPECT_LE(r.mu, 1.0 + 1e-9);
    }
}

TEST(Coherence, Errors)
{
    MatrixD a = random_matrix(2, 4, Seed{3}, true);
    a.col(2) *= 1.5;
    try {
        coherence(a);
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError& e) {
        EXPECT_EQ(e.index(), 2);
        EXPECT_NE(std::string(e.what()).find("column 2"), std::string::npos);
    }
    EXPECT_THROW(coherence(MatrixD::Ones(1, 1)), DomainError);
}

TEST(NormalizeColumns, Examples)
{
    MatrixD a(2, 1);
    a << 2.0, 0.0;
    const MatrixD u = normalize_columns(a);
    EXPECT_EQ(u(0, 0), ComplexD(1, 0));
    EXPECT_EQ(u(1, 0), ComplexD(0, 0));

    const MatrixD b = random_matrix(3, 5, Seed{8}, true);
    EXPECT_LE((normalize_columns(b) - b).cwiseAbs().maxCoeff(), 1e-15);

    const MatrixD f = normalize_columns(partial_fourier(PartialFourierSpec(8, {1, 4, 6})));
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        for (Eigen::Index k = 0; k < f.cols(); ++k)
            EXPECT_NEAR(std::abs(f(i, k)), 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(NormalizeColumns, ZeroColumn)
{
    MatrixD a = MatrixD::Ones(2, 3);
    a.col(1).setZero();
    try {
        normalize_columns(a);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
    }
}

TEST(Etf, MercedesBenz)
{
    const auto v = etf_check(MatrixD(oracle::mercedes_benz()));
    EXPECT_TRUE(v.is_etf);
    EXPECT_TRUE(v.columns_normalized);
    EXPECT_LE(v.equiangular_spread, 1e-15);
    EXPECT_LE(v.tightness_residual, 1e-15);
}

TEST(Etf, SquareOrthonormal)
{
    EXPECT_TRUE(etf_check(dft_matrix(6)).is_etf);
    EXPECT_TRUE(etf_check(MatrixD::Identity(3, 3)).is_etf);
}

TEST(Etf, PerturbedFrameIsNot)
{
    const auto v = etf_check(MatrixD(oracle::mercedes_benz(5.0)));
    EXPECT_FALSE(v.is_etf);
    EXPECT_TRUE(v.columns_normalized);
    EXPECT_GT(v.equiangular_spread, 1e-3);
}

TEST(Etf, UnnormalizedIsNot)
{
    const MatrixD a = 2.0 * MatrixD(oracle::mercedes_benz());
    const auto v = etf_check(a);
    EXPECT_FALSE(v.columns_normalized);
    EXPECT_FALSE(v.is_etf);
}

TEST(Etf, ImpliesWelchEquality)
{
    const std::vector<MatrixD> frames{MatrixD(oracle::mercedes_benz()), dft_matrix(4), MatrixD::Identity(2, 2),
                                      normalize_columns(partial_fourier(PartialFourierSpec(7, {1, 2, 4})))};
    for (const auto& a : frames) {
        const auto v = etf_check(a);
        EXPECT_TRUE(v.is_etf);
        EXPECT_LE(coherence(a).slack, 1e-8);
    }
}
