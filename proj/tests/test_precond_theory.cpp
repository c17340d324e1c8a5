#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "wlsprec/errors.hpp"
#include "wlsprec/example_gallery.hpp"
#include "wlsprec/precond_theory.hpp"
#include "wlsprec/random_instances.hpp"

using namespace wlsprec;

namespace {

DenseMatrix lower_pair(double a10) { return DenseMatrix{{1, 0}, {a10, 1}}; }

// ‖A·Ã⁻¹ − I‖₂ through an explicit Gauss-Jordan inverse.
double oracle_error_norm(const DenseMatrix& a, const DenseMatrix& aTilde) {
    DenseMatrix e = oracle::product(a, oracle::inverse(aTilde));
    for (std::size_t i = 0; i < e.rows(); ++i) e(i, i) -= 1.0;
    return singular_values(e).back();
}

} // namespace

TEST(NormalMatrix, IdentityCase) {
    const SpdMatrix n = normal_matrix(DenseMatrix::identity(3), SpdMatrix(DenseMatrix::identity(3)));
    EXPECT_LT(relative_difference(n.matrix(), DenseMatrix::identity(3)), 1e-15);
}

TEST(NormalMatrix, HandComputedTwoByTwo) {
    const double w[] = {2, 1};
    const SpdMatrix n = normal_matrix(lower_pair(2), SpdMatrix(DenseMatrix::diagonal(w)));
    EXPECT_NEAR(n.matrix()(0, 0), 4.5, 1e-14);
    EXPECT_NEAR(n.matrix()(0, 1), 2.0, 1e-14);
    EXPECT_NEAR(n.matrix()(1, 0), 2.0, 1e-14);
    EXPECT_NEAR(n.matrix()(1, 1), 1.0, 1e-14);
}

TEST(NormalMatrix, MatchesExplicitInverseTripleProduct) {
    for (std::uint64_t k = 0; k < 10; ++k) {
        auto rng = instance_rng(101, k);
        const DenseMatrix a = random_normal(rng, 5, 5);
        const SpdMatrix w = random_spd(rng, 5, 50.0);
        const DenseMatrix ref = oracle::product(oracle::product(oracle::transpose(a), oracle::inverse(w.matrix())), a);
        EXPECT_LT(relative_difference(normal_matrix(a, w).matrix(), ref), 1e-9);
    }
}

TEST(ApproximationError, ExactApproximationIsZero) {
    auto rng = instance_rng(103, 0);
    const DenseMatrix a = random_normal(rng, 4, 4);
    const ErrorSummary s = approximation_error(a, a);
    EXPECT_LT(s.e.max_abs(), 1e-14);
    EXPECT_LT(s.eNorm, 1e-14);
}

TEST(ApproximationError, ConstantOffsetVariant) {
    for (double alpha : {1.0, 4.0, 100.0}) {
        const ErrorSummary s = approximation_error(lower_pair(alpha), lower_pair(alpha + 2));
        EXPECT_DOUBLE_EQ(s.e(0, 0), 0.0);
        EXPECT_DOUBLE_EQ(s.e(0, 1), 0.0);
        EXPECT_DOUBLE_EQ(s.e(1, 1), 0.0);
        EXPECT_NEAR(s.e(1, 0), -2.0, 1e-13);
        EXPECT_NEAR(s.eNorm, 2.0, 1e-13);
    }
}

// A·Ã⁻¹ = [[1,0],[α − (α + 1/α), 1]], so the off-diagonal entry is −1/α.
TEST(ApproximationError, ShrinkingVariantAtAlphaFour) {
    const ErrorSummary s = approximation_error(lower_pair(4), lower_pair(4.25));
    EXPECT_DOUBLE_EQ(s.e(1, 0), -0.25);
    EXPECT_DOUBLE_EQ(s.e(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.eNorm, 0.25);
}

TEST(NormalRhs, MatchesExplicitInverse) {
    auto rng = instance_rng(119, 0);
    const DenseMatrix a = random_normal(rng, 4, 4);
    const SpdMatrix w = random_spd(rng, 4, 20.0);
    const Vector b{1, -2, 0.5, 3};
    const Vector ref = oracle::product(oracle::transpose(a), oracle::inverse(w.matrix())) * b;
    const Vector got = normal_rhs(a, w, b);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], ref[i], 1e-10 * (1 + std::abs(ref[i])));
}

TEST(ApproximationError, SingularApproximationThrows) {
    EXPECT_THROW(approximation_error(DenseMatrix::identity(2), DenseMatrix{{1, 1}, {1, 1}}), SingularApproximation);
}

TEST(ApproximationError, MatchesExplicitInverse) {
    for (std::uint64_t k = 0; k < 20; ++k) {
        const WlsqInstance inst = random_wlsq_instance(105, k, 8);
        const double ref = oracle_error_norm(inst.a, inst.aTilde);
        EXPECT_NEAR(approximation_error(inst.a, inst.aTilde).eNorm, ref, 1e-9 * (1 + ref));
    }
}

TEST(SpectrumRadius, Examples) {
    EXPECT_EQ(spectrum_radius(0, 5), 0.0);
    EXPECT_DOUBLE_EQ(spectrum_radius(2, 10), 62.0);
    EXPECT_NEAR(spectrum_radius(0.01, 100), 1.02, 1e-14);
    EXPECT_THROW(spectrum_radius(-1, 2), InvalidArgument);
    EXPECT_THROW(spectrum_radius(0.1, 0.5), InvalidArgument);
}

TEST(RelativeCondition, Examples) {
    auto rng = instance_rng(107, 0);
    const SpdMatrix c = random_spd(rng, 5, 30.0);
    EXPECT_NEAR(relative_condition(c, c), 1.0, 1e-12);
    const double d[] = {8, 2};
    EXPECT_DOUBLE_EQ(relative_condition(SpdMatrix(DenseMatrix::diagonal(d)), SpdMatrix(DenseMatrix::identity(2))),
                     4.0);
}

// κ(D, C) is the tightest ratio γ₂/γ₁ with γ₁ xᵀCx ≤ xᵀDx ≤ γ₂ xᵀCx: sampled
// Rayleigh quotients stay inside the generalized spectrum and approach both
// ends of it.
TEST(RelativeCondition, VariationalCharacterization) {
    for (std::uint64_t k = 0; k < 4; ++k) {
        auto rng = instance_rng(109, k);
        const std::size_t n = 2 + k;
        const SpdMatrix d = random_spd(rng, n, 20.0);
        const SpdMatrix c = random_spd(rng, n, 20.0);
        const Vector ev = generalized_eigs(d, c);
        std::normal_distribution<double> normal;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int s = 0; s < 100000; ++s) {
            Vector x(n);
            for (double& v : x) v = normal(rng);
            const double q = dot(x, d.apply(x)) / dot(x, c.apply(x));
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        EXPECT_GE(lo, ev.front() * (1 - 1e-12));
        EXPECT_LE(hi, ev.back() * (1 + 1e-12));
        EXPECT_LE(hi / lo, relative_condition(d, c) * (1 + 1e-12));
        EXPECT_GE(hi / lo, 0.9 * relative_condition(d, c));
    }
}

TEST(AdmissibleError, SpotValues) {
    EXPECT_NEAR(admissible_error(1), std::sqrt(2.0) - 1, 1e-12);
    EXPECT_NEAR(admissible_error(100), (-101 + std::sqrt(10601.0)) / 200, 1e-12);
    EXPECT_NEAR(admissible_error(100), 9.8058e-3, 1e-6);
    EXPECT_LT(admissible_error(1e6), 1e-5);
}

TEST(AdmissibleError, StrictlyDecreasingInsideUnitInterval) {
    double prev = 1.0;
    for (double kappa : log_grid(1, 1e8, 200)) {
        const double v = admissible_error(kappa);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(AdmissibleError, RadiusReachesOneAtThreshold) {
    for (double kappa : {1.0, 3.0, 100.0, 1e4, 1e6}) {
        EXPECT_NEAR(spectrum_radius(admissible_error(kappa), kappa), 1.0, 1e-12);
    }
}

TEST(ConditionBound, Examples) {
    EXPECT_EQ(condition_bound(0, 1), 1.0);
    EXPECT_EQ(condition_bound(0, 1e4), 1.0);
    EXPECT_NEAR(condition_bound(0.1, 1), 1.21 / 0.79, 1e-13);
    EXPECT_THROW(condition_bound(0.5, 100), NotAdmissible);
    EXPECT_THROW(condition_bound(admissible_error(10), 10), NotAdmissible);
}

TEST(ErrorBudget, Examples) {
    EXPECT_NEAR(error_budget(1, 3), std::sqrt(1.5) - 1, 1e-14);
    for (double kappa : {1.0, 10.0, 1e4}) {
        EXPECT_DOUBLE_EQ(error_budget(kappa, std::numeric_limits<double>::infinity()), admissible_error(kappa));
        EXPECT_NEAR(error_budget(kappa, 1e12), admissible_error(kappa), 1e-11 * admissible_error(kappa));
    }
    EXPECT_NEAR(condition_bound(error_budget(100, 10), 100), 10.0, 1e-8);
    EXPECT_THROW(error_budget(10, 1), InvalidArgument);
}

TEST(ErrorBudget, RoundTripAndOrdering) {
    for (double kappa : {1.0, 10.0, 100.0, 1e4}) {
        double prev = 0.0;
        for (double m : {2.0, 10.0, 100.0}) {
            const double g = error_budget(kappa, m);
            EXPECT_NEAR(condition_bound(g, kappa), m, 1e-9 * m);
            EXPECT_GT(g, prev);
            EXPECT_LT(g, admissible_error(kappa));
            prev = g;
        }
    }
}

TEST(PreconditionedSpectrum, ExactApproximationGivesOnes) {
    for (std::uint64_t k = 0; k < 10; ++k) {
        const WlsqInstance inst = random_wlsq_instance(111, k, 10);
        for (double v : preconditioned_spectrum(inst.a, inst.a, inst.w)) EXPECT_NEAR(v, 1.0, 1e-9);
    }
}

TEST(PreconditionedSpectrum, ExamplesAtAlphaOne) {
    const ExampleInstance p = example_instance(ExampleVariant(ExampleTag::Plus2, 1));
    const Vector ep = preconditioned_spectrum(p.a, p.aTilde, p.w);
    EXPECT_NEAR(ep[0], 3 - 2 * std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(ep[1], 3 + 2 * std::sqrt(2.0), 1e-13);

    const ExampleInstance s = example_instance(ExampleVariant(ExampleTag::Stable, 1));
    const Vector es = preconditioned_spectrum(s.a, s.aTilde, s.w);
    EXPECT_NEAR(es[0], (3 - std::sqrt(5.0)) / 2, 1e-13);
    EXPECT_NEAR(es[1], (3 + std::sqrt(5.0)) / 2, 1e-13);
}

TEST(PreconditionedSpectrum, FactoredAndExplicitRoutesAgree) {
    for (std::uint64_t k = 0; k < 50; ++k) {
        auto rng = instance_rng(113, k);
        const std::size_t n = 2 + k % 7;
        const DenseMatrix a = random_normal(rng, n, n) + 3.0 * DenseMatrix::identity(n);
        const DenseMatrix aTilde = a + 0.1 * random_normal(rng, n, n);
        const SpdMatrix w = random_spd(rng, n, 10.0);
        const Vector f = preconditioned_spectrum(a, aTilde, w);
        const Vector e = preconditioned_spectrum_explicit(a, aTilde, w);
        ASSERT_EQ(f.size(), e.size());
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(f[i], e[i], 1e-8 * e[i]);
    }
}

TEST(PreconditionedSpectrum, MatchesPencilDeterminantRoots) {
    for (std::uint64_t k = 0; k < 3; ++k) {
        auto rng = instance_rng(115, k);
        const DenseMatrix a = random_normal(rng, 3, 3) + 2.0 * DenseMatrix::identity(3);
        const DenseMatrix aTilde = a + 0.2 * random_normal(rng, 3, 3);
        const SpdMatrix w = random_spd(rng, 3, 5.0);
        const DenseMatrix winv = oracle::inverse(w.matrix());
        const DenseMatrix n = oracle::product(oracle::product(oracle::transpose(a), winv), a);
        const DenseMatrix p = oracle::product(oracle::product(oracle::transpose(aTilde), winv), aTilde);
        const std::vector<double> roots = oracle::pencil_eigenvalues(n, p);
        const Vector ev = preconditioned_spectrum(a, aTilde, w);
        ASSERT_EQ(roots.size(), 3u);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(ev[i], roots[i], 1e-8 * roots[i]);
    }
}

// Scaling W leaves A_p unchanged.
TEST(PreconditionedSpectrum, WeightScaleInvariance) {
    const WlsqInstance inst = random_wlsq_instance(117, 3, 6);
    const Vector base = preconditioned_spectrum(inst.a, inst.aTilde, inst.w);
    const Vector scaled = preconditioned_spectrum(inst.a, inst.aTilde, SpdMatrix(1e3 * inst.w.matrix()));
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(scaled[i], base[i], 1e-10 * base[i]);
}

TEST(VerifySpectrum, ReportFields) {
    const ExampleInstance p = example_instance(ExampleVariant(ExampleTag::Plus2, 10));
    const PrecondReport r = verify_spectrum(p.a, p.aTilde, p.w);
    EXPECT_DOUBLE_EQ(r.kappaW, 10.0);
    EXPECT_DOUBLE_EQ(r.eNorm, 2.0);
    EXPECT_DOUBLE_EQ(r.ball.center, 1.0);
    EXPECT_DOUBLE_EQ(r.ball.radius, 62.0);
    EXPECT_TRUE(r.contained);
    EXPECT_FALSE(r.admissible);
    EXPECT_FALSE(r.condBound.has_value());
    EXPECT_DOUBLE_EQ(r.condMeasured, r.eigenvalues.back() / r.eigenvalues.front());

    const ExampleInstance s = example_instance(ExampleVariant(ExampleTag::Stable, 1000));
    const PrecondReport rs = verify_spectrum(s.a, s.aTilde, s.w);
    EXPECT_TRUE(rs.contained);
    EXPECT_EQ(rs.admissible, rs.condBound.has_value());
}

TEST(VerifySpectrum, RandomInstancesStayInsideTheBall) {
    std::size_t admissible = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const WlsqInstance inst = random_wlsq_instance(kDefaultSeed, k, 12);
        VerifyOptions options;
        options.kappaW = inst.kappaW;
        const PrecondReport r = verify_spectrum(inst.a, inst.aTilde, inst.w, options);
        const double radius = (1 + inst.kappaW) * r.eNorm + inst.kappaW * r.eNorm * r.eNorm;
        for (double lambda : r.eigenvalues) {
            ASSERT_GT(lambda, 0.0) << "instance " << k;
            ASSERT_LE(std::abs(lambda - 1.0), radius + 1e-9 * (1 + radius)) << "instance " << k;
        }
        if (r.eNorm < admissible_error(inst.kappaW)) {
            ++admissible;
            const double bound = (1 + radius) / (1 - radius);
            EXPECT_LE(r.condMeasured, bound * (1 + 1e-9)) << "instance " << k;
        }
    }
    EXPECT_GT(admissible, 100u);
    EXPECT_LT(admissible, 1000u);
}

TEST(VerifySpectrum, ShrunkenBallIsDetected) {
    const ExampleInstance p = example_instance(ExampleVariant(ExampleTag::Plus2, 100));
    VerifyOptions options;
    options.radiusScale = 1e-3;
    EXPECT_FALSE(verify_spectrum(p.a, p.aTilde, p.w, options).contained);
}
