#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wlsprec/errors.hpp"
#include "wlsprec/example_gallery.hpp"
#include "wlsprec/krylov.hpp"
#include "wlsprec/precond_theory.hpp"
#include "wlsprec/random_instances.hpp"

using namespace wlsprec;

namespace {

Vector seeded_rhs(std::size_t n, std::uint64_t index = 0) {
    auto rng = instance_rng(kDefaultSeed, index);
    std::normal_distribution<double> normal;
    Vector v(n);
    for (double& x : v) x = normal(rng);
    return v;
}

double dot_local(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Textbook CG with the same stopping rule, used as a reference path.
std::vector<Vector> plain_cg_iterates(const DenseMatrix& a, const Vector& b, double tol, std::size_t max_iter) {
    const std::size_t n = b.size();
    Vector x(n, 0.0), r = b, p = b;
    double rr = dot_local(r, r);
    const double bnorm = norm2(b);
    std::vector<Vector> iterates;
    for (std::size_t k = 0; k < max_iter; ++k) {
        const Vector q = a * p;
        const double step = rr / dot_local(p, q);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += step * p[i];
            r[i] -= step * q[i];
        }
        iterates.push_back(x);
        const Vector ax = a * x;
        Vector t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = b[i] - ax[i];
        if (norm2(t) <= tol * bnorm) break;
        const double rr_next = dot_local(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return iterates;
}

std::size_t gallery_iterations(ExampleTag tag, double alpha) {
    const ExampleInstance inst = example_instance(ExampleVariant(tag, alpha));
    const OperatorPair ops = wlsq_operators(inst.a, inst.aTilde, inst.w);
    return pcg(ops.system, ops.precond, normal_rhs(inst.a, inst.w, seeded_rhs(2))).iterations;
}

} // namespace

TEST(Pcg, IdentitySystemOneIteration) {
    const Vector b = seeded_rhs(7);
    const PcgTrace t = pcg(identity_operator(7), identity_operator(7), b);
    EXPECT_EQ(t.iterations, 1u);
    EXPECT_TRUE(t.converged);
    EXPECT_EQ(t.residualNorms.size(), 2u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_DOUBLE_EQ(t.solution[i], b[i]);
}

TEST(Pcg, ExactPreconditionerOneIteration) {
    for (std::uint64_t k = 0; k < 10; ++k) {
        const WlsqInstance inst = random_wlsq_instance(201, k, 10);
        const OperatorPair ops = wlsq_operators(inst.a, inst.a, inst.w);
        const PcgTrace t = pcg(ops.system, ops.precond, seeded_rhs(inst.a.rows(), k));
        EXPECT_EQ(t.iterations, 1u) << "instance " << k;
        EXPECT_TRUE(t.converged);
    }
}

TEST(Pcg, ThreeDistinctEigenvaluesInDimensionFifty) {
    Vector diag(50);
    for (std::size_t i = 0; i < 50; ++i) diag[i] = 1.0 + static_cast<double>(i % 3);
    auto rng = instance_rng(203, 0);
    const DenseMatrix q = random_orthogonal(rng, 50);
    DenseMatrix scaled = q;
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 50; ++j) scaled(i, j) *= diag[j];
    const DenseMatrix a = scaled * q.transpose();
    const LinearOperator op = matrix_operator(0.5 * (a + a.transpose()));
    const PcgTrace t = pcg(op, identity_operator(50), seeded_rhs(50));
    EXPECT_TRUE(t.converged);
    EXPECT_LE(t.iterations, 3u);
}

TEST(Pcg, IdentityPreconditionerMatchesPlainCgBitwise) {
    auto rng = instance_rng(205, 0);
    const DenseMatrix a = random_spd(rng, 30, 1e3).matrix();
    const Vector b = seeded_rhs(30);
    const PcgTrace t = pcg(matrix_operator(a), identity_operator(30), b);
    const std::vector<Vector> ref = plain_cg_iterates(a, b, 1e-8, 300);
    ASSERT_EQ(t.iterations, ref.size());
    for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(t.solution[i], ref.back()[i]);
}

TEST(Pcg, ConvergedTraceSatisfiesTolerance) {
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto rng = instance_rng(207, k);
        const std::size_t n = 5 + k;
        const SpdMatrix a = random_spd(rng, n, std::pow(10.0, static_cast<double>(k % 7)));
        const Vector b = seeded_rhs(n, k);
        const PcgTrace t = pcg(matrix_operator(a.matrix()), identity_operator(n), b);
        ASSERT_TRUE(t.converged);
        EXPECT_EQ(t.residualNorms.size(), t.iterations + 1);
        EXPECT_LE(t.residualNorms.back(), 1e-8 * norm2(b));
        const Vector ax = a.apply(t.solution);
        Vector d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = ax[i] - b[i];
        EXPECT_LE(norm2(d), 10 * 1e-8 * norm2(b));
    }
}

// Rounding delays CG beyond n steps once the spectrum is spread over a few
// decades, so the exact-arithmetic bound is only checked on mild spectra.
TEST(Pcg, MildSpectraFinishWithinDimension) {
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto rng = instance_rng(219, k);
        const std::size_t n = 2 + 2 * k;
        const SpdMatrix a = random_spd(rng, n, 10.0);
        const PcgTrace t = pcg(matrix_operator(a.matrix()), identity_operator(n), seeded_rhs(n, k));
        EXPECT_TRUE(t.converged);
        EXPECT_LE(t.iterations, n) << "n=" << n;
    }
}

TEST(Pcg, ZeroRhsConvergesImmediately) {
    const PcgTrace t = pcg(identity_operator(3), identity_operator(3), Vector(3, 0.0));
    EXPECT_TRUE(t.converged);
    EXPECT_EQ(t.iterations, 0u);
}

TEST(Pcg, IterationCapReportsNoConvergence) {
    auto rng = instance_rng(209, 0);
    const DenseMatrix a = random_spd(rng, 20, 1e6).matrix();
    PcgOptions options;
    options.maxIter = 2;
    const PcgTrace t = pcg(matrix_operator(a), identity_operator(20), seeded_rhs(20), options);
    EXPECT_FALSE(t.converged);
    EXPECT_EQ(t.iterations, 2u);
}

TEST(Pcg, BreakdownOnIndefiniteSystem) {
    const LinearOperator op = matrix_operator(DenseMatrix{{1, 0}, {0, -1}});
    PcgOptions options;
    options.checkOperators = false;
    EXPECT_THROW(pcg(op, identity_operator(2), Vector{1, 1}, options), BreakdownDetected);
}

TEST(Pcg, AsymmetricOperatorRejected) {
    const LinearOperator op = matrix_operator(DenseMatrix{{1, 2}, {0, 1}});
    EXPECT_THROW(pcg(op, identity_operator(2), Vector{1, 1}), NotSymmetric);
}

TEST(Pcg, NonlinearOperatorRejected) {
    LinearOperator op{2, [](std::span<const double> x) { return Vector{x[0] * x[0] + 1, x[1]}; }};
    EXPECT_THROW(check_spd_operator(op), Error);
}

TEST(WlsqOperators, Plus2IterationsGrowWithAlpha) {
    std::size_t prev = 0;
    for (double alpha : {1.0, 10.0, 100.0}) {
        const std::size_t it = gallery_iterations(ExampleTag::Plus2, alpha);
        EXPECT_GE(it, prev) << "alpha=" << alpha;
        prev = it;
    }
}

TEST(WlsqOperators, StableIterationsStayBounded) {
    for (double alpha : {1.0, 10.0, 100.0, 1000.0}) {
        EXPECT_LE(gallery_iterations(ExampleTag::Stable, alpha), 3u) << "alpha=" << alpha;
    }
}

TEST(WlsqOperators, Plus2NeedsMoreIterationsThanStableAtAlphaThousand) {
    EXPECT_GT(gallery_iterations(ExampleTag::Plus2, 1000), gallery_iterations(ExampleTag::Stable, 1000));
}

TEST(FourDVarOperators, ZeroModelsOneIteration) {
    FourDVarLayout layout;
    layout.n = 3;
    layout.nSw = 4;
    layout.models.assign(4, DenseMatrix(3, 3));
    const OperatorPair ops = fourdvar_operators(layout, BlockCovariances::identity(layout));
    EXPECT_EQ(pcg(ops.system, ops.precond, seeded_rhs(15)).iterations, 1u);
}

TEST(FourDVarOperators, ExactCustomOneIteration) {
    for (std::uint64_t k = 0; k < 10; ++k) {
        FourDVarLayout layout = random_layout(211, k, 4, 6, ApproxVariant::Zero);
        layout.variant = ApproxVariant::Custom;
        layout.approxModels = layout.models;
        auto rng = instance_rng(213, k);
        const BlockCovariances cov = random_covariances(rng, layout, 100.0);
        const OperatorPair ops = fourdvar_operators(layout, cov);
        const PcgTrace t = pcg(ops.system, ops.precond, seeded_rhs(layout.dimension(), k));
        EXPECT_EQ(t.iterations, 1u) << "layout " << k;
    }
}

TEST(FourDVarOperators, SystemMatchesAssembledMatrix) {
    for (std::uint64_t k = 0; k < 10; ++k) {
        const FourDVarLayout layout = random_layout(215, k, 3, 4, ApproxVariant::Identity);
        auto rng = instance_rng(217, k);
        BlockCovariances cov = random_covariances(rng, layout, 50.0);
        cov.hBlocks.emplace(layout.nSw + 1, DenseMatrix::identity(layout.n));
        cov.rBlocks.emplace(layout.nSw + 1, SpdMatrix(2.0 * DenseMatrix::identity(layout.n)));
        const Vector b(layout.dimension(), 0.0), d(layout.dimension(), 0.0);
        const StateSystem sys = assemble_state_system(layout, cov, b, std::span<const double>(d));
        const OperatorPair ops = fourdvar_operators(layout, cov);
        const Vector x = seeded_rhs(layout.dimension(), k);
        const Vector y = ops.system(x), ref = sys.matrix.apply(x);
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-10 * (1 + std::abs(ref[i])));
    }
}
