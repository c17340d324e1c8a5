#pragma once

// Preconditioned conjugate gradients over matrix-free SPD operators.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "wlsprec/fourdvar.hpp"
#include "wlsprec/linalg.hpp"

namespace wlsprec {

struct LinearOperator {
    std::size_t dim = 0;
    std::function<Vector(std::span<const double>)> apply;

    Vector operator()(std::span<const double> x) const { return apply(x); }
};

LinearOperator identity_operator(std::size_t dim);
LinearOperator matrix_operator(DenseMatrix m);

/// Spot-checks linearity and symmetry on `pairs` random vector pairs; throws
/// NotSymmetric (or InvalidArgument for nonlinearity) on failure.
void check_spd_operator(const LinearOperator& op, int pairs = 8, std::uint64_t seed = 42);

struct PcgTrace {
    Vector solution;
    std::size_t iterations = 0;
    Vector residualNorms;  // ‖b − A x_k‖₂, k = 0..iterations
    bool converged = false;
};

struct PcgOptions {
    double tol = 1e-8;
    std::size_t maxIter = 0;  // 0 means 10·dim
    bool checkOperators = true;
};

/// Solves system·x = rhs from x₀ = 0.
///
/// Stops when the true residual satisfies ‖b − Ax_k‖₂ ≤ tol·‖b‖₂ or after
/// maxIter iterations (converged = false). Throws BreakdownDetected if a
/// search direction has pᵀAp ≤ 1e-300.
PcgTrace pcg(const LinearOperator& system, const LinearOperator& precond, std::span<const double> rhs,
             const PcgOptions& options = {});

struct OperatorPair {
    LinearOperator system;
    LinearOperator precond;
};

// x ↦ AᵀW⁻¹Ax and x ↦ Ã⁻¹WÃ⁻ᵀx, through Cholesky and LU factors.
OperatorPair wlsq_operators(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w);

// x ↦ (LᵀD⁻¹L + HᵀR⁻¹H)x and x ↦ L̃⁻¹DL̃⁻ᵀx, through block sweeps.
OperatorPair fourdvar_operators(const FourDVarLayout& layout, const BlockCovariances& cov);

} // namespace wlsprec
