#pragma once

// Preconditioning weighted least squares with an approximate model matrix.
//
// For min ½‖Ax − b‖²_{W⁻¹} the normal matrix is N = AᵀW⁻¹A and the candidate
// preconditioner built from an approximation Ã is P = ÃᵀW⁻¹Ã. Everything here
// measures how far the spectrum of A_p = P⁻¹N strays from 1, and how that
// compares with the a-priori ball B(1, (1+κ₂(W))‖E‖₂ + κ₂(W)‖E‖₂²), where
// E = AÃ⁻¹ − I.

#include <optional>
#include <span>

#include "wlsprec/linalg.hpp"

namespace wlsprec {

struct ErrorSummary {
    DenseMatrix e;      // A·Ã⁻¹ − I
    double eNorm = 0.0; // ‖E‖₂
};

struct SpectrumBall {
    double center = 1.0;
    double radius = 0.0;

    bool contains(double lambda) const;
};

struct PrecondReport {
    Vector eigenvalues;  // of A_p, ascending, all > 0
    SpectrumBall ball;
    double condMeasured = 1.0;
    std::optional<double> condBound;  // present iff admissible
    bool admissible = false;
    bool contained = false;
    double kappaW = 1.0;
    double eNorm = 0.0;
    double maxDeviation = 0.0;  // max_k |λ_k − 1|
};

// Containment slack: |λ − 1| ≤ r + kContainmentSlack·(1 + r).
inline constexpr double kContainmentSlack = 1e-9;

/// AᵀW⁻¹A, assembled as CᵀC with C = G⁻¹A where W = GGᵀ.
SpdMatrix normal_matrix(const DenseMatrix& a, const SpdMatrix& w);
// AᵀW⁻¹b, the right-hand side of the normal equations.
Vector normal_rhs(const DenseMatrix& a, const SpdMatrix& w, std::span<const double> b);

/// E = AÃ⁻¹ − I and its spectral norm.
///
/// Rows of AÃ⁻¹ are obtained from Ãᵀ LU solves; throws SingularApproximation
/// when an LU pivot drops below 1e-12 × max|Ã|.
ErrorSummary approximation_error(const DenseMatrix& a, const DenseMatrix& aTilde);

double spectrum_radius(double eNorm, double kappaW);
SpectrumBall spectrum_ball(double eNorm, double kappaW);

/// κ(D, C) = λ_max(C⁻¹D) / λ_min(C⁻¹D).
double relative_condition(const SpdMatrix& d, const SpdMatrix& c);

/// Largest ‖E‖₂ for which the condition-number bound stays finite.
double admissible_error(double kappaW);

/// (1 + r)/(1 − r) with r = spectrum_radius(eNorm, kappaW).
/// Throws NotAdmissible unless eNorm < admissible_error(kappaW).
double condition_bound(double eNorm, double kappaW);

/// Error budget g(κ, M): the ‖E‖₂ at which condition_bound reaches M.
double error_budget(double kappaW, double m);

/// Spectrum of A_p, ascending.
///
/// A_p is similar to KᵀK with K = G⁻¹(AÃ⁻¹)G and W = GGᵀ, so the eigenvalues
/// are the squared singular values of K. This stays accurate when N and P are
/// too ill-conditioned to be factored in explicit form.
Vector preconditioned_spectrum(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w);

/// Same spectrum through the explicit pair: generalized_eigs(AᵀW⁻¹A, ÃᵀW⁻¹Ã).
/// Only usable while both products remain numerically SPD.
Vector preconditioned_spectrum_explicit(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w);

struct VerifyOptions {
    // Known κ₂(W); computed from w when absent.
    std::optional<double> kappaW;
    // Multiplies the predicted radius before the containment test. Only the
    // detector self-test uses anything but 1.
    double radiusScale = 1.0;
};

PrecondReport verify_spectrum(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w,
                              const VerifyOptions& options = {});

} // namespace wlsprec
