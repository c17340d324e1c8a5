#include "wlsprec/precond_theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wlsprec {

namespace {

void require_square_pair(const DenseMatrix& a, const DenseMatrix& aTilde) {
    if (!a.square() || !aTilde.square() || a.rows() != aTilde.rows()) {
        throw DimensionMismatch("A and its approximation must be square and of equal size");
    }
}

void require_kappa(double kappaW) {
    if (!(kappaW >= 1.0) || !std::isfinite(kappaW)) throw InvalidArgument("condition number must be >= 1");
}

// A·Ã⁻¹, row by row: each row x of the product solves Ãᵀxᵀ = (row of A)ᵀ.
DenseMatrix right_divide(const DenseMatrix& a, const DenseMatrix& aTilde) {
    require_square_pair(a, aTilde);
    const std::size_t n = a.rows();
    std::optional<LuFactor> lu;
    try {
        lu.emplace(aTilde);
    } catch (const SingularMatrix& e) {
        throw SingularApproximation(std::string("approximation matrix is singular: ") + e.what());
    }
    DenseMatrix x(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vector r = lu->solve_transposed(a.row(i));
        for (std::size_t j = 0; j < n; ++j) x(i, j) = r[j];
    }
    return x;
}

} // namespace

bool SpectrumBall::contains(double lambda) const {
    return std::abs(lambda - center) <= radius + kContainmentSlack * (1.0 + radius);
}

SpdMatrix normal_matrix(const DenseMatrix& a, const SpdMatrix& w) {
    if (a.rows() != w.size()) throw DimensionMismatch("normal_matrix: W must match the rows of A");
    const DenseMatrix c = triangular_solve(w.cholesky_factor(), a, false);
    return SpdMatrix(c.transpose() * c);
}

Vector normal_rhs(const DenseMatrix& a, const SpdMatrix& w, std::span<const double> b) {
    if (a.rows() != w.size() || b.size() != a.rows()) throw DimensionMismatch("normal_rhs: size mismatch");
    return multiply_transposed(a, w.solve(b));
}

ErrorSummary approximation_error(const DenseMatrix& a, const DenseMatrix& aTilde) {
    DenseMatrix e = right_divide(a, aTilde);
    for (std::size_t i = 0; i < e.rows(); ++i) e(i, i) -= 1.0;
    ErrorSummary out;
    out.eNorm = spectral_norm(e);
    out.e = std::move(e);
    return out;
}

double spectrum_radius(double eNorm, double kappaW) {
    if (!(eNorm >= 0.0)) throw InvalidArgument("error norm must be nonnegative");
    require_kappa(kappaW);
    if (eNorm == 0.0) return 0.0;
    return (1.0 + kappaW) * eNorm + kappaW * eNorm * eNorm;
}

SpectrumBall spectrum_ball(double eNorm, double kappaW) { return {1.0, spectrum_radius(eNorm, kappaW)}; }

double relative_condition(const SpdMatrix& d, const SpdMatrix& c) {
    const Vector ev = generalized_eigs(d, c);
    if (ev.empty()) return 1.0;
    return ev.back() / ev.front();
}

// Both closed forms below use the rationalized root
//   (−b + √(b² + 4κq)) / (2κ) = 2q / (b + √(b² + 4κq)),  b = 1 + κ,
// which avoids cancellation once κ is large.
double admissible_error(double kappaW) {
    require_kappa(kappaW);
    const double b = 1.0 + kappaW;
    return 2.0 / (b + std::sqrt(b * b + 4.0 * kappaW));
}

double condition_bound(double eNorm, double kappaW) {
    require_kappa(kappaW);
    if (!(eNorm >= 0.0)) throw InvalidArgument("error norm must be nonnegative");
    if (eNorm == 0.0) return 1.0;
    if (!(eNorm < admissible_error(kappaW))) {
        throw NotAdmissible("error norm exceeds the admissible threshold for this weight conditioning");
    }
    const double r = spectrum_radius(eNorm, kappaW);
    return (1.0 + r) / (1.0 - r);
}

double error_budget(double kappaW, double m) {
    require_kappa(kappaW);
    if (!(m > 1.0)) throw InvalidArgument("target condition number must exceed 1");
    const double q = std::isinf(m) ? 1.0 : (m - 1.0) / (m + 1.0);
    const double b = 1.0 + kappaW;
    return 2.0 * q / (b + std::sqrt(b * b + 4.0 * kappaW * q));
}

Vector preconditioned_spectrum(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w) {
    if (w.size() != a.rows()) throw DimensionMismatch("weight matrix does not match A");
    const DenseMatrix& g = w.cholesky_factor();
    const DenseMatrix k = triangular_solve(g, right_divide(a, aTilde) * g, false);
    Vector ev = singular_values(k);
    for (double& s : ev) s *= s;
    if (!ev.empty() && !(ev.front() > 0.0)) throw SingularMatrix("preconditioned operator is singular");
    return ev;
}

Vector preconditioned_spectrum_explicit(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w) {
    require_square_pair(a, aTilde);
    return generalized_eigs(normal_matrix(a, w), normal_matrix(aTilde, w));
}

PrecondReport verify_spectrum(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w,
                              const VerifyOptions& options) {
    PrecondReport report;
    report.kappaW = options.kappaW ? *options.kappaW : spd_condition(w);
    report.eNorm = approximation_error(a, aTilde).eNorm;
    report.eigenvalues = preconditioned_spectrum(a, aTilde, w);
    report.ball = spectrum_ball(report.eNorm, report.kappaW);
    report.ball.radius *= options.radiusScale;

    if (!report.eigenvalues.empty()) {
        report.condMeasured = report.eigenvalues.back() / report.eigenvalues.front();
    }
    report.contained = true;
    for (double lambda : report.eigenvalues) {
        report.maxDeviation = std::max(report.maxDeviation, std::abs(lambda - 1.0));
        if (!report.ball.contains(lambda)) report.contained = false;
    }
    report.admissible = report.eNorm < admissible_error(report.kappaW);
    if (report.admissible) report.condBound = condition_bound(report.eNorm, report.kappaW);
    return report;
}

} // namespace wlsprec
