#include "wlsprec/krylov.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <string>

namespace wlsprec {

LinearOperator identity_operator(std::size_t dim) {
    return {dim, [](std::span<const double> x) { return Vector(x.begin(), x.end()); }};
}

LinearOperator matrix_operator(DenseMatrix m) {
    if (!m.square()) throw DimensionMismatch("matrix_operator: matrix must be square");
    const std::size_t dim = m.rows();
    auto shared = std::make_shared<const DenseMatrix>(std::move(m));
    return {dim, [shared](std::span<const double> x) { return *shared * x; }};
}

void check_spd_operator(const LinearOperator& op, int pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    auto random_vector = [&] {
        Vector v(op.dim);
        for (double& e : v) e = normal(rng);
        return v;
    };
    for (int k = 0; k < pairs; ++k) {
        const Vector x = random_vector();
        const Vector y = random_vector();
        const Vector ax = op(x);
        const Vector ay = op(y);
        if (ax.size() != op.dim || ay.size() != op.dim) throw DimensionMismatch("operator returned a vector of the wrong size");

        const double sym_gap = std::abs(dot(ax, y) - dot(x, ay));
        const double sym_scale = norm2(ax) * norm2(y) + norm2(x) * norm2(ay);
        if (sym_gap > 1e-10 * sym_scale) throw NotSymmetric("operator failed the symmetry spot check");

        const double a = normal(rng);
        const double b = normal(rng);
        Vector combo(op.dim);
        for (std::size_t i = 0; i < op.dim; ++i) combo[i] = a * x[i] + b * y[i];
        const Vector lhs = op(combo);
        Vector diff(op.dim);
        for (std::size_t i = 0; i < op.dim; ++i) diff[i] = lhs[i] - (a * ax[i] + b * ay[i]);
        if (norm2(diff) > 1e-10 * (std::abs(a) * norm2(ax) + std::abs(b) * norm2(ay))) {
            throw InvalidArgument("operator failed the linearity spot check");
        }
    }
}

PcgTrace pcg(const LinearOperator& system, const LinearOperator& precond, std::span<const double> rhs,
             const PcgOptions& options) {
    const std::size_t dim = system.dim;
    if (precond.dim != dim || rhs.size() != dim) throw DimensionMismatch("pcg: operator and rhs sizes differ");
    if (!(options.tol > 0.0)) throw InvalidArgument("pcg: tolerance must be positive");
    if (options.checkOperators) {
        check_spd_operator(system);
        check_spd_operator(precond);
    }
    const std::size_t max_iter = options.maxIter == 0 ? 10 * dim : options.maxIter;

    PcgTrace trace;
    trace.solution.assign(dim, 0.0);
    Vector& x = trace.solution;
    Vector r(rhs.begin(), rhs.end());
    const double bnorm = norm2(rhs);
    trace.residualNorms.push_back(bnorm);
    if (bnorm == 0.0) {
        trace.converged = true;
        return trace;
    }

    Vector z = precond(r);
    double rz = dot(r, z);
    Vector p = z;
    for (std::size_t k = 1; k <= max_iter; ++k) {
        const Vector q = system(p);
        const double pap = dot(p, q);
        if (pap <= 1e-300) throw BreakdownDetected("pcg: p'Ap <= 0 at iteration " + std::to_string(k));
        const double step = rz / pap;
        for (std::size_t i = 0; i < dim; ++i) {
            x[i] += step * p[i];
            r[i] -= step * q[i];
        }

        const Vector ax = system(x);
        Vector true_residual(dim);
        for (std::size_t i = 0; i < dim; ++i) true_residual[i] = rhs[i] - ax[i];
        const double res = norm2(true_residual);
        trace.residualNorms.push_back(res);
        trace.iterations = k;
        if (res <= options.tol * bnorm) {
            trace.converged = true;
            break;
        }

        z = precond(r);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < dim; ++i) p[i] = z[i] + beta * p[i];
    }
    return trace;
}

OperatorPair wlsq_operators(const DenseMatrix& a, const DenseMatrix& aTilde, const SpdMatrix& w) {
    if (!a.square() || !aTilde.square() || a.rows() != aTilde.rows() || w.size() != a.rows()) {
        throw DimensionMismatch("wlsq_operators: inconsistent shapes");
    }
    const std::size_t dim = a.rows();
    auto a_ptr = std::make_shared<const DenseMatrix>(a);
    auto w_ptr = std::make_shared<const SpdMatrix>(w);
    std::shared_ptr<const LuFactor> lu;
    try {
        lu = std::make_shared<const LuFactor>(aTilde);
    } catch (const SingularMatrix& e) {
        throw SingularApproximation(std::string("approximation matrix is singular: ") + e.what());
    }

    LinearOperator system{dim, [a_ptr, w_ptr](std::span<const double> x) {
                              return multiply_transposed(*a_ptr, w_ptr->solve(*a_ptr * x));
                          }};
    LinearOperator precond{dim, [lu, w_ptr](std::span<const double> x) {
                               return lu->solve(w_ptr->apply(lu->solve_transposed(x)));
                           }};
    return {std::move(system), std::move(precond)};
}

OperatorPair fourdvar_operators(const FourDVarLayout& layout, const BlockCovariances& cov) {
    layout.validate();
    cov.validate(layout);
    const std::size_t dim = layout.dimension();
    const std::size_t n = layout.n;
    auto lay = std::make_shared<const FourDVarLayout>(layout);
    auto cv = std::make_shared<const BlockCovariances>(cov);

    LinearOperator system{dim, [lay, cv, n](std::span<const double> x) {
                              Vector lx = apply_L(*lay, x, false);
                              for (std::size_t k = 0; k <= lay->nSw; ++k) {
                                  const Vector s = cv->dBlocks[k].solve(std::span<const double>(lx).subspan(k * n, n));
                                  std::copy(s.begin(), s.end(), lx.begin() + static_cast<std::ptrdiff_t>(k * n));
                              }
                              Vector y = apply_L(*lay, lx, true);
                              if (cv->has_observations()) {
                                  for (std::size_t k = 0; k <= lay->nSw; ++k) {
                                      const DenseMatrix& h = (*cv->hBlocks)[k];
                                      const Vector hx = h * x.subspan(k * n, n);
                                      const Vector t = multiply_transposed(h, (*cv->rBlocks)[k].solve(hx));
                                      for (std::size_t i = 0; i < n; ++i) y[k * n + i] += t[i];
                                  }
                              }
                              return y;
                          }};
    LinearOperator precond{dim, [lay, cv, n](std::span<const double> x) {
                               Vector t = apply_Linv(*lay, x, true);
                               for (std::size_t k = 0; k <= lay->nSw; ++k) {
                                   const Vector s = cv->dBlocks[k].apply(std::span<const double>(t).subspan(k * n, n));
                                   std::copy(s.begin(), s.end(), t.begin() + static_cast<std::ptrdiff_t>(k * n));
                               }
                               return apply_Linv(*lay, t, false);
                           }};
    return {std::move(system), std::move(precond)};
}

} // namespace wlsprec
