#include "wlsprec/example_gallery.hpp"

#include <cmath>
#include <string>

#include "wlsprec/precond_theory.hpp"

namespace wlsprec {

std::string_view to_string(ExampleTag tag) { return tag == ExampleTag::Plus2 ? "plus2" : "stable"; }

ExampleTag parse_example_tag(std::string_view text) {
    if (text == "plus2") return ExampleTag::Plus2;
    if (text == "stable") return ExampleTag::Stable;
    throw InvalidArgument("unknown example variant '" + std::string(text) + "'");
}

ExampleVariant::ExampleVariant(ExampleTag tag, double alpha) : tag_(tag), alpha_(alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be finite and >= 1");
}

ExampleInstance example_instance(const ExampleVariant& v) {
    const double alpha = v.alpha();
    const double shift = v.tag() == ExampleTag::Plus2 ? alpha + 2.0 : alpha + 1.0 / alpha;
    return ExampleInstance{
        DenseMatrix{{1.0, 0.0}, {alpha, 1.0}},
        SpdMatrix(DenseMatrix{{alpha, 0.0}, {0.0, 1.0}}),
        DenseMatrix{{1.0, 0.0}, {shift, 1.0}},
    };
}

std::pair<double, double> closed_form_eigs(const ExampleVariant& v) {
    const double alpha = v.alpha();
    double larger = 0.0;
    if (v.tag() == ExampleTag::Plus2) {
        larger = 1.0 + 2.0 * alpha + 2.0 * std::sqrt(alpha * (alpha + 1.0));
    } else {
        const double inv = 1.0 / alpha;
        larger = 0.5 * (2.0 + inv + std::sqrt(4.0 * inv + inv * inv));
    }
    // det(A_p) = 1, so the smaller root is the reciprocal; no cancellation.
    return {1.0 / larger, larger};
}

double unweighted_relative_condition(const ExampleVariant& v) {
    if (v.tag() != ExampleTag::Plus2) throw InvalidArgument("unweighted_relative_condition is defined for plus2");
    const ExampleInstance inst = example_instance(v);
    // W = I: the spectrum of (ÃᵀÃ)⁻¹AᵀA in factored form.
    const Vector ev = preconditioned_spectrum(inst.a, inst.aTilde, SpdMatrix(DenseMatrix::identity(2)));
    return ev.back() / ev.front();
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi >= lo) || points < 2) throw InvalidArgument("log grid needs 0 < lo <= hi and >= 2 points");
    std::vector<double> grid(points);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t k = 0; k < points; ++k) {
        grid[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_alpha_grid() { return log_grid(1.0, 1e4, 17); }

} // namespace wlsprec
