#pragma once

// The two-by-two family A = [[1,0],[α,1]], W = diag(α,1) together with two
// approximations of A: one whose error stays constant (and so is amplified by
// κ₂(W) = α), and one whose error shrinks like 1/α.

#include <string_view>
#include <utility>
#include <vector>

#include "wlsprec/linalg.hpp"

namespace wlsprec {

enum class ExampleTag {
    Plus2,  // Ã = [[1,0],[α+2,1]]
    Stable  // Ã = [[1,0],[α+1/α,1]]
};

std::string_view to_string(ExampleTag tag);
ExampleTag parse_example_tag(std::string_view text);

class ExampleVariant {
public:
    ExampleVariant(ExampleTag tag, double alpha);

    ExampleTag tag() const { return tag_; }
    double alpha() const { return alpha_; }

private:
    ExampleTag tag_;
    double alpha_;
};

struct ExampleInstance {
    DenseMatrix a;
    SpdMatrix w;
    DenseMatrix aTilde;
};

ExampleInstance example_instance(const ExampleVariant& v);

// Closed-form eigenvalues of A_p, (min, max). Their product is exactly 1.
std::pair<double, double> closed_form_eigs(const ExampleVariant& v);

// κ(AᵀA, ÃᵀÃ) for Plus2; constant in α and equal to 17 + 12√2.
double unweighted_relative_condition(const ExampleVariant& v);

// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

// Default sweep: 10^(k/4), k = 0..16.
std::vector<double> default_alpha_grid();

} // namespace wlsprec
