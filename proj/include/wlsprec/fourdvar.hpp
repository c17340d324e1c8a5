#pragma once

// Weak-constraint 4D-Var in state formulation.
//
// The control vector stacks the states of the N_sw + 1 sub-window boundaries,
// each of dimension n. The model operator L is block unit-lower-bidiagonal
// with −M_j on the first block sub-diagonal, and the background
// preconditioner replaces the M_j by approximations M̃_j.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wlsprec/linalg.hpp"
#include "wlsprec/precond_theory.hpp"

namespace wlsprec {

enum class ApproxVariant { Zero, Identity, Custom };

std::string_view to_string(ApproxVariant v);
ApproxVariant parse_approx_variant(std::string_view text);

struct FourDVarLayout {
    std::size_t n = 0;
    std::size_t nSw = 0;
    std::vector<DenseMatrix> models;        // M_1..M_{N_sw}
    ApproxVariant variant = ApproxVariant::Zero;
    std::vector<DenseMatrix> approxModels;  // M̃_j, Custom only

    std::size_t dimension() const { return n * (nSw + 1); }
    // Throws DimensionMismatch / InvalidArgument on inconsistent blocks.
    void validate() const;
    // M̃_j for j = 1..nSw.
    DenseMatrix approx_model(std::size_t j) const;
    FourDVarLayout with_variant(ApproxVariant v) const;
};

struct BlockCovariances {
    std::vector<SpdMatrix> dBlocks;                       // B, Q_1..Q_{N_sw}
    std::optional<std::vector<SpdMatrix>> rBlocks;        // R_0..R_{N_sw}
    std::optional<std::vector<DenseMatrix>> hBlocks;      // H_0..H_{N_sw}, m_j × n

    void validate(const FourDVarLayout& layout) const;
    bool has_observations() const { return hBlocks.has_value(); }
    std::size_t observation_dimension() const;

    static BlockCovariances identity(const FourDVarLayout& layout);
};

DenseMatrix assemble_L(const FourDVarLayout& layout);
DenseMatrix assemble_Ltilde(const FourDVarLayout& layout);
DenseMatrix block_diagonal(std::span<const SpdMatrix> blocks);

// L x or Lᵀ x from the blocks.
Vector apply_L(const FourDVarLayout& layout, std::span<const double> x, bool transposed = false);

/// Block substitution with a unit-lower-bidiagonal operator whose sub-diagonal
/// blocks are −subdiag[j]: y_0 = r_0, y_j = r_j + subdiag[j]·y_{j−1}. The
/// transposed sweep runs backwards with subdiag[j]ᵀ.
Vector apply_Linv(std::span<const DenseMatrix> subdiag, std::span<const double> rhs, bool transposed = false);
// L̃⁻¹ rhs (or L̃⁻ᵀ rhs) for the layout's approximation.
Vector apply_Linv(const FourDVarLayout& layout, std::span<const double> rhs, bool transposed = false);
// Dense path for any unit-lower-triangular matrix.
Vector apply_Linv(const DenseMatrix& l, std::span<const double> rhs, bool transposed = false);

/// E = L·L̃⁻¹ − I from the block product formula
///   E_{i,j} = (M̃_i − M_i) M̃_{i−1} ··· M̃_{j+1}   for j < i (blocks counted from 0),
/// zero on and above the block diagonal.
DenseMatrix error_blocks(const FourDVarLayout& layout);
// Reference: L·L̃⁻¹ − I from dense triangular solves.
DenseMatrix error_blocks_direct(const FourDVarLayout& layout);

/// Norm bound on E for the Zero and Identity approximations:
///   Zero:      max_j σ_max(M_j)
///   Identity:  √((n·N_sw + 1)(n·N_sw + 2)/2) · max_j σ_max(I − M_j)
/// Throws UnsupportedVariant for Custom.
double rho_bound(const FourDVarLayout& layout);

// κ₂ of block-diagonal D from the union of block spectra.
double block_condition(std::span<const SpdMatrix> blocks);

struct BackgroundReport {
    PrecondReport spectrum;     // ball built from the true ‖E‖₂
    double kappaD = 1.0;
    std::optional<double> rho;  // absent for Custom
    double radiusRho = 0.0;
    bool containedRho = false;
    bool containedE = false;
};

/// Spectrum of (L̃⁻¹DL̃⁻ᵀ)(LᵀD⁻¹L) checked against the ball of the true ‖E‖₂
/// and, for Zero and Identity, against the looser ρ ball.
BackgroundReport background_spectrum_check(const FourDVarLayout& layout, const BlockCovariances& cov);

struct StateSystem {
    SpdMatrix matrix;
    Vector rhs;
};

/// (LᵀD⁻¹L + HᵀR⁻¹H) and LᵀD⁻¹b + HᵀR⁻¹d. Without observations only the
/// background term is assembled; d must then be absent.
StateSystem assemble_state_system(const FourDVarLayout& layout, const BlockCovariances& cov,
                                  std::span<const double> b, std::optional<std::span<const double>> d = {});

// "n nSw variant" header followed by the model blocks (and, for custom, the
// approximation blocks) in matrix text format.
FourDVarLayout read_layout(std::istream& in);
void write_layout(std::ostream& out, const FourDVarLayout& layout);
FourDVarLayout load_layout(const std::string& path);

} // namespace wlsprec
