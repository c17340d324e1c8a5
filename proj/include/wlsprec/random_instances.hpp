#pragma once

// Seeded generators for the randomized property checks.
//
// Every instance draws from its own stream derived from (seed, index), so a
// failing case is reproducible from those two numbers alone and instances can
// be evaluated in any order.

#include <cstdint>
#include <random>

#include "wlsprec/fourdvar.hpp"
#include "wlsprec/linalg.hpp"

namespace wlsprec {

inline constexpr std::uint64_t kDefaultSeed = 42;

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index);

DenseMatrix random_normal(std::mt19937_64& rng, std::size_t rows, std::size_t cols);
DenseMatrix random_orthogonal(std::mt19937_64& rng, std::size_t n);

// Q·Λ·Qᵀ with Λ spanning exactly [1, kappa]; interior eigenvalues log-uniform.
SpdMatrix random_spd(std::mt19937_64& rng, std::size_t n, double kappa);

struct WlsqInstance {
    DenseMatrix a;
    DenseMatrix aTilde;
    SpdMatrix w;
    double kappaW = 1.0;        // exact by construction
    double perturbation = 0.0;  // scale of Ã − A
};

/// n uniform in [2, maxDim], A with unit-normal entries, κ₂(W) log-uniform in
/// [1, 1e4], and Ã = A + s·N with s log-uniform in [1e-8, 3] so that both
/// admissible and wildly inadmissible approximations occur.
WlsqInstance random_wlsq_instance(std::uint64_t seed, std::uint64_t index, std::size_t maxDim);

/// n in [1, maxN], N_sw in [0, maxNsw], models scattered around the variant's
/// own approximation (zero, identity, or a perturbed copy for custom).
FourDVarLayout random_layout(std::uint64_t seed, std::uint64_t index, std::size_t maxN, std::size_t maxNsw,
                             ApproxVariant variant);

// Background blocks with condition numbers log-uniform in [1, maxKappa].
BlockCovariances random_covariances(std::mt19937_64& rng, const FourDVarLayout& layout, double maxKappa);

} // namespace wlsprec
