#include "wlsprec/random_instances.hpp"

#include <algorithm>
#include <cmath>

namespace wlsprec {

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

DenseMatrix random_normal(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> normal;
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = normal(rng);
    return m;
}

DenseMatrix random_orthogonal(std::mt19937_64& rng, std::size_t n) {
    DenseMatrix q = random_normal(rng, n, n);
    // Modified Gram-Schmidt, applied twice for orthogonality to working precision.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                double proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += q(i, k) * q(i, j);
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
            }
            const double nrm = norm2(q.column(j));
            for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
        }
    }
    return q;
}

SpdMatrix random_spd(std::mt19937_64& rng, std::size_t n, double kappa) {
    if (!(kappa >= 1.0)) throw InvalidArgument("random_spd: kappa must be >= 1");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = std::pow(kappa, unit(rng));
    lambda[0] = 1.0;
    if (n > 1) lambda[1] = kappa;
    const DenseMatrix q = random_orthogonal(rng, n);
    DenseMatrix qd = q;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) qd(i, j) *= lambda[j];
    DenseMatrix w = qd * q.transpose();
    return SpdMatrix(0.5 * (w + w.transpose()));
}

WlsqInstance random_wlsq_instance(std::uint64_t seed, std::uint64_t index, std::size_t maxDim) {
    if (maxDim < 2) throw InvalidArgument("random_wlsq_instance: maxDim must be >= 2");
    std::mt19937_64 rng = instance_rng(seed, index);
    std::uniform_int_distribution<std::size_t> dim(2, maxDim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const std::size_t n = dim(rng);
        const double kappa = std::pow(10.0, 4.0 * unit(rng));
        const double s = std::pow(10.0, -8.0 + (8.0 + std::log10(3.0)) * unit(rng));
        DenseMatrix a = random_normal(rng, n, n);
        DenseMatrix aTilde = a + s * random_normal(rng, n, n);
        SpdMatrix w = random_spd(rng, n, kappa);
        try {
            LuFactor check_a(a);
            LuFactor check_tilde(aTilde);
        } catch (const SingularMatrix&) {
            continue;  // measure-zero event; draw again from the same stream
        }
        return WlsqInstance{std::move(a), std::move(aTilde), std::move(w), kappa, s};
    }
}

FourDVarLayout random_layout(std::uint64_t seed, std::uint64_t index, std::size_t maxN, std::size_t maxNsw,
                             ApproxVariant variant) {
    std::mt19937_64 rng = instance_rng(seed, index);
    std::uniform_int_distribution<std::size_t> ndist(1, std::max<std::size_t>(maxN, 1));
    std::uniform_int_distribution<std::size_t> swdist(0, maxNsw);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    FourDVarLayout layout;
    layout.n = ndist(rng);
    layout.nSw = swdist(rng);
    layout.variant = variant;
    const std::size_t n = layout.n;
    for (std::size_t j = 0; j < layout.nSw; ++j) {
        const double spread = std::pow(10.0, -2.0 + 2.0 * unit(rng));
        DenseMatrix noise = (spread / std::sqrt(static_cast<double>(n))) * random_normal(rng, n, n);
        if (variant == ApproxVariant::Identity) noise += DenseMatrix::identity(n);
        layout.models.push_back(std::move(noise));
    }
    if (variant == ApproxVariant::Custom) {
        for (std::size_t j = 0; j < layout.nSw; ++j) {
            const double spread = std::pow(10.0, -3.0 + 2.0 * unit(rng));
            layout.approxModels.push_back(layout.models[j] + spread * random_normal(rng, n, n));
        }
    }
    return layout;
}

BlockCovariances random_covariances(std::mt19937_64& rng, const FourDVarLayout& layout, double maxKappa) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BlockCovariances cov;
    for (std::size_t k = 0; k <= layout.nSw; ++k) {
        const double scale = std::pow(10.0, -1.0 + 2.0 * unit(rng));
        const SpdMatrix block = random_spd(rng, layout.n, std::pow(maxKappa, unit(rng)));
        cov.dBlocks.emplace_back(scale * block.matrix());
    }
    return cov;
}

} // namespace wlsprec
