#include "wlsprec/fourdvar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wlsprec {

std::string_view to_string(ApproxVariant v) {
    switch (v) {
    case ApproxVariant::Zero: return "zero";
    case ApproxVariant::Identity: return "identity";
    case ApproxVariant::Custom: return "custom";
    }
    return "unknown";
}

ApproxVariant parse_approx_variant(std::string_view text) {
    if (text == "zero") return ApproxVariant::Zero;
    if (text == "identity") return ApproxVariant::Identity;
    if (text == "custom") return ApproxVariant::Custom;
    throw InvalidArgument("unknown approximation variant '" + std::string(text) + "'");
}

void FourDVarLayout::validate() const {
    if (n == 0) throw InvalidArgument("layout: state dimension must be positive");
    if (models.size() != nSw) throw DimensionMismatch("layout: expected one model block per sub-window");
    for (const auto& m : models) {
        if (m.rows() != n || m.cols() != n) throw DimensionMismatch("layout: model block is not n x n");
    }
    if (variant == ApproxVariant::Custom) {
        if (approxModels.size() != nSw) throw DimensionMismatch("layout: custom variant needs one approximation per sub-window");
        for (const auto& m : approxModels) {
            if (m.rows() != n || m.cols() != n) throw DimensionMismatch("layout: approximation block is not n x n");
        }
    }
}

DenseMatrix FourDVarLayout::approx_model(std::size_t j) const {
    if (j == 0 || j > nSw) throw InvalidArgument("layout: model index out of range");
    switch (variant) {
    case ApproxVariant::Zero: return DenseMatrix(n, n);
    case ApproxVariant::Identity: return DenseMatrix::identity(n);
    case ApproxVariant::Custom: return approxModels[j - 1];
    }
    return {};
}

FourDVarLayout FourDVarLayout::with_variant(ApproxVariant v) const {
    FourDVarLayout out = *this;
    out.variant = v;
    if (v != ApproxVariant::Custom) out.approxModels.clear();
    return out;
}

std::size_t BlockCovariances::observation_dimension() const {
    if (!hBlocks) return 0;
    std::size_t m = 0;
    for (const auto& h : *hBlocks) m += h.rows();
    return m;
}

void BlockCovariances::validate(const FourDVarLayout& layout) const {
    if (dBlocks.size() != layout.nSw + 1) throw DimensionMismatch("covariances: expected nSw + 1 background blocks");
    for (const auto& d : dBlocks) {
        if (d.size() != layout.n) throw DimensionMismatch("covariances: background block is not n x n");
    }
    if (rBlocks.has_value() != hBlocks.has_value()) {
        throw DimensionMismatch("covariances: observation operators and error covariances come together");
    }
    if (!hBlocks) return;
    if (hBlocks->size() != layout.nSw + 1 || rBlocks->size() != layout.nSw + 1) {
        throw DimensionMismatch("covariances: expected nSw + 1 observation blocks");
    }
    for (std::size_t k = 0; k <= layout.nSw; ++k) {
        if ((*hBlocks)[k].cols() != layout.n) throw DimensionMismatch("covariances: observation operator must have n columns");
        if ((*rBlocks)[k].size() != (*hBlocks)[k].rows()) {
            throw DimensionMismatch("covariances: observation covariance does not match its operator");
        }
    }
}

BlockCovariances BlockCovariances::identity(const FourDVarLayout& layout) {
    BlockCovariances cov;
    cov.dBlocks.assign(layout.nSw + 1, SpdMatrix(DenseMatrix::identity(layout.n)));
    return cov;
}

namespace {

DenseMatrix assemble_bidiagonal(std::size_t n, std::size_t nSw, const auto& block_at) {
    const std::size_t dim = n * (nSw + 1);
    DenseMatrix l = DenseMatrix::identity(dim);
    for (std::size_t j = 1; j <= nSw; ++j) {
        l.set_block(j * n, (j - 1) * n, -1.0 * block_at(j));
    }
    return l;
}

std::span<const double> segment(std::span<const double> v, std::size_t k, std::size_t n) { return v.subspan(k * n, n); }

} // namespace

DenseMatrix assemble_L(const FourDVarLayout& layout) {
    layout.validate();
    return assemble_bidiagonal(layout.n, layout.nSw, [&](std::size_t j) { return layout.models[j - 1]; });
}

DenseMatrix assemble_Ltilde(const FourDVarLayout& layout) {
    layout.validate();
    return assemble_bidiagonal(layout.n, layout.nSw, [&](std::size_t j) { return layout.approx_model(j); });
}

DenseMatrix block_diagonal(std::span<const SpdMatrix> blocks) {
    std::size_t dim = 0;
    for (const auto& b : blocks) dim += b.size();
    DenseMatrix d(dim, dim);
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        d.set_block(offset, offset, b.matrix());
        offset += b.size();
    }
    return d;
}

Vector apply_L(const FourDVarLayout& layout, std::span<const double> x, bool transposed) {
    layout.validate();
    if (x.size() != layout.dimension()) throw DimensionMismatch("apply_L: vector size mismatch");
    const std::size_t n = layout.n;
    Vector y(x.begin(), x.end());
    for (std::size_t j = 1; j <= layout.nSw; ++j) {
        const DenseMatrix& m = layout.models[j - 1];
        if (!transposed) {
            const Vector mx = m * segment(x, j - 1, n);
            for (std::size_t i = 0; i < n; ++i) y[j * n + i] -= mx[i];
        } else {
            const Vector mtx = multiply_transposed(m, segment(x, j, n));
            for (std::size_t i = 0; i < n; ++i) y[(j - 1) * n + i] -= mtx[i];
        }
    }
    return y;
}

Vector apply_Linv(std::span<const DenseMatrix> subdiag, std::span<const double> rhs, bool transposed) {
    const std::size_t windows = subdiag.size() + 1;
    if (rhs.size() % windows != 0) throw DimensionMismatch("apply_Linv: vector size is not a multiple of the window count");
    const std::size_t n = rhs.size() / windows;
    for (const auto& b : subdiag) {
        if (b.rows() != n || b.cols() != n) throw DimensionMismatch("apply_Linv: block size mismatch");
    }
    Vector y(rhs.begin(), rhs.end());
    // Each window depends on its neighbour, so the sweep is sequential.
    if (!transposed) {
        for (std::size_t k = 1; k < windows; ++k) {
            const Vector t = subdiag[k - 1] * std::span<const double>(y).subspan((k - 1) * n, n);
            for (std::size_t i = 0; i < n; ++i) y[k * n + i] += t[i];
        }
    } else {
        for (std::size_t k = windows - 1; k-- > 0;) {
            const Vector t = multiply_transposed(subdiag[k], std::span<const double>(y).subspan((k + 1) * n, n));
            for (std::size_t i = 0; i < n; ++i) y[k * n + i] += t[i];
        }
    }
    return y;
}

Vector apply_Linv(const FourDVarLayout& layout, std::span<const double> rhs, bool transposed) {
    layout.validate();
    if (rhs.size() != layout.dimension()) throw DimensionMismatch("apply_Linv: vector size mismatch");
    if (layout.variant == ApproxVariant::Zero) return Vector(rhs.begin(), rhs.end());
    if (layout.variant == ApproxVariant::Identity) {
        const std::size_t n = layout.n;
        Vector y(rhs.begin(), rhs.end());
        if (!transposed) {
            for (std::size_t i = n; i < y.size(); ++i) y[i] += y[i - n];
        } else {
            for (std::size_t i = y.size() - n; i-- > 0;) y[i] += y[i + n];
        }
        return y;
    }
    return apply_Linv(std::span<const DenseMatrix>(layout.approxModels), rhs, transposed);
}

Vector apply_Linv(const DenseMatrix& l, std::span<const double> rhs, bool transposed) {
    return triangular_solve(l, rhs, transposed);
}

DenseMatrix error_blocks(const FourDVarLayout& layout) {
    layout.validate();
    const std::size_t n = layout.n;
    DenseMatrix e(layout.dimension(), layout.dimension());
    for (std::size_t i = 1; i <= layout.nSw; ++i) {
        DenseMatrix current = layout.approx_model(i) - layout.models[i - 1];
        for (std::size_t j = i; j-- > 0;) {
            e.set_block(i * n, j * n, current);
            if (j > 0) current = current * layout.approx_model(j);
        }
    }
    return e;
}

DenseMatrix error_blocks_direct(const FourDVarLayout& layout) {
    const DenseMatrix l = assemble_L(layout);
    const DenseMatrix ltilde = assemble_Ltilde(layout);
    const DenseMatrix ltilde_inv = triangular_solve(ltilde, DenseMatrix::identity(ltilde.rows()), false);
    DenseMatrix e = l * ltilde_inv;
    for (std::size_t i = 0; i < e.rows(); ++i) e(i, i) -= 1.0;
    return e;
}

double rho_bound(const FourDVarLayout& layout) {
    layout.validate();
    double worst = 0.0;
    switch (layout.variant) {
    case ApproxVariant::Zero:
        for (const auto& m : layout.models) worst = std::max(worst, spectral_norm(m));
        return worst;
    case ApproxVariant::Identity: {
        for (const auto& m : layout.models) worst = std::max(worst, spectral_norm(DenseMatrix::identity(layout.n) - m));
        const double nn = static_cast<double>(layout.n * layout.nSw);
        return std::sqrt((nn + 1.0) * (nn + 2.0) / 2.0) * worst;
    }
    case ApproxVariant::Custom:
        break;
    }
    throw UnsupportedVariant("rho_bound covers only the zero and identity approximations");
}

double block_condition(std::span<const SpdMatrix> blocks) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& b : blocks) {
        if (b.size() == 0) continue;
        const Vector ev = sym_eigen(b.matrix()).values;
        if (!(ev.front() > 0.0)) throw NotPositiveDefinite("block_condition: nonpositive eigenvalue");
        lo = first ? ev.front() : std::min(lo, ev.front());
        hi = first ? ev.back() : std::max(hi, ev.back());
        first = false;
    }
    return first ? 1.0 : hi / lo;
}

BackgroundReport background_spectrum_check(const FourDVarLayout& layout, const BlockCovariances& cov) {
    layout.validate();
    cov.validate(layout);
    BackgroundReport out;
    out.kappaD = block_condition(cov.dBlocks);
    const SpdMatrix d(block_diagonal(cov.dBlocks));
    VerifyOptions options;
    options.kappaW = out.kappaD;
    out.spectrum = verify_spectrum(assemble_L(layout), assemble_Ltilde(layout), d, options);
    out.containedE = out.spectrum.contained;
    if (layout.variant != ApproxVariant::Custom) {
        out.rho = rho_bound(layout);
        const SpectrumBall ball = spectrum_ball(*out.rho, out.kappaD);
        out.radiusRho = ball.radius;
        out.containedRho = std::all_of(out.spectrum.eigenvalues.begin(), out.spectrum.eigenvalues.end(),
                                       [&](double lambda) { return ball.contains(lambda); });
    }
    return out;
}

StateSystem assemble_state_system(const FourDVarLayout& layout, const BlockCovariances& cov,
                                  std::span<const double> b, std::optional<std::span<const double>> d) {
    layout.validate();
    cov.validate(layout);
    if (b.size() != layout.dimension()) throw DimensionMismatch("state system: background vector has the wrong size");
    if (d.has_value() != cov.has_observations()) {
        throw DimensionMismatch("state system: observation vector must accompany observation operators");
    }
    if (d && d->size() != cov.observation_dimension()) {
        throw DimensionMismatch("state system: observation vector has the wrong size");
    }

    const SpdMatrix dmat(block_diagonal(cov.dBlocks));
    const DenseMatrix& g = dmat.cholesky_factor();
    const DenseMatrix c = triangular_solve(g, assemble_L(layout), false);
    DenseMatrix system = c.transpose() * c;
    Vector rhs = multiply_transposed(c, dmat.whiten(b));

    if (cov.has_observations()) {
        const std::size_t n = layout.n;
        std::size_t offset = 0;
        for (std::size_t k = 0; k <= layout.nSw; ++k) {
            const DenseMatrix& h = (*cov.hBlocks)[k];
            const SpdMatrix& r = (*cov.rBlocks)[k];
            const DenseMatrix ch = triangular_solve(r.cholesky_factor(), h, false);
            const DenseMatrix term = ch.transpose() * ch;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) system(k * n + i, k * n + j) += term(i, j);
            const Vector dk(d->begin() + static_cast<std::ptrdiff_t>(offset),
                            d->begin() + static_cast<std::ptrdiff_t>(offset + h.rows()));
            const Vector contrib = multiply_transposed(ch, r.whiten(dk));
            for (std::size_t i = 0; i < n; ++i) rhs[k * n + i] += contrib[i];
            offset += h.rows();
        }
    }
    return StateSystem{SpdMatrix(system), std::move(rhs)};
}

FourDVarLayout read_layout(std::istream& in) {
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            found = true;
            break;
        }
    }
    if (!found) throw ParseError("layout: missing header");
    std::istringstream header(line);
    long long n = -1, nSw = -1;
    std::string variant, extra;
    if (!(header >> n >> nSw >> variant) || (header >> extra) || n <= 0 || nSw < 0) {
        throw ParseError("layout: malformed header '" + line + "'");
    }
    FourDVarLayout layout;
    layout.n = static_cast<std::size_t>(n);
    layout.nSw = static_cast<std::size_t>(nSw);
    try {
        layout.variant = parse_approx_variant(variant);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("layout: ") + e.what());
    }
    for (long long j = 0; j < nSw; ++j) layout.models.push_back(read_matrix(in));
    if (layout.variant == ApproxVariant::Custom) {
        for (long long j = 0; j < nSw; ++j) layout.approxModels.push_back(read_matrix(in));
    }
    try {
        layout.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("layout: ") + e.what());
    }
    return layout;
}

void write_layout(std::ostream& out, const FourDVarLayout& layout) {
    out << layout.n << ' ' << layout.nSw << ' ' << to_string(layout.variant) << '\n';
    for (const auto& m : layout.models) write_matrix(out, m);
    if (layout.variant == ApproxVariant::Custom) {
        for (const auto& m : layout.approxModels) write_matrix(out, m);
    }
}

FourDVarLayout load_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    try {
        return read_layout(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace wlsprec
