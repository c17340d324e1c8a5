#include "wlsprec/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace wlsprec {

namespace {

void require_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("matrix entries must be finite");
    }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch(std::string(what) + ": shape mismatch");
    }
}

} // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (!std::isfinite(fill)) throw InvalidArgument("matrix fill value must be finite");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) throw DimensionMismatch("entry count does not match rows x cols");
    require_finite(data_);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
    require_finite(diag);
    DenseMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Vector DenseMatrix::column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
    DenseMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void DenseMatrix::set_block(std::size_t r0, std::size_t c0, const DenseMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionMismatch("block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
    require_same_shape(*this, o, "matrix addition");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
    require_same_shape(*this, o, "matrix subtraction");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

double DenseMatrix::frobenius_norm() const { return norm2(data_); }

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vector operator*(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product: size mismatch");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x) {
    if (a.rows() != x.size()) throw DimensionMismatch("transposed product: size mismatch");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
    }
    return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) {
    // Scaled accumulation; entries here can span 1e-20..1e20 for badly weighted systems.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) {
        const double t = v / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

double relative_difference(const DenseMatrix& a, const DenseMatrix& b) {
    const double denom = std::max(b.frobenius_norm(), std::numeric_limits<double>::min());
    return (a - b).frobenius_norm() / denom;
}

DenseMatrix cholesky(const DenseMatrix& m) {
    if (!m.square()) throw DimensionMismatch("cholesky: matrix must be square");
    const std::size_t n = m.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
    if (n > 0 && max_diag <= 0.0) throw NotPositiveDefinite("cholesky: nonpositive diagonal");
    const double threshold = 1e-12 * max_diag;

    DenseMatrix g(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = m(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= g(j, k) * g(j, k);
        if (!(pivot > threshold)) {
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " below threshold");
        }
        const double gjj = std::sqrt(pivot);
        g(j, j) = gjj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
            g(i, j) = s / gjj;
        }
    }
    return g;
}

Vector triangular_solve(const DenseMatrix& l, std::span<const double> b, bool transposed) {
    if (!l.square() || l.rows() != b.size()) throw DimensionMismatch("triangular_solve: size mismatch");
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(l(i, i)) < 1e-300) throw SingularTriangular("triangular_solve: zero diagonal entry");
    }
    Vector x(b.begin(), b.end());
    if (!transposed) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
            x[i] = s / l(i, i);
        }
    } else {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
            x[ii] = s / l(ii, ii);
        }
    }
    return x;
}

DenseMatrix triangular_solve(const DenseMatrix& l, const DenseMatrix& b, bool transposed) {
    if (l.rows() != b.rows()) throw DimensionMismatch("triangular_solve: size mismatch");
    DenseMatrix x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const Vector col = triangular_solve(l, b.column(j), transposed);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
    }
    return x;
}

SpdMatrix::SpdMatrix(const DenseMatrix& m) {
    if (!m.square()) throw DimensionMismatch("SpdMatrix: matrix must be square");
    const DenseMatrix mt = m.transpose();
    const double asym = (m - mt).frobenius_norm();
    if (asym > 1e-12 * m.frobenius_norm()) throw NotSymmetric("SpdMatrix: matrix is not symmetric");
    base_ = 0.5 * (m + mt);
    chol_ = cholesky(base_);
}

Vector SpdMatrix::solve(std::span<const double> x) const {
    return triangular_solve(chol_, triangular_solve(chol_, x, false), true);
}

Vector SpdMatrix::whiten(std::span<const double> x) const { return triangular_solve(chol_, x, false); }

SymEigen sym_eigen(const DenseMatrix& m, bool with_vectors) {
    if (!m.square()) throw DimensionMismatch("sym_eigen: matrix must be square");
    const std::size_t n = m.rows();
    DenseMatrix a = m;
    DenseMatrix v = with_vectors ? DenseMatrix::identity(n) : DenseMatrix();
    const double threshold = 1e-12 * m.frobenius_norm();

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > threshold) {
        if (++sweep > kJacobiMaxSweeps) throw NoConvergence("sym_eigen: Jacobi sweep cap reached");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                if (with_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = v(k, p);
                        const double vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEigen out;
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.values[k] = a(order[k], order[k]);
    if (with_vectors) {
        out.vectors = DenseMatrix(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

Vector singular_values(const DenseMatrix& m) {
    // Work on the orientation with at most as many columns as rows.
    DenseMatrix u = m.rows() >= m.cols() ? m : m.transpose();
    const std::size_t rows = u.rows();
    const std::size_t cols = u.cols();
    const double tol = 4.0 * DBL_EPSILON;

    for (int sweep = 0;; ++sweep) {
        if (sweep >= kJacobiMaxSweeps) throw NoConvergence("singular_values: one-sided Jacobi sweep cap reached");
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < cols; ++i) {
            for (std::size_t j = i + 1; j < cols; ++j) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t k = 0; k < rows; ++k) {
                    alpha += u(k, i) * u(k, i);
                    beta += u(k, j) * u(k, j);
                    gamma += u(k, i) * u(k, j);
                }
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(zeta, 1.0));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < rows; ++k) {
                    const double uki = u(k, i);
                    const double ukj = u(k, j);
                    u(k, i) = c * uki - s * ukj;
                    u(k, j) = s * uki + c * ukj;
                }
            }
        }
        if (!rotated) break;
    }

    Vector sigma(cols);
    for (std::size_t j = 0; j < cols; ++j) sigma[j] = norm2(u.column(j));
    std::sort(sigma.begin(), sigma.end());
    return sigma;
}

double spectral_norm(const DenseMatrix& m) {
    if (m.empty()) return 0.0;
    const DenseMatrix gram = m.transpose() * m;
    const double top = sym_eigen(gram).values.back();
    return std::sqrt(std::max(top, 0.0));
}

double spd_condition(const SpdMatrix& m) {
    if (m.size() == 0) return 1.0;
    const Vector ev = sym_eigen(m.matrix()).values;
    if (!(ev.front() > 0.0)) throw NotPositiveDefinite("spd_condition: nonpositive eigenvalue");
    return ev.back() / ev.front();
}

Vector generalized_eigs(const SpdMatrix& n, const SpdMatrix& p) {
    if (n.size() != p.size()) throw DimensionMismatch("generalized_eigs: size mismatch");
    const DenseMatrix& g = p.cholesky_factor();
    // g⁻¹ n g⁻ᵀ = g⁻¹ (g⁻¹ n)ᵀ because n is symmetric.
    const DenseMatrix left = triangular_solve(g, n.matrix(), false);
    DenseMatrix whitened = triangular_solve(g, left.transpose(), false);
    whitened = 0.5 * (whitened + whitened.transpose());
    Vector ev = sym_eigen(whitened).values;
    if (!ev.empty() && !(ev.front() > 0.0)) {
        throw NotPositiveDefinite("generalized_eigs: nonpositive eigenvalue after whitening");
    }
    return ev;
}

LuFactor::LuFactor(const DenseMatrix& a, double pivot_tol) : lu_(a), perm_(a.rows()) {
    if (!a.square()) throw DimensionMismatch("LuFactor: matrix must be square");
    const std::size_t n = a.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double threshold = pivot_tol * a.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
        }
        if (!(std::abs(lu_(piv, k)) >= threshold) || lu_(piv, k) == 0.0) {
            throw SingularMatrix("LuFactor: pivot " + std::to_string(k) + " below threshold");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[k], perm_[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu_(i, k) / lu_(k, k);
            lu_(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

Vector LuFactor::solve(std::span<const double> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw DimensionMismatch("LuFactor::solve: size mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[perm_[i]];
        for (std::size_t k = 0; k < i; ++k) s -= lu_(i, k) * x[k];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= lu_(i, k) * x[k];
        x[i] = s / lu_(i, i);
    }
    return x;
}

Vector LuFactor::solve_transposed(std::span<const double> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw DimensionMismatch("LuFactor::solve_transposed: size mismatch");
    // aᵀ = Uᵀ Lᵀ P, so solve Uᵀ w = b, Lᵀ v = w, then x = Pᵀ v.
    Vector w(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = w[i];
        for (std::size_t k = 0; k < i; ++k) s -= lu_(k, i) * w[k];
        w[i] = s / lu_(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = w[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= lu_(k, i) * w[k];
        w[i] = s;
    }
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = w[i];
    return x;
}

namespace {

bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

} // namespace

DenseMatrix read_matrix(std::istream& in) {
    std::string line;
    if (!next_content_line(in, line)) throw ParseError("missing matrix header");
    std::istringstream header(line);
    long long rows = -1, cols = -1;
    std::string extra;
    if (!(header >> rows >> cols) || (header >> extra) || rows < 0 || cols < 0) {
        throw ParseError("malformed matrix header: '" + line + "'");
    }
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(rows * cols));
    for (long long i = 0; i < rows; ++i) {
        if (!next_content_line(in, line)) throw ParseError("matrix ends after " + std::to_string(i) + " rows");
        std::istringstream row(line);
        std::string token;
        long long count = 0;
        while (row >> token) {
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0') throw ParseError("not a number: '" + token + "'");
            if (!std::isfinite(v)) throw ParseError("non-finite entry: '" + token + "'");
            entries.push_back(v);
            ++count;
        }
        if (count != cols) {
            throw ParseError("row " + std::to_string(i) + " has " + std::to_string(count) + " entries, expected " +
                             std::to_string(cols));
        }
    }
    return DenseMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(entries));
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j > 0) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

DenseMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    try {
        return read_matrix(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_matrix(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(path + ": cannot open for writing");
    write_matrix(out, m);
}

} // namespace wlsprec
