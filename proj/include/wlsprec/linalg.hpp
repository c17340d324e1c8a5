#pragma once

// Dense real linear algebra for desk-scale problems (n up to a few hundred).
//
// Everything here is value-semantic: matrices are row-major, immutable once
// handed to an algorithm, and every routine is a pure function of its inputs.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wlsprec/errors.hpp"

namespace wlsprec {

using Vector = std::vector<double>;

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    // Takes ownership of row-major entries; rejects size mismatch and non-finite values.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> diag);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;
    std::span<const double> entries() const { return data_; }

    DenseMatrix transpose() const;
    DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const DenseMatrix& b);

    DenseMatrix& operator+=(const DenseMatrix& o);
    DenseMatrix& operator-=(const DenseMatrix& o);
    DenseMatrix& operator*=(double s);

    double frobenius_norm() const;
    double max_abs() const;

    bool operator==(const DenseMatrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
Vector operator*(const DenseMatrix& a, std::span<const double> x);

// y = aᵀ x without forming the transpose.
Vector multiply_transposed(const DenseMatrix& a, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

// Relative Frobenius distance ‖a − b‖_F / max(‖b‖_F, tiny).
double relative_difference(const DenseMatrix& a, const DenseMatrix& b);

/// Lower Cholesky factor g with g·gᵀ = m.
///
/// The pivot d_k = m_kk − Σ g_kj² must exceed 1e-12 × max_i m_ii, otherwise
/// NotPositiveDefinite is thrown. Only the lower triangle of m is read.
DenseMatrix cholesky(const DenseMatrix& m);

/// Solves l·x = b (or lᵀ·x = b) for lower-triangular l.
Vector triangular_solve(const DenseMatrix& l, std::span<const double> b, bool transposed = false);
// Column-wise version: solves l·X = B (or lᵀ·X = B).
DenseMatrix triangular_solve(const DenseMatrix& l, const DenseMatrix& b, bool transposed = false);

class SpdMatrix {
public:
    // Symmetrizes, checks symmetry to 1e-12 relative, then factors.
    explicit SpdMatrix(const DenseMatrix& m);

    const DenseMatrix& matrix() const { return base_; }
    const DenseMatrix& cholesky_factor() const { return chol_; }
    std::size_t size() const { return base_.rows(); }

    Vector apply(std::span<const double> x) const { return base_ * x; }
    // m⁻¹ x through the two triangular solves.
    Vector solve(std::span<const double> x) const;
    // g⁻¹ x, the whitening transform.
    Vector whiten(std::span<const double> x) const;

private:
    DenseMatrix base_;
    DenseMatrix chol_;
};

struct SymEigen {
    Vector values;        // ascending
    DenseMatrix vectors;  // column k pairs with values[k]; empty unless requested
};

inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps until the off-diagonal Frobenius norm falls below 1e-12 × ‖m‖_F;
/// throws NoConvergence after kJacobiMaxSweeps sweeps.
SymEigen sym_eigen(const DenseMatrix& m, bool with_vectors = false);

/// Singular values (ascending) by one-sided Jacobi.
///
/// Small singular values come out with high relative accuracy when the
/// column-scaled matrix is well conditioned, which the eigenvalues of mᵀm
/// formed explicitly cannot offer.
Vector singular_values(const DenseMatrix& m);

double spectral_norm(const DenseMatrix& m);
double spd_condition(const SpdMatrix& m);

/// Eigenvalues (ascending) of p⁻¹·n by whitening with the Cholesky factor of p.
Vector generalized_eigs(const SpdMatrix& n, const SpdMatrix& p);

/// LU factorization with partial pivoting of a square matrix.
class LuFactor {
public:
    // Throws SingularMatrix if a pivot falls below pivot_tol × max|entry|.
    explicit LuFactor(const DenseMatrix& a, double pivot_tol = 1e-12);

    std::size_t size() const { return lu_.rows(); }
    Vector solve(std::span<const double> b) const;             // a x = b
    Vector solve_transposed(std::span<const double> b) const;  // aᵀ x = b

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

// Text format: "rows cols" header then one line per row, 17 significant digits.
DenseMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const DenseMatrix& m);
DenseMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const DenseMatrix& m);

} // namespace wlsprec
