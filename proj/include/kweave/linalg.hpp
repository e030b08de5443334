#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "kweave/errors.hpp"

namespace kweave {

using scalar = std::complex<double>;

/// A vector in canonical coordinates of a Krein space.
using KVector = std::vector<scalar>;

/// Euclidean inner product, linear in the first argument: sum x_i * conj(y_i).
scalar euclid_inner(const KVector& x, const KVector& y);

/// Euclidean norm.
double euclid_norm(const KVector& x);

/// Dense row-major complex matrix. Everything here is desk scale
/// (dimensions well below 100), so no blocking or clever storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), d_(rows * cols) {}

  static Matrix identity(std::size_t n);

  /// Stacks vectors as columns. Every vector must have length `rows`.
  static Matrix from_columns(const std::vector<KVector>& cols, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  scalar& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  const scalar& operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

  Matrix adjoint() const;  // conjugate transpose
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(scalar a) const;

  KVector apply(const KVector& x) const;
  KVector column(std::size_t j) const;

  /// this += a * b^H (rank-one update).
  void add_outer(const KVector& a, const KVector& b);

  double max_abs() const;
  double frobenius() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<scalar> d_;
};

struct EigResult {
  std::vector<double> values;  // ascending
  Matrix vectors;              // orthonormal columns, vectors.col(i) <-> values[i]
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// The contract is the decomposition itself, not the algorithm: eigenvalues
/// ascending, orthonormal eigenvectors, reconstruction residual at working
/// precision. Jacobi is plenty at these sizes and keeps the code dependency
/// free. Throws NotHermitianError if max|M - M^H| > herm_rel_tol * max|M|.
EigResult hermitian_eig(const Matrix& m, bool want_vectors = true,
                        double herm_rel_tol = 1e-8);

/// Largest singular value, i.e. the operator norm w.r.t. Euclidean norms.
double operator_norm(const Matrix& a);

/// Smallest singular value, computed as sqrt(lambda_min(A^H A)).
double smallest_singular_value(const Matrix& a);

/// Euclidean-orthonormal basis of span{vecs}, with the numerical rank cut at
/// rel_psd relative to the largest Gram eigenvalue. Returns dim x rank.
Matrix orthonormal_basis(const std::vector<KVector>& vecs, std::size_t dim,
                         double rel_psd);

/// Rebuilds V * diag(f(values)) * V^H from an eigendecomposition.
Matrix assemble_from_eig(const EigResult& e, const std::vector<double>& new_values);

/// Normalizes the phase of an eigenvector in place: the entry of largest
/// modulus (lowest index on ties) is made real positive. Keeps reports stable.
void normalize_phase(KVector& v);

}  // namespace kweave
