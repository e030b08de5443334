#include "kweave/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kweave {

scalar euclid_inner(const KVector& x, const KVector& y) {
  if (x.size() != y.size())
    throw DimensionError("euclid_inner: length mismatch (" +
                         std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  scalar s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * std::conj(y[i]);
  return s;
}

double euclid_norm(const KVector& x) {
  double s = 0.0;
  for (const scalar& v : x) s += std::norm(v);
  return std::sqrt(s);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<KVector>& cols, std::size_t rows) {
  Matrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows)
      throw DimensionError("from_columns: column " + std::to_string(j) +
                           " has length " + std::to_string(cols[j].size()) +
                           ", expected " + std::to_string(rows));
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw DimensionError("matrix product: inner dimensions " + std::to_string(cols_) +
                         " vs " + std::to_string(rhs.rows_));
  Matrix m(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const scalar a = (*this)(i, k);
      if (a == scalar(0.0)) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) m(i, j) += a * rhs(k, j);
    }
  return m;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionError("matrix sum: shape mismatch");
  Matrix m(rows_, cols_);
  for (std::size_t i = 0; i < d_.size(); ++i) m.d_[i] = d_[i] + rhs.d_[i];
  return m;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionError("matrix difference: shape mismatch");
  Matrix m(rows_, cols_);
  for (std::size_t i = 0; i < d_.size(); ++i) m.d_[i] = d_[i] - rhs.d_[i];
  return m;
}

Matrix Matrix::scaled(scalar a) const {
  Matrix m(rows_, cols_);
  for (std::size_t i = 0; i < d_.size(); ++i) m.d_[i] = a * d_[i];
  return m;
}

KVector Matrix::apply(const KVector& x) const {
  if (x.size() != cols_)
    throw DimensionError("matrix apply: vector length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(cols_));
  KVector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    scalar s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

KVector Matrix::column(std::size_t j) const {
  KVector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Matrix::add_outer(const KVector& a, const KVector& b) {
  if (a.size() != rows_ || b.size() != cols_)
    throw DimensionError("add_outer: shape mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    const scalar ai = a[i];
    if (ai == scalar(0.0)) continue;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) += ai * std::conj(b[j]);
  }
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const scalar& v : d_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (const scalar& v : d_) s += std::norm(v);
  return std::sqrt(s);
}

namespace {

double offdiag_norm(const Matrix& a) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

EigResult hermitian_eig(const Matrix& m, bool want_vectors, double herm_rel_tol) {
  if (m.rows() != m.cols())
    throw DimensionError("hermitian_eig: matrix is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
  const std::size_t n = m.rows();
  EigResult out;
  out.vectors = Matrix::identity(want_vectors ? n : 0);
  if (n == 0) return out;

  const double scale = m.max_abs();
  double dev = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
  if (dev > herm_rel_tol * std::max(scale, 1e-300))
    throw NotHermitianError("hermitian_eig: deviation from Hermitian is " +
                            std::to_string(dev) + " against scale " + std::to_string(scale));

  // Work on the symmetrized copy; tiny skew parts and diagonal imaginaries vanish.
  Matrix a = (m + m.adjoint()).scaled(0.5);
  Matrix& v = out.vectors;

  const double fro = a.frobenius();
  if (fro > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < 100; ++sweep) {
      if (offdiag_norm(a) <= 1e-14 * fro) { converged = true; break; }
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const scalar g = a(p, q);
          const double ag = std::abs(g);
          const double app = a(p, p).real();
          const double aqq = a(q, q).real();
          if (ag <= 1e-300 || ag <= 1e-18 * (std::abs(app) + std::abs(aqq))) {
            a(p, q) = a(q, p) = 0.0;
            continue;
          }
          // Unitary 2x2 rotation annihilating a(p,q); standard tangent formula,
          // phase of a(p,q) folded into the complex sine.
          const double tau = (aqq - app) / (2.0 * ag);
          const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double sr = t * c;
          const scalar u = g / ag;
          const scalar s = sr * u;
          for (std::size_t i = 0; i < n; ++i) {
            if (i == p || i == q) continue;
            const scalar aip = a(i, p);
            const scalar aiq = a(i, q);
            a(i, p) = c * aip - std::conj(s) * aiq;
            a(i, q) = s * aip + c * aiq;
            a(p, i) = std::conj(a(i, p));
            a(q, i) = std::conj(a(i, q));
          }
          a(p, p) = app * c * c + aqq * sr * sr - 2.0 * c * sr * ag;
          a(q, q) = app * sr * sr + aqq * c * c + 2.0 * c * sr * ag;
          a(p, q) = a(q, p) = 0.0;
          if (want_vectors) {
            for (std::size_t i = 0; i < n; ++i) {
              const scalar vip = v(i, p);
              const scalar viq = v(i, q);
              v(i, p) = c * vip - std::conj(s) * viq;
              v(i, q) = s * vip + c * viq;
            }
          }
        }
      }
    }
    if (!converged && offdiag_norm(a) > 1e-12 * fro)
      throw Error("hermitian_eig: Jacobi sweeps failed to converge");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = diag[order[i]];
  if (want_vectors) {
    Matrix sorted(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      KVector col = v.column(order[j]);
      normalize_phase(col);
      for (std::size_t i = 0; i < n; ++i) sorted(i, j) = col[i];
    }
    out.vectors = std::move(sorted);
  }
  return out;
}

double operator_norm(const Matrix& a) {
  const EigResult e = hermitian_eig(a.adjoint() * a, false);
  return e.values.empty() ? 0.0 : std::sqrt(std::max(0.0, e.values.back()));
}

double smallest_singular_value(const Matrix& a) {
  const EigResult e = hermitian_eig(a.adjoint() * a, false);
  return e.values.empty() ? 0.0 : std::sqrt(std::max(0.0, e.values.front()));
}

Matrix orthonormal_basis(const std::vector<KVector>& vecs, std::size_t dim,
                         double rel_psd) {
  const Matrix y = Matrix::from_columns(vecs, dim);
  if (vecs.empty()) return Matrix(dim, 0);
  const EigResult g = hermitian_eig(y.adjoint() * y);
  const double lmax = g.values.empty() ? 0.0 : g.values.back();
  if (lmax <= 0.0) return Matrix(dim, 0);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < g.values.size(); ++i)
    if (g.values[i] > rel_psd * lmax) keep.push_back(i);
  Matrix q(dim, keep.size());
  for (std::size_t jj = 0; jj < keep.size(); ++jj) {
    const std::size_t j = keep[jj];
    const double inv = 1.0 / std::sqrt(g.values[j]);
    // q_col = Y * v_j / sqrt(lambda_j)
    for (std::size_t i = 0; i < dim; ++i) {
      scalar s = 0.0;
      for (std::size_t k = 0; k < vecs.size(); ++k) s += y(i, k) * g.vectors(k, j);
      q(i, jj) = s * inv;
    }
  }
  return q;
}

Matrix assemble_from_eig(const EigResult& e, const std::vector<double>& new_values) {
  const std::size_t n = e.vectors.rows();
  if (new_values.size() != n || e.vectors.cols() != n)
    throw DimensionError("assemble_from_eig: size mismatch");
  Matrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (new_values[k] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const scalar vik = e.vectors(i, k) * new_values[k];
      for (std::size_t j = 0; j < n; ++j) m(i, j) += vik * std::conj(e.vectors(j, k));
    }
  }
  return m;
}

void normalize_phase(KVector& v) {
  std::size_t best = 0;
  double mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mag + 1e-15 * std::max(1.0, mag)) { mag = a; best = i; }
  }
  if (mag <= 0.0) return;
  const scalar phase = v[best] / std::abs(v[best]);
  for (scalar& x : v) x /= phase;
  v[best] = scalar(std::abs(v[best]), 0.0);  // clear residual imaginary dust
}

}  // namespace kweave
