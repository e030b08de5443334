#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kweave/linalg.hpp"

namespace kweave {

enum class Field { real, cplx };

/// Numerical thresholds shared by every verdict in the library.
///   rel_psd  relative cutoff deciding rank / definiteness questions
///   rel_eq   relative tolerance for equality of quantities that are
///            equal in exact arithmetic
struct Tolerances {
  double rel_psd = 1e-9;
  double rel_eq = 1e-8;

  void validate() const {
    if (!(rel_psd > 0.0 && rel_psd < 1.0))
      throw ValidationError("Tolerances: rel_psd must lie in (0,1)");
    if (!(rel_eq > 0.0 && rel_eq < 1.0))
      throw ValidationError("Tolerances: rel_eq must lie in (0,1)");
  }
};

/// Finite-dimensional Krein space in canonical coordinates: the indefinite
/// inner product is  [x,y] = sum_i s_i x_i conj(y_i)  with s_i = +-1, and the
/// fundamental symmetry J is diag(s). Real spaces are the special case where
/// all stored entries have zero imaginary part; conjugation is then a no-op.
class KreinSpace {
 public:
  KreinSpace(std::size_t dim, std::vector<int> signature, Field field);

  /// All-positive signature (a plain Hilbert space in these coordinates).
  static KreinSpace trivial(std::size_t dim, Field field = Field::real);

  std::size_t dim() const { return dim_; }
  Field field() const { return field_; }
  const std::vector<int>& signature() const { return signature_; }
  double sign(std::size_t i) const { return sign_[i]; }

  std::size_t positive_count() const { return pos_; }  // p
  std::size_t negative_count() const { return dim_ - pos_; }  // q
  bool is_trivial() const { return pos_ == dim_; }

  bool operator==(const KreinSpace& o) const {
    return dim_ == o.dim_ && signature_ == o.signature_ && field_ == o.field_;
  }
  bool operator!=(const KreinSpace& o) const { return !(*this == o); }

  void check_vector(const KVector& x, const char* who) const;

 private:
  std::size_t dim_;
  std::vector<int> signature_;
  std::vector<double> sign_;  // signature as +-1.0, so J acts by exact multiplies
  Field field_;
  std::size_t pos_;
};

/// [x,y] = sum_i s_i x_i conj(y_i); linear in x, conjugate-linear in y.
scalar indefinite_inner(const KVector& x, const KVector& y, const KreinSpace& sp);

/// Jx: flips the coordinates carrying negative signature. Exact, and an
/// involution: j_apply(j_apply(x)) == x bit for bit.
KVector j_apply(const KVector& x, const KreinSpace& sp);

/// [x,y]_J = [x, Jy]; in canonical coordinates this is the Euclidean inner
/// product, which is how it is computed here.
scalar j_inner(const KVector& x, const KVector& y, const KreinSpace& sp);

/// ||x||_J = sqrt([x,x]_J), the Euclidean norm in canonical coordinates.
double j_norm(const KVector& x, const KreinSpace& sp);

}  // namespace kweave
