#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kweave/krein.hpp"

namespace kweave {

/// Optimal frame bounds: lower/upper are the extremal eigenvalues of the
/// quadratic-form matrix of the family (clamped at zero from below).
struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool is_frame = false;  // lower > rel_psd * upper
};

/// A finite indexed family of vectors in a common Krein space. Construction
/// checks lengths only; frame-ness is a question for the operations below.
class FrameFamily {
 public:
  FrameFamily(KreinSpace space, std::vector<KVector> vectors);

  const KreinSpace& space() const { return space_; }
  std::size_t size() const { return vectors_.size(); }
  const KVector& vector(std::size_t n) const { return vectors_[n]; }  // 0-based
  const std::vector<KVector>& vectors() const { return vectors_; }

 private:
  KreinSpace space_;
  std::vector<KVector> vectors_;
};

/// Analysis coefficients ([k, z_1], ..., [k, z_m]).
std::vector<scalar> analysis_coefficients(const FrameFamily& f, const KVector& k);

/// Frame operator S: k -> sum_n [k, z_n] z_n. In coordinates S = Z Z^H D
/// where Z stacks the vectors as columns and D = diag(signature). S is
/// J-self-adjoint; J S is Hermitian PSD.
Matrix frame_operator(const FrameFamily& f);

/// The Hermitian PSD matrix M whose quadratic form is sum_n |<coefficient>|^2,
/// for the four inner-product conventions:
///   apply_j       replace each vector z by Jz first
///   use_j_inner   coefficients taken in [.,.]_J instead of [.,.]
/// Plain (false,false) gives M = D Z Z^H D, so that
/// sum_n |[k,z_n]|^2 = k^H M k and the optimal bounds are M's extremal
/// eigenvalues.
Matrix frame_quadratic_matrix(const FrameFamily& f, bool apply_j = false,
                              bool use_j_inner = false);

/// Optimal bounds of the family (possibly degenerate). Never throws on
/// content: an empty family yields (0, 0, false).
FrameBounds frame_bounds(const FrameFamily& f, const Tolerances& tol = {});

/// Gramian G[r][c] = [z_r, z_c] (0-based here; conjugate-symmetric).
Matrix gramian(const FrameFamily& f);

struct FrameCheck {
  bool is_frame = false;
  FrameBounds bounds;
  /// Unit vector attaining the lower bound; for a non-frame this is a
  /// direction the family misses (quadratic form numerically zero).
  std::optional<KVector> witness;
};

/// Frame verdict with witness. Throws EmptyFamilyError on an empty family.
FrameCheck is_frame(const FrameFamily& f, const Tolerances& tol = {});

/// S^{-1}, computed from the eigendecomposition of the Hermitian matrix
/// J S = D Z Z^H D. Throws NotAFrameError when that matrix is singular at
/// the rel_psd cut.
Matrix inverse_frame_operator(const FrameFamily& f, const Tolerances& tol = {});

}  // namespace kweave
