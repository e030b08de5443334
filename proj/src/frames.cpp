#include "kweave/frames.hpp"

#include <cmath>

namespace kweave {

FrameFamily::FrameFamily(KreinSpace space, std::vector<KVector> vectors)
    : space_(std::move(space)), vectors_(std::move(vectors)) {
  for (std::size_t n = 0; n < vectors_.size(); ++n) {
    if (vectors_[n].size() != space_.dim())
      throw DimensionError("FrameFamily: vector " + std::to_string(n + 1) +
                           " has length " + std::to_string(vectors_[n].size()) +
                           ", space dimension is " + std::to_string(space_.dim()));
  }
}

std::vector<scalar> analysis_coefficients(const FrameFamily& f, const KVector& k) {
  f.space().check_vector(k, "analysis_coefficients");
  std::vector<scalar> c(f.size());
  for (std::size_t n = 0; n < f.size(); ++n)
    c[n] = indefinite_inner(k, f.vector(n), f.space());
  return c;
}

Matrix frame_operator(const FrameFamily& f) {
  const std::size_t d = f.space().dim();
  Matrix s(d, d);
  for (std::size_t n = 0; n < f.size(); ++n) {
    const KVector& z = f.vector(n);
    s.add_outer(z, j_apply(z, f.space()));  // z (Dz)^H accumulates Z Z^H D
  }
  return s;
}

Matrix frame_quadratic_matrix(const FrameFamily& f, bool apply_j, bool use_j_inner) {
  const std::size_t d = f.space().dim();
  Matrix m(d, d);
  for (std::size_t n = 0; n < f.size(); ++n) {
    KVector y = apply_j ? j_apply(f.vector(n), f.space()) : f.vector(n);
    if (!use_j_inner) y = j_apply(y, f.space());
    m.add_outer(y, y);
  }
  return m;
}

FrameBounds frame_bounds(const FrameFamily& f, const Tolerances& tol) {
  tol.validate();
  FrameBounds b;
  if (f.size() == 0) return b;
  const EigResult e = hermitian_eig(frame_quadratic_matrix(f), false);
  b.lower = std::max(0.0, e.values.front());
  b.upper = std::max(0.0, e.values.back());
  b.is_frame = b.lower > tol.rel_psd * b.upper;
  return b;
}

Matrix gramian(const FrameFamily& f) {
  Matrix g(f.size(), f.size());
  for (std::size_t r = 0; r < f.size(); ++r)
    for (std::size_t c = 0; c < f.size(); ++c)
      g(r, c) = indefinite_inner(f.vector(r), f.vector(c), f.space());
  return g;
}

FrameCheck is_frame(const FrameFamily& f, const Tolerances& tol) {
  tol.validate();
  if (f.size() == 0) throw EmptyFamilyError("is_frame: family is empty");
  const EigResult e = hermitian_eig(frame_quadratic_matrix(f));
  FrameCheck chk;
  chk.bounds.lower = std::max(0.0, e.values.front());
  chk.bounds.upper = std::max(0.0, e.values.back());
  chk.bounds.is_frame = chk.bounds.lower > tol.rel_psd * chk.bounds.upper;
  chk.is_frame = chk.bounds.is_frame;
  KVector w = e.vectors.column(0);
  normalize_phase(w);
  chk.witness = std::move(w);
  return chk;
}

Matrix inverse_frame_operator(const FrameFamily& f, const Tolerances& tol) {
  tol.validate();
  if (f.size() == 0) throw EmptyFamilyError("inverse_frame_operator: family is empty");
  const EigResult e = hermitian_eig(frame_quadratic_matrix(f));
  const double lmax = e.values.back();
  if (!(e.values.front() > tol.rel_psd * std::max(lmax, 0.0)))
    throw NotAFrameError("inverse_frame_operator: family is not a frame "
                         "(smallest quadratic-form eigenvalue " +
                         std::to_string(e.values.front()) + ")");
  std::vector<double> inv(e.values.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / e.values[i];
  // S^{-1} = (J S)^{-1} J = M^{-1} D: scale column j by s_j.
  Matrix minv = assemble_from_eig(e, inv);
  const std::size_t d = f.space().dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) minv(i, j) *= f.space().sign(j);
  return minv;
}

}  // namespace kweave
