#include "kweave/jframes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kweave/parallel.hpp"

namespace kweave {

namespace {

bool nonneg_sign(const KVector& z, const KreinSpace& sp) {
  return indefinite_inner(z, z, sp).real() >= 0.0;
}

/// A = B^H D B, the indefinite form restricted to the columns of B.
Matrix restricted_form(const Matrix& b, const KreinSpace& sp) {
  Matrix db = b;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) db(i, j) *= sp.sign(i);
  return b.adjoint() * db;
}

struct SideCheck {
  std::size_t rank = 0;
  bool uniformly_definite = false;
  double margin = 0.0;
  bool have_margin = false;
};

SideCheck side_definiteness(const std::vector<KVector>& vecs, int sign,
                            const KreinSpace& sp, const Tolerances& tol) {
  SideCheck out;
  const Matrix b = orthonormal_basis(vecs, sp.dim(), tol.rel_psd);
  out.rank = b.cols();
  if (out.rank == 0) return out;
  const EigResult e = hermitian_eig(restricted_form(b, sp), false);
  out.margin = sign > 0 ? e.values.front() : e.values.back();
  out.have_margin = true;
  out.uniformly_definite = sign * out.margin > tol.rel_psd;
  return out;
}

/// Shared core of is_j_frame, usable on raw woven vectors without building a
/// FrameFamily per subset.
JFrameReport j_frame_check(const std::vector<KVector>& vecs, const KreinSpace& sp,
                           const Tolerances& tol) {
  JFrameReport rep;
  std::vector<KVector> pos, neg;
  for (std::size_t n = 0; n < vecs.size(); ++n) {
    if (nonneg_sign(vecs[n], sp)) {
      rep.partition.positive.push_back(static_cast<int>(n + 1));
      pos.push_back(vecs[n]);
    } else {
      rep.partition.negative.push_back(static_cast<int>(n + 1));
      neg.push_back(vecs[n]);
    }
  }

  const std::size_t p = sp.positive_count();
  const std::size_t q = sp.negative_count();
  bool ok = true;
  const SideCheck cp = side_definiteness(pos, +1, sp, tol);
  const SideCheck cn = side_definiteness(neg, -1, sp, tol);
  if (cp.have_margin) {
    DefinitenessReport r;
    r.sign = +1;
    r.subspace_dim = cp.rank;
    r.margin = cp.margin;
    r.uniformly_definite = cp.uniformly_definite;
    r.maximal = cp.rank == p;
    rep.positive = r;
    ok = ok && r.uniformly_definite && r.maximal;
  } else {
    ok = ok && p == 0;
  }
  if (cn.have_margin) {
    DefinitenessReport r;
    r.sign = -1;
    r.subspace_dim = cn.rank;
    r.margin = cn.margin;
    r.uniformly_definite = cn.uniformly_definite;
    r.maximal = cn.rank == q;
    rep.negative = r;
    ok = ok && r.uniformly_definite && r.maximal;
  } else {
    ok = ok && q == 0;
  }
  rep.is_j_frame = ok;
  return rep;
}

}  // namespace

SignPartition sign_partition(const FrameFamily& f) {
  SignPartition part;
  for (std::size_t n = 0; n < f.size(); ++n) {
    if (nonneg_sign(f.vector(n), f.space()))
      part.positive.push_back(static_cast<int>(n + 1));
    else
      part.negative.push_back(static_cast<int>(n + 1));
  }
  return part;
}

DefinitenessReport uniformly_definite(const std::vector<KVector>& spanning, int sign,
                                      const KreinSpace& sp, const Tolerances& tol) {
  tol.validate();
  if (sign != 1 && sign != -1)
    throw ValidationError("uniformly_definite: sign must be +1 or -1");
  for (const KVector& v : spanning) sp.check_vector(v, "uniformly_definite");
  const SideCheck c = side_definiteness(spanning, sign, sp, tol);
  if (!c.have_margin)
    throw DegenerateSubspaceError("uniformly_definite: spanning set spans {0}");
  DefinitenessReport r;
  r.sign = sign;
  r.subspace_dim = c.rank;
  r.margin = c.margin;
  r.uniformly_definite = c.uniformly_definite;
  r.maximal = c.rank == (sign > 0 ? sp.positive_count() : sp.negative_count());
  return r;
}

JFrameReport is_j_frame(const FrameFamily& f, const Tolerances& tol) {
  tol.validate();
  if (f.size() == 0) throw EmptyFamilyError("is_j_frame: family is empty");
  return j_frame_check(f.vectors(), f.space(), tol);
}

JWeavingReport is_j_weaving(const FrameFamily& f, const FrameFamily& g,
                            const SubsetSpec& spec, const Tolerances& tol,
                            unsigned threads) {
  tol.validate();
  const detail::MaskPlan plan = detail::subset_plan(spec, f, g);
  const std::size_t m = f.size();

  struct State {
    std::uint64_t first_bad_index = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t first_bad_mask = 0;
  };
  auto chunk_fn = [&](std::uint64_t lo_idx, std::uint64_t hi_idx) {
    State st;
    std::vector<KVector> woven(m);
    for (std::uint64_t i = lo_idx; i < hi_idx; ++i) {
      const std::uint64_t mask = plan.mask(i);
      for (std::size_t n = 0; n < m; ++n)
        woven[n] = ((mask >> n) & 1ull) ? f.vector(n) : g.vector(n);
      if (!j_frame_check(woven, f.space(), tol).is_j_frame) {
        st.first_bad_index = i;
        st.first_bad_mask = mask;
        return st;
      }
    }
    return st;
  };
  const std::vector<State> states =
      detail::parallel_chunk_map<State>(plan.count, threads, 16, chunk_fn);

  JWeavingReport rep;
  rep.exhaustive = spec.mode == SubsetSpec::Mode::exhaustive;
  rep.examined = plan.count;
  State best;
  for (const State& st : states)
    if (st.first_bad_index < best.first_bad_index) best = st;
  if (best.first_bad_index == std::numeric_limits<std::uint64_t>::max()) {
    rep.is_j_weaving = true;
    return rep;
  }
  rep.is_j_weaving = false;
  rep.failing_subset = detail::mask_to_indices(best.first_bad_mask, m);
  std::vector<KVector> woven(m);
  for (std::size_t n = 0; n < m; ++n)
    woven[n] = ((best.first_bad_mask >> n) & 1ull) ? f.vector(n) : g.vector(n);
  rep.failing_report = j_frame_check(woven, f.space(), tol);
  return rep;
}

namespace {

std::optional<TwoSidedBounds::Side> side_bounds(const std::vector<KVector>& side_vecs,
                                                int sign, const KreinSpace& sp,
                                                const Tolerances& tol) {
  const Matrix b = orthonormal_basis(side_vecs, sp.dim(), tol.rel_psd);
  const std::size_t r = b.cols();
  if (r == 0) return std::nullopt;

  const EigResult ea = hermitian_eig(restricted_form(b, sp));
  double amax = 0.0, amin = std::numeric_limits<double>::infinity();
  for (double v : ea.values) {
    amax = std::max(amax, std::abs(v));
    amin = std::min(amin, std::abs(v));
  }
  if (amin <= tol.rel_psd * std::max(amax, 1e-300))
    throw DegenerateSubspaceError(
        "two_sided_bounds: restricted indefinite form is singular on the " +
        std::string(sign > 0 ? "positive" : "negative") + " side");

  TwoSidedBounds::Side out;
  out.dim = r;
  out.definite = ea.values.front() > 0.0 || ea.values.back() < 0.0;
  if (!out.definite) {
    out.alpha = out.beta = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double eps = ea.values.front() > 0.0 ? 1.0 : -1.0;

  // Numerator restricted to the side's span: N = B^H (sum over side of
  // (Dw)(Dw)^H) B, then whitened by |A|^{-1/2} in A's eigenbasis. The pencil
  // eigenvalues are eps * eig of the whitened matrix.
  Matrix num(sp.dim(), sp.dim());
  for (const KVector& w : side_vecs) num.add_outer(j_apply(w, sp), j_apply(w, sp));
  const Matrix nb = b.adjoint() * (num * b);
  Matrix x(r, r);  // X = Q |Lambda|^{-1/2}
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      x(i, j) = ea.vectors(i, j) / std::sqrt(std::abs(ea.values[j]));
  const EigResult en = hermitian_eig(x.adjoint() * (nb * x), false);
  const double lo = std::max(0.0, en.values.front());
  const double hi = std::max(0.0, en.values.back());
  if (eps > 0.0) {
    out.alpha = lo;
    out.beta = hi;
  } else {
    out.alpha = -lo;  // ratio nearest zero
    out.beta = -hi;
  }
  return out;
}

}  // namespace

TwoSidedBounds two_sided_bounds(const FrameFamily& f, const FrameFamily& g,
                                const IndexSet& sigma, const Tolerances& tol) {
  tol.validate();
  const FrameFamily woven = weave(f, g, sigma);
  std::vector<KVector> pos, neg;
  for (std::size_t n = 0; n < woven.size(); ++n) {
    if (nonneg_sign(woven.vector(n), woven.space()))
      pos.push_back(woven.vector(n));
    else
      neg.push_back(woven.vector(n));
  }
  TwoSidedBounds out;
  out.plus = side_bounds(pos, +1, woven.space(), tol);
  out.minus = side_bounds(neg, -1, woven.space(), tol);
  return out;
}

bool two_sided_success(const TwoSidedBounds& b, const KreinSpace& sp) {
  const std::size_t p = sp.positive_count();
  const std::size_t q = sp.negative_count();
  bool ok = true;
  if (p == 0) {
    ok = ok && !b.plus.has_value();
  } else {
    ok = ok && b.plus.has_value() && b.plus->definite && b.plus->dim == p &&
         b.plus->alpha > 0.0 && b.plus->alpha <= b.plus->beta;
  }
  if (q == 0) {
    ok = ok && !b.minus.has_value();
  } else {
    ok = ok && b.minus.has_value() && b.minus->definite && b.minus->dim == q &&
         b.minus->alpha < 0.0 && b.minus->beta <= b.minus->alpha;
  }
  return ok;
}

}  // namespace kweave
