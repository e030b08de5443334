#include "kweave/weaving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kweave/parallel.hpp"
#include "kweave/rng.hpp"

namespace kweave {

namespace detail {

void check_pair(const FrameFamily& f, const FrameFamily& g) {
  if (f.space() != g.space())
    throw MismatchError("families live in different Krein spaces");
  if (f.size() != g.size())
    throw MismatchError("families have different sizes (" + std::to_string(f.size()) +
                        " vs " + std::to_string(g.size()) + ")");
  if (f.size() == 0) throw EmptyFamilyError("families are empty");
}

IndexSet mask_to_indices(std::uint64_t mask, std::size_t m) {
  IndexSet s;
  for (std::size_t n = 0; n < m; ++n)
    if ((mask >> n) & 1ull) s.push_back(static_cast<int>(n + 1));
  return s;
}

std::uint64_t indices_to_mask(const IndexSet& sigma, std::size_t m) {
  std::uint64_t mask = 0;
  for (int idx : sigma) {
    if (idx < 1 || static_cast<std::size_t>(idx) > m)
      throw ValidationError("subset index " + std::to_string(idx) +
                            " outside 1.." + std::to_string(m));
    mask |= 1ull << (idx - 1);
  }
  return mask;
}

bool subset_lex_less(std::uint64_t a, std::uint64_t b, std::size_t m) {
  for (std::size_t n = 0; n < m; ++n) {
    const bool in_a = (a >> n) & 1ull;
    const bool in_b = (b >> n) & 1ull;
    if (in_a == in_b) continue;
    // First differing index: present in exactly one set. If it is in a, then
    // a's index sequence is smaller there; unless b has already ended.
    const std::uint64_t rest_b = b >> n;
    const std::uint64_t rest_a = a >> n;
    if (in_a) return rest_b != 0;  // b still has larger indices (or none -> prefix)
    return rest_a == 0;            // a ended: a is a strict prefix of b
  }
  return false;
}

namespace {

std::uint64_t sign_mask(const FrameFamily& f, bool positive) {
  std::uint64_t mask = 0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double v = indefinite_inner(f.vector(n), f.vector(n), f.space()).real();
    if ((v >= 0.0) == positive) mask |= 1ull << n;
  }
  return mask;
}

}  // namespace

MaskPlan subset_plan(const SubsetSpec& spec, const FrameFamily& f, const FrameFamily& g) {
  check_pair(f, g);
  const std::size_t m = f.size();
  if (spec.family_size != m)
    throw MismatchError("SubsetSpec is for families of size " +
                        std::to_string(spec.family_size) + ", got " + std::to_string(m));
  MaskPlan plan;
  switch (spec.mode) {
    case SubsetSpec::Mode::exhaustive: {
      if (m > kExhaustiveLimit)
        throw SubsetBudgetError("exhaustive sweep over " + std::to_string(m) +
                                " vectors exceeds the limit of " +
                                std::to_string(kExhaustiveLimit) +
                                "; use a sampled spec");
      plan.range = true;
      plan.count = 1ull << m;
      return plan;
    }
    case SubsetSpec::Mode::sampled: {
      if (m > kMaskLimit)
        throw SubsetBudgetError("subset engine handles families of at most " +
                                std::to_string(kMaskLimit) + " vectors");
      const std::uint64_t full = (m == 64) ? ~0ull : ((1ull << m) - 1ull);
      std::vector<std::uint64_t>& masks = plan.masks;
      masks.push_back(0);
      masks.push_back(full);
      for (std::size_t n = 0; n < m; ++n) masks.push_back(1ull << n);
      for (std::size_t n = 0; n < m; ++n) masks.push_back(full ^ (1ull << n));
      masks.push_back(sign_mask(f, true));
      masks.push_back(sign_mask(f, false));
      masks.push_back(sign_mask(g, true));
      masks.push_back(sign_mask(g, false));
      SplitMix64 rng = SplitMix64::stream(spec.seed, 0);
      for (std::size_t i = 0; i < spec.sample_count; ++i)
        masks.push_back(rng.next() & full);
      plan.count = masks.size();
      return plan;
    }
    case SubsetSpec::Mode::explicit_sets: {
      if (m > kMaskLimit)
        throw SubsetBudgetError("subset engine handles families of at most " +
                                std::to_string(kMaskLimit) + " vectors");
      for (const IndexSet& s : spec.sets)
        plan.masks.push_back(indices_to_mask(s, m));
      plan.count = plan.masks.size();
      return plan;
    }
  }
  throw Error("subset_plan: unreachable");
}

}  // namespace detail

SubsetSpec SubsetSpec::exhaustive(std::size_t m) {
  SubsetSpec s;
  s.mode = Mode::exhaustive;
  s.family_size = m;
  return s;
}

SubsetSpec SubsetSpec::sampled(std::size_t m, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ValidationError("SubsetSpec::sampled: count must be >= 1");
  SubsetSpec s;
  s.mode = Mode::sampled;
  s.family_size = m;
  s.sample_count = count;
  s.seed = seed;
  return s;
}

SubsetSpec SubsetSpec::explicit_sets(std::size_t m, std::vector<IndexSet> sets) {
  if (sets.empty())
    throw ValidationError("SubsetSpec::explicit_sets: need at least one subset");
  SubsetSpec s;
  s.mode = Mode::explicit_sets;
  s.family_size = m;
  s.sets = std::move(sets);
  return s;
}

FrameFamily weave(const FrameFamily& f, const FrameFamily& g, const IndexSet& sigma) {
  detail::check_pair(f, g);
  const std::uint64_t mask = detail::indices_to_mask(sigma, f.size());
  std::vector<KVector> vecs;
  vecs.reserve(f.size());
  for (std::size_t n = 0; n < f.size(); ++n)
    vecs.push_back(((mask >> n) & 1ull) ? f.vector(n) : g.vector(n));
  return FrameFamily(f.space(), std::move(vecs));
}

namespace {

using detail::MaskPlan;

struct SweepState {
  double best_lower = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  bool has_best = false;
  double max_upper = 0.0;
};

/// Effective vectors: after this substitution, every formulation's quadratic
/// form matrix is plainly sum of y y^H over the chosen weave.
std::vector<KVector> effective_vectors(const FrameFamily& f, InnerMode mode) {
  std::vector<KVector> out;
  out.reserve(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    KVector y = mode.apply_j ? j_apply(f.vector(n), f.space()) : f.vector(n);
    if (!mode.use_j_inner) y = j_apply(y, f.space());
    out.push_back(std::move(y));
  }
  return out;
}

void eval_mask(const std::vector<KVector>& yf, const std::vector<KVector>& yg,
               std::uint64_t mask, std::size_t dim, double* lo, double* hi) {
  Matrix m(dim, dim);
  for (std::size_t n = 0; n < yf.size(); ++n) {
    const KVector& y = ((mask >> n) & 1ull) ? yf[n] : yg[n];
    m.add_outer(y, y);
  }
  const EigResult e = hermitian_eig(m, false);
  *lo = std::max(0.0, e.values.front());
  *hi = std::max(0.0, e.values.back());
}

WeavingReport sweep(const FrameFamily& f, const FrameFamily& g, const SubsetSpec& spec,
                    InnerMode mode, const Tolerances& tol, unsigned threads) {
  tol.validate();
  const MaskPlan plan = detail::subset_plan(spec, f, g);
  if (plan.count == 0) throw ValidationError("subset sweep: no subsets to examine");
  const std::size_t m = f.size();
  const std::size_t dim = f.space().dim();
  const std::vector<KVector> yf = effective_vectors(f, mode);
  const std::vector<KVector> yg = effective_vectors(g, mode);

  const bool collect = spec.mode == SubsetSpec::Mode::explicit_sets || plan.count <= 1024;
  std::vector<SubsetBounds> table(collect ? plan.count : 0);

  auto chunk_fn = [&](std::uint64_t lo_idx, std::uint64_t hi_idx) {
    SweepState st;
    for (std::uint64_t i = lo_idx; i < hi_idx; ++i) {
      const std::uint64_t mask = plan.mask(i);
      double lo, hi;
      eval_mask(yf, yg, mask, dim, &lo, &hi);
      if (collect) table[i] = SubsetBounds{detail::mask_to_indices(mask, m), lo, hi};
      st.max_upper = std::max(st.max_upper, hi);
      if (!st.has_best || lo < st.best_lower ||
          (lo == st.best_lower && detail::subset_lex_less(mask, st.best_mask, m))) {
        st.has_best = true;
        st.best_lower = lo;
        st.best_mask = mask;
      }
    }
    return st;
  };
  const std::vector<SweepState> states =
      detail::parallel_chunk_map<SweepState>(plan.count, threads, 64, chunk_fn);

  SweepState total;
  for (const SweepState& st : states) {
    if (!st.has_best) continue;
    total.max_upper = std::max(total.max_upper, st.max_upper);
    if (!total.has_best || st.best_lower < total.best_lower ||
        (st.best_lower == total.best_lower &&
         detail::subset_lex_less(st.best_mask, total.best_mask, m))) {
      total.has_best = true;
      total.best_lower = st.best_lower;
      total.best_mask = st.best_mask;
    }
  }

  WeavingReport rep;
  rep.universal_lower = total.best_lower;
  rep.universal_upper = total.max_upper;
  rep.is_weaving = rep.universal_lower > tol.rel_psd * rep.universal_upper;
  rep.exhaustive = spec.mode == SubsetSpec::Mode::exhaustive;
  rep.examined = plan.count;
  rep.worst_subset = detail::mask_to_indices(total.best_mask, m);
  rep.per_subset = std::move(table);

  // Witness: eigenvector at the bottom of the worst subset's spectrum.
  Matrix worst(dim, dim);
  for (std::size_t n = 0; n < m; ++n) {
    const KVector& y = ((total.best_mask >> n) & 1ull) ? yf[n] : yg[n];
    worst.add_outer(y, y);
  }
  const EigResult e = hermitian_eig(worst);
  rep.witness = e.vectors.column(0);
  normalize_phase(rep.witness);
  return rep;
}

bool geq_tol(double a, double b, double rel) {
  return a >= b - rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

WeavingReport universal_bounds(const FrameFamily& f, const FrameFamily& g,
                               const SubsetSpec& spec, const Tolerances& tol,
                               unsigned threads) {
  return sweep(f, g, spec, InnerMode{}, tol, threads);
}

WeavingReport universal_bounds_mode(const FrameFamily& f, const FrameFamily& g,
                                    const SubsetSpec& spec, InnerMode mode,
                                    const Tolerances& tol, unsigned threads) {
  return sweep(f, g, spec, mode, tol, threads);
}

EquivalenceReport check_equivalences(const FrameFamily& f, const FrameFamily& g,
                                     const SubsetSpec& spec, const Tolerances& tol,
                                     unsigned threads) {
  EquivalenceReport rep;
  const InnerMode modes[4] = {
      {false, false}, {true, false}, {false, true}, {true, true}};
  for (int i = 0; i < 4; ++i)
    rep.formulations[i] = sweep(f, g, spec, modes[i], tol, threads);

  double scale = 0.0;
  for (const WeavingReport& w : rep.formulations)
    scale = std::max(scale, w.universal_upper);
  double gap = 0.0;
  bool verdicts = true;
  for (int i = 1; i < 4; ++i) {
    gap = std::max(gap, std::abs(rep.formulations[i].universal_lower -
                                 rep.formulations[0].universal_lower));
    gap = std::max(gap, std::abs(rep.formulations[i].universal_upper -
                                 rep.formulations[0].universal_upper));
    verdicts = verdicts &&
               rep.formulations[i].is_weaving == rep.formulations[0].is_weaving;
  }
  rep.max_relative_gap = gap / std::max(scale, 1e-300);
  rep.bounds_agree = rep.max_relative_gap <= tol.rel_eq;
  rep.verdicts_agree = verdicts;
  return rep;
}

OperatorBoundReport operator_lower_bound_check(const FrameFamily& f, const FrameFamily& g,
                                               const SubsetSpec& spec,
                                               const Tolerances& tol, unsigned threads) {
  tol.validate();
  const WeavingReport pair = universal_bounds(f, g, spec, tol, threads);
  const MaskPlan plan = detail::subset_plan(spec, f, g);
  const std::size_t m = f.size();
  const std::size_t dim = f.space().dim();

  // Smallest singular value of the woven frame operator S_sigma = W W^H D,
  // computed as sqrt(lambda_min(S^H S)) on the explicitly built S.
  auto chunk_fn = [&](std::uint64_t lo_idx, std::uint64_t hi_idx) {
    SweepState st;
    for (std::uint64_t i = lo_idx; i < hi_idx; ++i) {
      const std::uint64_t mask = plan.mask(i);
      Matrix s(dim, dim);
      for (std::size_t n = 0; n < m; ++n) {
        const KVector& z = ((mask >> n) & 1ull) ? f.vector(n) : g.vector(n);
        s.add_outer(z, j_apply(z, f.space()));
      }
      const double smin = smallest_singular_value(s);
      if (!st.has_best || smin < st.best_lower ||
          (smin == st.best_lower && detail::subset_lex_less(mask, st.best_mask, m))) {
        st.has_best = true;
        st.best_lower = smin;
        st.best_mask = mask;
      }
    }
    return st;
  };
  const std::vector<SweepState> states =
      detail::parallel_chunk_map<SweepState>(plan.count, threads, 64, chunk_fn);
  SweepState total;
  for (const SweepState& st : states) {
    if (!st.has_best) continue;
    if (!total.has_best || st.best_lower < total.best_lower ||
        (st.best_lower == total.best_lower &&
         detail::subset_lex_less(st.best_mask, total.best_mask, m))) {
      total = st;
    }
  }

  OperatorBoundReport rep;
  rep.s_min = total.best_lower;
  rep.s_min_subset = detail::mask_to_indices(total.best_mask, m);
  rep.universal_lower = pair.universal_lower;
  rep.universal_upper = pair.universal_upper;
  rep.is_weaving = pair.is_weaving;
  rep.upper_f = frame_bounds(f, tol).upper;
  rep.upper_g = frame_bounds(g, tol).upper;
  rep.lower_bound_holds = !pair.is_weaving || geq_tol(rep.s_min, pair.universal_lower, tol.rel_eq);
  const double denom = rep.upper_f + rep.upper_g;
  const double quotient = denom > 0.0 ? rep.s_min * rep.s_min / denom : 0.0;
  rep.quotient_bound_holds = geq_tol(pair.universal_lower, quotient, tol.rel_eq);
  return rep;
}

PerturbationReport perturbation_weaving_check(const FrameFamily& f, const Matrix& u,
                                              const SubsetSpec& spec,
                                              const Tolerances& tol, unsigned threads) {
  tol.validate();
  const std::size_t dim = f.space().dim();
  if (u.rows() != dim || u.cols() != dim)
    throw DimensionError("perturbation_weaving_check: operator is " +
                         std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                         ", space dimension is " + std::to_string(dim));

  PerturbationReport rep;
  rep.base = frame_bounds(f, tol);
  rep.deviation = operator_norm(Matrix::identity(dim) - u);
  rep.u_invertible =
      smallest_singular_value(u) > tol.rel_psd * std::max(operator_norm(u), 1e-300);
  rep.hypothesis_holds = rep.base.is_frame &&
      rep.deviation * rep.deviation < rep.base.lower / rep.base.upper;

  std::vector<KVector> mapped;
  mapped.reserve(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) mapped.push_back(u.apply(f.vector(n)));
  const FrameFamily g(f.space(), std::move(mapped));

  rep.woven = universal_bounds(f, g, spec, tol, threads);
  if (rep.hypothesis_holds) {
    const double root =
        std::sqrt(rep.base.lower) - std::sqrt(rep.base.upper) * rep.deviation;
    rep.predicted_lower = root * root;
    rep.prediction_confirmed = rep.woven.is_weaving &&
        geq_tol(rep.woven.universal_lower, rep.predicted_lower, tol.rel_eq);
  } else {
    rep.prediction_confirmed = true;  // nothing predicted
  }
  return rep;
}

InverseOperatorReport inverse_operator_weaving_check(const FrameFamily& f,
                                                     const FrameFamily& g,
                                                     const SubsetSpec& spec,
                                                     const Tolerances& tol,
                                                     unsigned threads) {
  tol.validate();
  detail::check_pair(f, g);
  InverseOperatorReport rep;
  rep.pair = universal_bounds(f, g, spec, tol, threads);

  const Matrix sf = frame_operator(f);
  const Matrix sg = frame_operator(g);
  const Matrix sf_inv = inverse_frame_operator(f, tol);
  const Matrix sg_inv = inverse_frame_operator(g, tol);
  rep.norm_f = operator_norm(sf);
  rep.norm_g = operator_norm(sg);
  rep.inverse_gap = operator_norm(sf_inv - sg_inv);

  const double ratio = rep.pair.universal_upper > 0.0
      ? rep.pair.universal_lower / rep.pair.universal_upper : 0.0;
  const bool h_f = rep.norm_f * rep.inverse_gap < ratio;
  const bool h_g = rep.norm_g * rep.inverse_gap < ratio;
  rep.hypothesis_holds = h_f || h_g;

  if (rep.hypothesis_holds) {
    const Matrix& anchor = h_f ? sf_inv : sg_inv;
    const double val = std::sqrt(rep.pair.universal_lower) * smallest_singular_value(anchor) -
                       std::sqrt(rep.pair.universal_upper) * rep.inverse_gap;
    rep.diagnostic_lower = val > 0.0 ? val * val : 0.0;

    std::vector<KVector> fv, gv;
    fv.reserve(f.size());
    gv.reserve(g.size());
    for (std::size_t n = 0; n < f.size(); ++n) fv.push_back(sf_inv.apply(f.vector(n)));
    for (std::size_t n = 0; n < g.size(); ++n) gv.push_back(sg_inv.apply(g.vector(n)));
    const FrameFamily fi(f.space(), std::move(fv));
    const FrameFamily gi(g.space(), std::move(gv));
    rep.inverse_pair = universal_bounds(fi, gi, spec, tol, threads);
  }
  return rep;
}

ProjectionReport projection_characterization_check(const FrameFamily& f,
                                                   const FrameFamily& g,
                                                   const IndexSet& sigma,
                                                   const Tolerances& tol) {
  tol.validate();
  detail::check_pair(f, g);
  const std::size_t m = f.size();
  const std::size_t dim = f.space().dim();
  const std::uint64_t mask = detail::indices_to_mask(sigma, m);

  ProjectionReport rep;
  rep.sigma = detail::mask_to_indices(mask, m);

  std::vector<KVector> kept;
  for (std::size_t n = 0; n < m; ++n)
    if ((mask >> n) & 1ull) kept.push_back(f.vector(n));
  const Matrix q = orthonormal_basis(kept, dim, tol.rel_psd);

  // Orthonormal basis of the complement: eigenvectors of P = I - Q Q^H with
  // eigenvalue 1 (projector spectra are {0,1}, so the 1/2 cut is unambiguous).
  Matrix p = Matrix::identity(dim);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    KVector col = q.column(j);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        p(i, k) -= col[i] * std::conj(col[k]);
  }
  const EigResult pe = hermitian_eig(p);
  std::vector<std::size_t> comp;
  for (std::size_t i = 0; i < pe.values.size(); ++i)
    if (pe.values[i] > 0.5) comp.push_back(i);
  rep.complement_dim = comp.size();

  const FrameFamily woven = weave(f, g, rep.sigma);
  rep.woven_is_frame = is_frame(woven, tol).is_frame;

  if (comp.empty()) {
    rep.vacuous = true;
    rep.projected_is_frame = true;  // frame condition over {0} holds trivially
    rep.equivalent = rep.projected_is_frame == rep.woven_is_frame;
    return rep;
  }

  // Restricted quadratic form of the projected complement family, with
  // coefficients in [.,.]_J: rows t_n = C^H z'_n (C^H P = C^H).
  Matrix mc(comp.size(), comp.size());
  for (std::size_t n = 0; n < m; ++n) {
    if ((mask >> n) & 1ull) continue;
    const KVector& z = g.vector(n);
    KVector t(comp.size());
    for (std::size_t r = 0; r < comp.size(); ++r) {
      scalar s = 0.0;
      for (std::size_t i = 0; i < dim; ++i)
        s += std::conj(pe.vectors(i, comp[r])) * z[i];
      t[r] = s;
    }
    mc.add_outer(t, t);
  }
  const EigResult ec = hermitian_eig(mc, false);
  rep.projected_lower = std::max(0.0, ec.values.front());
  rep.projected_upper = std::max(0.0, ec.values.back());
  rep.projected_is_frame = rep.projected_lower > tol.rel_psd * rep.projected_upper;
  rep.equivalent = rep.projected_is_frame == rep.woven_is_frame;
  return rep;
}

}  // namespace kweave
