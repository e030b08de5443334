// Acceptance gate: one criterion per function, one verdict line per
// criterion, nonzero exit when anything fails. Randomized criteria use fixed
// seeds, so every run checks the same instances.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "kweave/io.hpp"
#include "test_support.hpp"

using namespace kweave;

namespace {

struct Tally {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string num(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IndexSet sigma_from_mask(std::uint64_t mask, std::size_t m) {
  return detail::mask_to_indices(mask, m);
}

Field pick_field(int i) { return (i % 2 == 0) ? Field::cplx : Field::real; }

// ---- criterion bodies ----

void c1_certified_weaving(Tally& t) {
  const auto t0 = std::chrono::steady_clock::now();
  ts::Pair p = ts::c2_sign_flip_pair();
  WeavingReport r = universal_bounds(p.f, p.g, SubsetSpec::exhaustive(3));
  const double dt = seconds_since(t0);
  t.expect(r.is_weaving, "pair not certified weaving");
  t.expect(r.exhaustive, "sweep not exhaustive");
  t.expect(r.examined == 8, "examined " + num(double(r.examined)) + " subsets, want 8");
  t.expect(dt < 1.0, "took " + num(dt) + " s, budget 1 s");
}

void c2_certified_counterexample(Tally& t) {
  ts::Pair p = ts::c3_singular_weave_pair();
  WeavingReport r = universal_bounds(p.f, p.g, SubsetSpec::exhaustive(3));
  t.expect(!r.is_weaving, "pair wrongly certified weaving");
  t.expect(r.exhaustive, "sweep not exhaustive");
  t.expect(r.worst_subset == IndexSet{2},
           "worst subset not {2}");
  t.expect(r.universal_lower < 1e-12,
           "universal lower " + num(r.universal_lower) + ", want < 1e-12");
  const KVector& w = r.witness;
  t.expect(w.size() == 3 && std::abs(euclid_norm(w) - 1.0) < 1e-8,
           "witness not a unit vector");
  if (w.size() == 3) {
    t.expect(std::abs(w[0]) > 1.0 - 1e-8 && std::abs(w[1]) < 1e-8 &&
                 std::abs(w[2]) < 1e-8,
             "witness direction not (1,0,0) up to phase");
  }
}

void c3_formulations_agree(Tally& t) {
  const auto t0 = std::chrono::steady_clock::now();

  ts::Pair tr = ts::interleaved_truncation_pair(8);
  EquivalenceReport eq = check_equivalences(tr.f, tr.g, SubsetSpec::exhaustive(16));
  t.expect(eq.bounds_agree && eq.verdicts_agree,
           "truncation pair: formulations disagree");
  t.expect(eq.max_relative_gap <= 1e-8,
           "truncation pair: gap " + num(eq.max_relative_gap));
  for (const WeavingReport& f : eq.formulations) {
    t.expect(f.exhaustive && f.is_weaving, "truncation formulation not certified");
    t.expect(std::abs(f.universal_lower - 1.0) <= 1e-10 &&
                 std::abs(f.universal_upper - 2.0) <= 1e-10,
             "truncation bounds (" + num(f.universal_lower) + ", " +
                 num(f.universal_upper) + "), want (1, 2) to 1e-10");
  }

  SplitMix64 rng(301);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 2 + static_cast<std::size_t>(i % 4);
    const std::size_t m = dim + 2;
    ts::Pair p = ts::random_weaving_pair(dim, m, pick_field(i), rng);
    EquivalenceReport r = check_equivalences(p.f, p.g, SubsetSpec::exhaustive(m));
    if (!(r.bounds_agree && r.verdicts_agree && r.max_relative_gap <= 1e-8 &&
          r.formulations[0].is_weaving))
      ++bad;
  }
  t.expect(bad == 0, num(bad) + " of 100 random pairs disagreed");

  const double dt = seconds_since(t0);
  t.expect(dt < 60.0, "took " + num(dt) + " s, budget 60 s");
}

void c4_operator_bound_both_directions(Tally& t) {
  auto pairs = ts::all_fixture_pairs();
  pairs.emplace_back("interleaved_truncation", ts::interleaved_truncation_pair(8));
  pairs.emplace_back("swapped_head", ts::swapped_head_pair(8));
  for (const auto& [name, p] : pairs) {
    OperatorBoundReport r =
        operator_lower_bound_check(p.f, p.g, SubsetSpec::exhaustive(p.f.size()));
    t.expect(r.lower_bound_holds, name + ": s_min fell below the universal lower bound");
    t.expect(r.quotient_bound_holds,
             name + ": universal lower bound fell below s_min^2/(upper_f+upper_g)");
  }
}

void c5_perturbation_sufficiency(Tally& t) {
  ts::Pair diag = ts::r2_diag_pair();
  PerturbationReport pr =
      perturbation_weaving_check(diag.f, ts::r2_diag_u(), SubsetSpec::exhaustive(2));
  t.expect(pr.base.is_frame, "diagonal pair: base family not a frame");
  t.expect(std::abs(pr.deviation - 0.2) < 1e-10,
           "diagonal pair: deviation " + num(pr.deviation) + ", want 0.2");
  t.expect(pr.deviation * pr.deviation < pr.base.lower / pr.base.upper,
           "diagonal pair: hypothesis quotient not satisfied");
  t.expect(pr.hypothesis_holds, "diagonal pair: hypothesis not recognized");
  t.expect(std::abs(pr.predicted_lower - 0.36) < 1e-10,
           "diagonal pair: predicted lower " + num(pr.predicted_lower) + ", want 0.36");
  t.expect(pr.woven.is_weaving, "diagonal pair: not certified weaving");
  t.expect(pr.woven.universal_lower >= pr.predicted_lower - 1e-8,
           "diagonal pair: woven lower bound below the prediction");
  t.expect(pr.prediction_confirmed, "diagonal pair: prediction not confirmed");

  ts::Pair refl = ts::r2_reflect_pair();
  PerturbationReport rr =
      perturbation_weaving_check(refl.f, ts::r2_reflect_u(), SubsetSpec::exhaustive(2));
  t.expect(std::abs(rr.deviation - 2.0) < 1e-10,
           "reflection pair: deviation " + num(rr.deviation) + ", want 2");
  t.expect(!rr.hypothesis_holds, "reflection pair: hypothesis wrongly held");
  t.expect(rr.woven.is_weaving,
           "reflection pair: weaving expected despite the failed hypothesis");
  t.expect(rr.prediction_confirmed,
           "reflection pair: vacuous prediction not marked confirmed");

  SplitMix64 rng(502);
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t dim = 2 + static_cast<std::size_t>(i % 3);
    const std::size_t m = dim + 2;
    ts::PerturbedInstance inst =
        ts::random_perturbed_instance(dim, m, pick_field(i), rng);
    PerturbationReport r =
        perturbation_weaving_check(inst.f, inst.u, SubsetSpec::exhaustive(m));
    if (!(r.hypothesis_holds && r.woven.is_weaving && r.prediction_confirmed)) ++bad;
  }
  t.expect(bad == 0, num(bad) + " of 200 random perturbations failed");
}

void c6_inverse_operator_images(Tally& t) {
  ts::Pair p = ts::c2_sign_flip_pair();
  InverseOperatorReport same =
      inverse_operator_weaving_check(p.f, p.f, SubsetSpec::exhaustive(3));
  t.expect(same.inverse_gap < 1e-12, "identical families: inverse gap not zero");
  t.expect(same.hypothesis_holds, "identical families: hypothesis not recognized");
  t.expect(same.inverse_pair.has_value() && same.inverse_pair->is_weaving,
           "identical families: inverse images not certified weaving");

  int bad = 0;
  for (int s = 0; s < 200; ++s) {
    SplitMix64 rng = SplitMix64::stream(601, static_cast<std::uint64_t>(s));
    const std::size_t dim = 2 + static_cast<std::size_t>(s % 3);
    const std::size_t m = dim + 2;
    KreinSpace sp = ts::random_space(dim, pick_field(s), rng);
    FrameFamily f = ts::random_frame(sp, m, rng);

    Matrix r(dim, dim);
    const bool cplx = sp.field() == Field::cplx;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        r(i, j) = scalar(rng.next_gaussian(), cplx ? rng.next_gaussian() : 0.0);
    const double rnorm = operator_norm(r);

    // Shrink the perturbation until the inverse-gap hypothesis holds; the
    // gap vanishes with eps, so this terminates.
    bool verified = false;
    for (double eps = 1e-2; eps >= 1e-9; eps /= 10.0) {
      Matrix u = Matrix::identity(dim) + r.scaled(eps / rnorm);
      std::vector<KVector> gs;
      gs.reserve(m);
      for (std::size_t j = 0; j < m; ++j) gs.push_back(u.apply(f.vector(j)));
      FrameFamily g(sp, gs);
      InverseOperatorReport rep =
          inverse_operator_weaving_check(f, g, SubsetSpec::exhaustive(m));
      if (!rep.hypothesis_holds) continue;
      verified = rep.inverse_pair.has_value() && rep.inverse_pair->is_weaving;
      break;
    }
    if (!verified) ++bad;
  }
  t.expect(bad == 0, num(bad) + " of 200 hypothesis-holding instances failed");
}

void c7_projection_characterization(Tally& t) {
  auto pairs = ts::all_fixture_pairs();
  pairs.emplace_back("interleaved_truncation_4", ts::interleaved_truncation_pair(4));
  pairs.emplace_back("swapped_head_4", ts::swapped_head_pair(4));
  int exceptions = 0;
  std::string first;
  for (const auto& [name, p] : pairs) {
    const std::size_t m = p.f.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      ProjectionReport r =
          projection_characterization_check(p.f, p.g, sigma_from_mask(mask, m));
      if (r.equivalent) continue;
      ++exceptions;
      if (first.empty()) first = name + " mask " + num(double(mask));
    }
  }
  t.expect(exceptions == 0,
           num(exceptions) + " subset(s) broke the equivalence, first at " + first);
}

void c8_j_weaving_fixtures(Tally& t) {
  ts::Pair axis = ts::r3_axis_pair();
  JWeavingReport jw = is_j_weaving(axis.f, axis.g, SubsetSpec::exhaustive(3));
  t.expect(jw.is_j_weaving && jw.exhaustive && jw.examined == 8,
           "axis pair: not certified J-weaving over all 8 subsets");

  ts::Pair ns = ts::c3_neutral_span_pair();
  WeavingReport wr = universal_bounds(ns.f, ns.g, SubsetSpec::exhaustive(3));
  t.expect(wr.is_weaving, "neutral-span pair: not certified weaving");

  JWeavingReport bad = is_j_weaving(ns.f, ns.g, SubsetSpec::exhaustive(3));
  t.expect(!bad.is_j_weaving, "neutral-span pair: wrongly certified J-weaving");
  t.expect(bad.failing_subset.has_value() && *bad.failing_subset == IndexSet{1},
           "neutral-span pair: first failing subset not {1}");
  if (bad.failing_report && bad.failing_report->positive) {
    const DefinitenessReport& pos = *bad.failing_report->positive;
    t.expect(!pos.uniformly_definite && pos.margin < 1e-9,
             "failing configuration: positive margin " + num(pos.margin) +
                 ", want < 1e-9");
    t.expect(bad.failing_report->partition.positive == IndexSet({1, 2}),
             "failing configuration: positive partition not {1, 2}");
  } else {
    t.expect(false, "failing configuration report missing");
  }

  // The margin collapse is witnessed by an explicit neutral combination of
  // the two positive vectors in the failing weave.
  FrameFamily w = weave(ns.f, ns.g, {1});
  KVector v(3);
  for (std::size_t i = 0; i < 3; ++i) v[i] = w.vector(0)[i] + w.vector(1)[i];
  t.expect(euclid_norm(v) > 1.0, "neutral combination degenerated to zero");
  t.expect(std::abs(indefinite_inner(v, v, ns.space)) < 1e-12,
           "combination of positive vectors is not neutral");
}

void c9_two_sided_equivalence(Tally& t) {
  int disagreements = 0;
  auto check_pair = [&](const FrameFamily& f, const FrameFamily& g,
                        const KreinSpace& sp) {
    const std::size_t m = f.size();
    JWeavingReport jw = is_j_weaving(f, g, SubsetSpec::exhaustive(m));
    bool all_ok = true;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask)
      all_ok = all_ok && ts::two_sided_ok(f, g, sigma_from_mask(mask, m), sp);
    if (jw.is_j_weaving != all_ok) ++disagreements;
  };

  for (const auto& [name, p] : ts::all_fixture_pairs()) check_pair(p.f, p.g, p.space);

  SplitMix64 rng(907);
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 2 + static_cast<std::size_t>(i % 3);
    const std::size_t m = dim + 1;
    KreinSpace sp = ts::random_space(dim, pick_field(i), rng);
    FrameFamily f = ts::random_frame(sp, m, rng);
    FrameFamily g = ts::random_frame(sp, m, rng);
    check_pair(f, g, sp);
  }
  t.expect(disagreements == 0, num(disagreements) + " disagreement(s)");
}

void c10_exact_enumeration(Tally& t) {
  FrameFamily f = uniform_tight_frame(1, 2);
  const IndexSet full = {1, 2};
  const KVector k = {1.0};
  double total = 0.0;
  for (int pattern = 0; pattern < 4; ++pattern) {
    std::vector<bool> keep = {(pattern & 1) != 0, (pattern & 2) != 0};
    KVector khat = reconstruct_from_pattern(f, f, full, k, keep);
    total += std::abs(khat[0] - k[0]);
  }
  t.expect(total / 4.0 == 0.5,
           "four-pattern mean is " + num(total / 4.0) + ", want exactly 0.5");
}

void c11_erasure_scaling(Tally& t) {
  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t dims[3] = {4, 8, 16};
  const std::size_t mults[2] = {16, 64};
  double mhat[3][2] = {};
  double lo = 1e300, hi = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 2; ++b) {
      ErasureConfig cfg;
      cfg.n = dims[a];
      cfg.m = mults[b] * dims[a];
      cfg.trials = 10000;
      cfg.seed = 1100 + static_cast<std::uint64_t>(2 * a + b);
      ErasureReport rep = monte_carlo_bound(cfg);
      mhat[a][b] = rep.m_hat;
      t.expect(std::isfinite(rep.m_hat) && rep.m_hat > 0.0,
               "n=" + num(double(cfg.n)) + " m=" + num(double(cfg.m)) +
                   ": normalized constant not positive");
      lo = std::min(lo, rep.m_hat);
      hi = std::max(hi, rep.m_hat);
    }
  t.expect(hi / lo <= 2.0,
           "normalized constants span [" + num(lo) + ", " + num(hi) +
               "], ratio " + num(hi / lo) + " > 2");
  for (int b = 0; b < 2; ++b)
    t.expect(!(mhat[0][b] < mhat[1][b] && mhat[1][b] < mhat[2][b]),
             "normalized constant grows monotonically in the dimension at m = " +
                 num(double(mults[b])) + "n");

  // Unbiasedness of the keep-half estimator: E[khat] = k, per coordinate,
  // within three standard errors.
  {
    const std::size_t trials = 100000;
    FrameFamily f = uniform_tight_frame(2, 8);
    const IndexSet full = {1, 2, 3, 4, 5, 6, 7, 8};
    SplitMix64 kgen = SplitMix64::stream(1111, 1u << 20);
    const KVector k = random_unit_vector(2, false, kgen);
    double mean[2] = {0.0, 0.0}, sq[2] = {0.0, 0.0};
    for (std::size_t t1 = 0; t1 < trials; ++t1) {
      SplitMix64 rng = SplitMix64::stream(1111, t1);
      TrialResult tr = erasure_trial(f, f, full, k, 0.5, rng);
      for (int i = 0; i < 2; ++i) {
        const double x = tr.estimate[static_cast<std::size_t>(i)].real();
        mean[i] += x;
        sq[i] += x * x;
      }
    }
    for (int i = 0; i < 2; ++i) {
      mean[i] /= static_cast<double>(trials);
      const double var =
          (sq[i] - static_cast<double>(trials) * mean[i] * mean[i]) /
          static_cast<double>(trials - 1);
      const double se = std::sqrt(var / static_cast<double>(trials));
      const double gap = std::abs(mean[i] - k[static_cast<std::size_t>(i)].real());
      t.expect(gap <= 3.0 * se, "coordinate " + num(double(i)) + ": |mean - k| = " +
                                    num(gap) + " exceeds 3 SE = " + num(3.0 * se));
    }
  }

  const double dt = seconds_since(t0);
  t.expect(dt < 300.0, "took " + num(dt) + " s, budget 300 s");
}

void c12_seeded_reruns(Tally& t) {
  // Sampled subset sweep, rerun and across worker counts.
  {
    ts::Pair p = ts::c2_sign_flip_pair();
    SubsetSpec spec = SubsetSpec::sampled(3, 40, 77);
    const Field fl = p.space.field();
    std::string first =
        io::canonical_dump(io::to_json(universal_bounds(p.f, p.g, spec, {}, 1), fl));
    for (unsigned threads : {0u, 2u, 3u}) {
      WeavingReport again = universal_bounds(p.f, p.g, spec, {}, threads);
      t.expect(io::canonical_dump(io::to_json(again, fl)) == first,
               "sampled sweep diverged at " + num(double(threads)) + " threads");
    }
  }

  // Monte Carlo erasure, rerun and across worker counts.
  {
    ErasureConfig cfg;
    cfg.n = 3;
    cfg.m = 24;
    cfg.trials = 500;
    cfg.seed = 13;
    cfg.collect_per_trial = true;
    std::string first = io::canonical_dump(io::to_json(monte_carlo_bound(cfg, 1)));
    for (unsigned threads : {0u, 3u}) {
      t.expect(io::canonical_dump(io::to_json(monte_carlo_bound(cfg, threads))) == first,
               "erasure report diverged at " + num(double(threads)) + " threads");
    }
  }

  // Each randomized criterion family, regenerated from its stream.
  {
    auto eq_dump = [] {
      SplitMix64 rng(301);
      ts::Pair p = ts::random_weaving_pair(3, 5, Field::cplx, rng);
      return io::canonical_dump(io::to_json(
          check_equivalences(p.f, p.g, SubsetSpec::exhaustive(5)), p.space.field()));
    };
    t.expect(eq_dump() == eq_dump(), "equivalence report not reproducible");

    auto pert_dump = [] {
      SplitMix64 rng(502);
      ts::PerturbedInstance inst = ts::random_perturbed_instance(3, 5, Field::real, rng);
      return io::canonical_dump(io::to_json(
          perturbation_weaving_check(inst.f, inst.u, SubsetSpec::exhaustive(5)),
          inst.space.field()));
    };
    t.expect(pert_dump() == pert_dump(), "perturbation report not reproducible");

    auto inverse_dump = [] {
      SplitMix64 rng = SplitMix64::stream(601, 0);
      KreinSpace sp = ts::random_space(3, Field::cplx, rng);
      FrameFamily f = ts::random_frame(sp, 5, rng);
      return io::canonical_dump(io::to_json(
          inverse_operator_weaving_check(f, f, SubsetSpec::exhaustive(5)), sp.field()));
    };
    t.expect(inverse_dump() == inverse_dump(), "inverse-operator report not reproducible");

    auto jweave_dump = [] {
      SplitMix64 rng(907);
      KreinSpace sp = ts::random_space(3, Field::real, rng);
      FrameFamily f = ts::random_frame(sp, 4, rng);
      FrameFamily g = ts::random_frame(sp, 4, rng);
      return io::canonical_dump(
          io::to_json(is_j_weaving(f, g, SubsetSpec::exhaustive(4))));
    };
    t.expect(jweave_dump() == jweave_dump(), "J-weaving report not reproducible");
  }
}

struct Criterion {
  int id;
  const char* label;
  std::function<void(Tally&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "indefinite-plane pair certified weaving over all 8 subsets", c1_certified_weaving},
      {2, "singular pair certified not weaving with pinned worst subset and witness",
       c2_certified_counterexample},
      {3, "four formulations agree on the truncation pair and 100 random pairs",
       c3_formulations_agree},
      {4, "operator bound holds in both directions on every fixture",
       c4_operator_bound_both_directions},
      {5, "perturbation sufficiency on fixtures and 200 random instances",
       c5_perturbation_sufficiency},
      {6, "inverse-operator images weave in the trivial case and 200 random instances",
       c6_inverse_operator_images},
      {7, "projected-frame verdict matches the woven verdict on every fixture subset",
       c7_projection_characterization},
      {8, "J-weaving certified for the axis pair; neutral-span pair weaves but fails it",
       c8_j_weaving_fixtures},
      {9, "J-weaving agrees with ordered two-sided bounds on fixtures and 100 random pairs",
       c9_two_sided_equivalence},
      {10, "one-dimensional erasure enumeration averages exactly one half",
       c10_exact_enumeration},
      {11, "normalized erasure error stays in a band, no growth, unbiased estimator",
       c11_erasure_scaling},
      {12, "seeded reruns reproduce every randomized report byte for byte",
       c12_seeded_reruns},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Tally t;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(t);
    } catch (const std::exception& e) {
      t.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (t.ok) {
      std::printf("[PASS] C%d: %s (%.2f s)\n", c.id, c.label, dt);
    } else {
      std::printf("[FAIL] C%d: %s (%.2f s)\n       %s\n", c.id, c.label, dt,
                  t.detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }

  if (failures == 0)
    std::printf("all %zu criteria passed\n", criteria.size());
  else
    std::printf("%d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
