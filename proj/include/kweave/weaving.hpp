#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "kweave/frames.hpp"

namespace kweave {

/// Subsets are reported as sorted 1-based index lists.
using IndexSet = std::vector<int>;

/// How a pair of families is swept over weave subsets.
///   exhaustive     all 2^m subsets (m <= 20)
///   sampled        a fixed deterministic battery (empty set, full set,
///                  singletons, co-singletons, the sign-partition subsets of
///                  both families) plus `sample_count` seeded uniform draws
///   explicit_sets  caller-provided subsets, evaluated in the given order
/// Only an exhaustive sweep certifies; the other modes can refute (any bad
/// subset found is a genuine counterexample) but a clean pass only means
/// "not refuted".
struct SubsetSpec {
  enum class Mode { exhaustive, sampled, explicit_sets };

  Mode mode = Mode::exhaustive;
  std::size_t family_size = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::vector<IndexSet> sets;

  static SubsetSpec exhaustive(std::size_t m);
  static SubsetSpec sampled(std::size_t m, std::size_t count, std::uint64_t seed);
  static SubsetSpec explicit_sets(std::size_t m, std::vector<IndexSet> sets);
};

/// The sigma-weave: vectors with index in sigma come from f, the rest from g.
FrameFamily weave(const FrameFamily& f, const FrameFamily& g, const IndexSet& sigma);

/// Inner-product convention for the equivalent weaving formulations:
/// optionally replace both families by their J-images, optionally take
/// coefficients in [.,.]_J instead of [.,.].
struct InnerMode {
  bool apply_j = false;
  bool use_j_inner = false;
};

struct SubsetBounds {
  IndexSet subset;
  double lower = 0.0;
  double upper = 0.0;
};

struct WeavingReport {
  double universal_lower = 0.0;  // min over examined subsets of the optimal lower bound
  double universal_upper = 0.0;  // max over examined subsets of the optimal upper bound
  bool is_weaving = false;       // universal_lower > rel_psd * universal_upper
  bool exhaustive = false;       // true only when every subset was examined
  std::uint64_t examined = 0;
  IndexSet worst_subset;         // attains universal_lower; lexicographically
                                 // smallest on exact ties
  KVector witness;               // unit vector attaining the worst lower bound
  std::vector<SubsetBounds> per_subset;  // filled for explicit specs and small sweeps
};

/// Universal bounds over the requested subsets, under the plain indefinite
/// inner product. threads = 0 uses all hardware threads; results do not
/// depend on the worker count.
WeavingReport universal_bounds(const FrameFamily& f, const FrameFamily& g,
                               const SubsetSpec& spec, const Tolerances& tol = {},
                               unsigned threads = 0);

/// Same sweep under an alternative formulation.
WeavingReport universal_bounds_mode(const FrameFamily& f, const FrameFamily& g,
                                    const SubsetSpec& spec, InnerMode mode,
                                    const Tolerances& tol = {}, unsigned threads = 0);

/// The four equivalent formulations: {z}/{z'} or their J-images, under [.,.]
/// or [.,.]_J. All four universal bound pairs must agree (they are spectra of
/// unitarily similar matrices); each is recomputed from scratch here.
struct EquivalenceReport {
  std::array<WeavingReport, 4> formulations;  // (J applied, J inner) in order
                                              // (0,0) (1,0) (0,1) (1,1)
  double max_relative_gap = 0.0;  // worst bound disagreement, relative to the scale
  bool bounds_agree = false;
  bool verdicts_agree = false;
};

EquivalenceReport check_equivalences(const FrameFamily& f, const FrameFamily& g,
                                     const SubsetSpec& spec, const Tolerances& tol = {},
                                     unsigned threads = 0);

/// Woven frame operators versus the universal lower bound:
/// (i)  the smallest singular value over the sweep is >= the universal lower
///      bound (they coincide for optimal bounds);
/// (ii) the universal lower bound is >= s_min^2 / (beta_f + beta_g) where
///      beta_* are the upper bounds of the two families.
/// Both inequalities are checked at rel_eq and reported.
struct OperatorBoundReport {
  double s_min = 0.0;            // min over subsets of the smallest singular value of S_sigma
  IndexSet s_min_subset;
  double universal_lower = 0.0;
  double universal_upper = 0.0;
  bool is_weaving = false;
  double upper_f = 0.0, upper_g = 0.0;
  bool lower_bound_holds = false;     // (i)
  bool quotient_bound_holds = false;  // (ii)
};

OperatorBoundReport operator_lower_bound_check(const FrameFamily& f, const FrameFamily& g,
                                               const SubsetSpec& spec,
                                               const Tolerances& tol = {},
                                               unsigned threads = 0);

/// Sufficient perturbation condition: if ||I - U||_J^2 < lower/upper for the
/// base family, then the family weaves with its image under U, with woven
/// lower bound at least (sqrt(lower) - sqrt(upper) ||I - U||_J)^2. The
/// condition is sufficient only; the sweep verdict is reported either way.
struct PerturbationReport {
  FrameBounds base;
  double deviation = 0.0;        // ||I - U||_J
  bool u_invertible = false;
  bool hypothesis_holds = false;
  double predicted_lower = 0.0;  // meaningful only under the hypothesis
  WeavingReport woven;
  bool prediction_confirmed = false;  // vacuously true when hypothesis fails
};

PerturbationReport perturbation_weaving_check(const FrameFamily& f, const Matrix& u,
                                              const SubsetSpec& spec,
                                              const Tolerances& tol = {},
                                              unsigned threads = 0);

/// If ||S_f||_J ||S_f^{-1} - S_g^{-1}||_J < lower/upper of the (f, g) sweep
/// (or the same with ||S_g||_J), the families pulled back through the inverse
/// frame operators weave as well. Checked by direct sweep when the
/// hypothesis holds.
struct InverseOperatorReport {
  WeavingReport pair;
  double norm_f = 0.0, norm_g = 0.0;
  double inverse_gap = 0.0;      // ||S_f^{-1} - S_g^{-1}||_J
  bool hypothesis_holds = false;
  double diagnostic_lower = 0.0; // (sqrt(lower) s_min(S^{-1}) - sqrt(upper) gap)^2, clamped
  std::optional<WeavingReport> inverse_pair;
};

InverseOperatorReport inverse_operator_weaving_check(const FrameFamily& f,
                                                     const FrameFamily& g,
                                                     const SubsetSpec& spec,
                                                     const Tolerances& tol = {},
                                                     unsigned threads = 0);

/// Per-subset frame criterion through the orthogonal complement: with P the
/// J-orthogonal projection onto span{z_n : n in sigma}^perp, the projected
/// complement family {P z'_n : n not in sigma} is a frame for that subspace
/// exactly when the sigma-weave is a frame for the whole space. Coefficients
/// on the subspace are taken in [.,.]_J, the inner product that makes P
/// orthogonal.
struct ProjectionReport {
  IndexSet sigma;
  std::size_t complement_dim = 0;
  bool vacuous = false;          // sigma part already spans; complement is {0}
  double projected_lower = 0.0;
  double projected_upper = 0.0;
  bool projected_is_frame = false;
  bool woven_is_frame = false;
  bool equivalent = false;
};

ProjectionReport projection_characterization_check(const FrameFamily& f,
                                                   const FrameFamily& g,
                                                   const IndexSet& sigma,
                                                   const Tolerances& tol = {});

namespace detail {

constexpr std::size_t kExhaustiveLimit = 20;
constexpr std::size_t kMaskLimit = 64;

/// Materialized (or virtual, for exhaustive sweeps) subset mask sequence.
struct MaskPlan {
  bool range = false;
  std::uint64_t count = 0;
  std::vector<std::uint64_t> masks;
  std::uint64_t mask(std::uint64_t i) const { return range ? i : masks[i]; }
};

MaskPlan subset_plan(const SubsetSpec& spec, const FrameFamily& f, const FrameFamily& g);
IndexSet mask_to_indices(std::uint64_t mask, std::size_t m);
std::uint64_t indices_to_mask(const IndexSet& sigma, std::size_t m);
/// Orders subsets by their sorted index lists (so {1,3} precedes {2}).
bool subset_lex_less(std::uint64_t a, std::uint64_t b, std::size_t m);
void check_pair(const FrameFamily& f, const FrameFamily& g);

}  // namespace detail

}  // namespace kweave
