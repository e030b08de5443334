#pragma once

#include <optional>

#include "kweave/weaving.hpp"

namespace kweave {

/// Indices split by the sign of [z_n, z_n]; neutral and zero vectors count as
/// non-negative and land on the positive side.
struct SignPartition {
  IndexSet positive;
  IndexSet negative;
};

SignPartition sign_partition(const FrameFamily& f);

/// Uniform definiteness of span{vectors} with respect to [.,.]. With B a
/// J-orthonormal basis of the span, the margin is the extremal eigenvalue of
/// A = B^H D B nearest zero on the requested side: lambda_min(A) for sign +1,
/// lambda_max(A) for sign -1. The span is uniformly definite when
/// sign * margin > rel_psd, and maximal when its dimension matches the
/// signature count of that sign.
struct DefinitenessReport {
  int sign = +1;
  std::size_t subspace_dim = 0;
  double margin = 0.0;
  bool uniformly_definite = false;
  bool maximal = false;
};

/// Throws DegenerateSubspaceError when the span is {0}.
DefinitenessReport uniformly_definite(const std::vector<KVector>& spanning, int sign,
                                      const KreinSpace& sp, const Tolerances& tol = {});

/// A family is a J-frame when the spans of its sign-partitioned halves are
/// maximal uniformly J-positive resp. J-negative. A side whose signature
/// count is zero is vacuously fine as long as it spans nothing.
struct JFrameReport {
  SignPartition partition;
  std::optional<DefinitenessReport> positive;  // absent when the side spans {0}
  std::optional<DefinitenessReport> negative;
  bool is_j_frame = false;
};

JFrameReport is_j_frame(const FrameFamily& f, const Tolerances& tol = {});

/// Every examined weave must be a J-frame. The first failing subset in
/// enumeration order is reported. Exhaustive mode certifies; sampled mode can
/// only refute.
struct JWeavingReport {
  bool is_j_weaving = false;
  bool exhaustive = false;
  std::uint64_t examined = 0;
  std::optional<IndexSet> failing_subset;
  std::optional<JFrameReport> failing_report;
};

JWeavingReport is_j_weaving(const FrameFamily& f, const FrameFamily& g,
                            const SubsetSpec& spec, const Tolerances& tol = {},
                            unsigned threads = 0);

/// Two-sided bounds of a weave: on each sign-sorted subspace M_+/M_- of the
/// woven family, the extremal values of
///     sum_{n in side} |[k, w_n]|^2 / [k, k]
/// over the subspace. On M_+ these are 0 < alpha_plus <= beta_plus for a
/// J-frame; on M_- the denominator is negative and the ordering flips to
/// beta_minus <= alpha_minus < 0. Computed as a generalized Hermitian
/// eigenproblem after reducing with a J-inner-orthonormal basis.
struct TwoSidedBounds {
  struct Side {
    std::size_t dim = 0;
    bool definite = false;  // restricted form B^H D B has one sign only
    double alpha = 0.0;     // extremal ratio nearest zero... see ordering above
    double beta = 0.0;
  };
  std::optional<Side> plus;   // absent when no vector of that sign is present
  std::optional<Side> minus;
};

/// Throws DegenerateSubspaceError when a side's restricted form B^H D B is
/// singular at the rel_psd cut (a neutral direction inside the subspace).
TwoSidedBounds two_sided_bounds(const FrameFamily& f, const FrameFamily& g,
                                const IndexSet& sigma, const Tolerances& tol = {});

/// The success criterion tying two_sided_bounds to J-weaving: both sides
/// definite with the right sign and ordering, and subspace dimensions equal
/// to the signature counts.
bool two_sided_success(const TwoSidedBounds& b, const KreinSpace& sp);

}  // namespace kweave
