#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kweave/rng.hpp"
#include "kweave/weaving.hpp"

namespace kweave {

/// Equal-norm tight frame of m >= n vectors for the trivial real space of
/// dimension n: every vector has Euclidean norm sqrt(n) and
/// sum_j z_j z_j^T = m I. Built from the real harmonic construction
/// (cos/sin rows at frequencies 1..floor(n/2), plus a constant coordinate
/// for odd n); m == n falls back to the scaled standard basis.
FrameFamily uniform_tight_frame(std::size_t n, std::size_t m);

/// Same, but validates a caller-supplied space (must be trivial real, dim n).
FrameFamily uniform_tight_frame(std::size_t n, std::size_t m, const KreinSpace& sp);

/// Error operator of an erasure pattern against the sigma-weave:
///   E = sum_{n in sigma} delta_n z_n (x) S_f^{-1} z_n
///     + sum_{n not in sigma} delta_n z'_n (x) S_g^{-1} z'_n
/// where (a (x) b) k = [k, b] a. delta holds one coefficient per index.
Matrix error_operator(const FrameFamily& f, const FrameFamily& g, const IndexSet& sigma,
                      const std::vector<double>& delta, const Tolerances& tol = {});

/// Randomized reconstruction: with keep indicators d_n in {0,1},
///   khat = (2/m) sum_n d_n [k, w_n] w_n
/// over the sigma-weave w. The 2/m factor makes the estimator unbiased at
/// erasure probability 1/2 (the only probability for which that holds).
KVector reconstruct_from_pattern(const FrameFamily& f, const FrameFamily& g,
                                 const IndexSet& sigma, const KVector& k,
                                 const std::vector<bool>& keep);

struct TrialResult {
  KVector estimate;
  double relative_error = 0.0;  // ||khat - k||_J / ||k||_J
  std::vector<bool> kept;
};

/// One random trial: each coefficient survives independently with
/// probability 1 - erasure_prob. Throws ZeroVectorError for k = 0.
TrialResult erasure_trial(const FrameFamily& f, const FrameFamily& g,
                          const IndexSet& sigma, const KVector& k,
                          double erasure_prob, SplitMix64& rng);

struct ErasureConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double erasure_prob = 0.5;
  std::uint64_t seed = 0;
  std::size_t test_vectors = 1;   // random unit vectors sharing each trial's pattern
  bool collect_per_trial = false;
};

struct ErasureReport {
  ErasureConfig config;
  double mean_relative_error = 0.0;
  double std_error = 0.0;          // standard error of the mean over trials
  double epsilon = 0.0;            // sqrt((n/m) ln n)
  double m_hat = 0.0;              // mean / epsilon; NaN when epsilon == 0
  double m_hat_std_error = 0.0;
  bool unbiased_estimator = false; // erasure_prob == 1/2
  std::string rng_algorithm;       // "splitmix64"
  std::vector<double> per_trial;   // per-trial mean relative errors, if collected
};

/// Monte Carlo estimate of the mean relative reconstruction error for the
/// self-woven uniform tight frame (F = G, so every weave is the same family).
/// Trial t draws its erasure pattern and test vectors from the derived stream
/// (seed, t); the reduction over trials is sequential by index, so the report
/// is identical for any worker count. threads = 0 uses all hardware threads.
ErasureReport monte_carlo_bound(const ErasureConfig& cfg, unsigned threads = 0);

}  // namespace kweave
