#include "kweave/erasure.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kweave/parallel.hpp"

namespace kweave {

FrameFamily uniform_tight_frame(std::size_t n, std::size_t m) {
  return uniform_tight_frame(n, m, KreinSpace::trivial(n, Field::real));
}

FrameFamily uniform_tight_frame(std::size_t n, std::size_t m, const KreinSpace& sp) {
  if (n == 0) throw ValidationError("uniform_tight_frame: dimension must be positive");
  if (m < n)
    throw InsufficientRedundancyError("uniform_tight_frame: need m >= n, got m = " +
                                      std::to_string(m) + ", n = " + std::to_string(n));
  if (sp.dim() != n || !sp.is_trivial() || sp.field() != Field::real)
    throw MismatchError("uniform_tight_frame: space must be the trivial real space "
                        "of dimension n");

  std::vector<KVector> vecs(m, KVector(n, 0.0));
  if (m == n) {
    const double root = std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < m; ++j) vecs[j][j] = root;
    return FrameFamily(sp, std::move(vecs));
  }

  const double root2 = std::numbers::sqrt2;
  const std::size_t freqs = n / 2;
  const bool odd = (n % 2) != 0;
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t c = 0;
    if (odd) vecs[j][c++] = 1.0;
    for (std::size_t k = 1; k <= freqs; ++k) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(j) / static_cast<double>(m);
      vecs[j][c++] = root2 * std::cos(ang);
      vecs[j][c++] = root2 * std::sin(ang);
    }
  }
  return FrameFamily(sp, std::move(vecs));
}

Matrix error_operator(const FrameFamily& f, const FrameFamily& g, const IndexSet& sigma,
                      const std::vector<double>& delta, const Tolerances& tol) {
  detail::check_pair(f, g);
  const std::size_t m = f.size();
  if (delta.size() != m)
    throw MismatchError("error_operator: got " + std::to_string(delta.size()) +
                        " coefficients for " + std::to_string(m) + " vectors");
  const std::uint64_t mask = detail::indices_to_mask(sigma, m);
  const Matrix sf_inv = inverse_frame_operator(f, tol);
  const Matrix sg_inv = inverse_frame_operator(g, tol);

  const std::size_t dim = f.space().dim();
  Matrix e(dim, dim);
  for (std::size_t n = 0; n < m; ++n) {
    if (delta[n] == 0.0) continue;
    const bool from_f = (mask >> n) & 1ull;
    const KVector& z = from_f ? f.vector(n) : g.vector(n);
    const Matrix& inv = from_f ? sf_inv : sg_inv;
    // delta_n * z (x) S^{-1} z adds delta_n * z (D S^{-1} z)^H.
    KVector dual = j_apply(inv.apply(z), f.space());
    for (scalar& x : dual) x *= delta[n];
    e.add_outer(z, dual);
  }
  return e;
}

KVector reconstruct_from_pattern(const FrameFamily& f, const FrameFamily& g,
                                 const IndexSet& sigma, const KVector& k,
                                 const std::vector<bool>& keep) {
  detail::check_pair(f, g);
  f.space().check_vector(k, "reconstruct_from_pattern");
  const std::size_t m = f.size();
  if (keep.size() != m)
    throw MismatchError("reconstruct_from_pattern: got " + std::to_string(keep.size()) +
                        " indicators for " + std::to_string(m) + " vectors");
  const std::uint64_t mask = detail::indices_to_mask(sigma, m);
  KVector khat(f.space().dim(), 0.0);
  const double factor = 2.0 / static_cast<double>(m);
  for (std::size_t n = 0; n < m; ++n) {
    if (!keep[n]) continue;
    const KVector& w = ((mask >> n) & 1ull) ? f.vector(n) : g.vector(n);
    const scalar coeff = indefinite_inner(k, w, f.space()) * factor;
    for (std::size_t i = 0; i < khat.size(); ++i) khat[i] += coeff * w[i];
  }
  return khat;
}

TrialResult erasure_trial(const FrameFamily& f, const FrameFamily& g,
                          const IndexSet& sigma, const KVector& k,
                          double erasure_prob, SplitMix64& rng) {
  if (!(erasure_prob >= 0.0 && erasure_prob <= 1.0))
    throw ValidationError("erasure_trial: erasure probability outside [0,1]");
  const double knorm = j_norm(k, f.space());
  if (knorm <= 0.0) throw ZeroVectorError("erasure_trial: test vector is zero");

  TrialResult tr;
  tr.kept.resize(f.size());
  for (std::size_t n = 0; n < f.size(); ++n)
    tr.kept[n] = !rng.next_bernoulli(erasure_prob);
  tr.estimate = reconstruct_from_pattern(f, g, sigma, k, tr.kept);
  KVector diff(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) diff[i] = tr.estimate[i] - k[i];
  tr.relative_error = euclid_norm(diff) / knorm;
  return tr;
}

ErasureReport monte_carlo_bound(const ErasureConfig& cfg, unsigned threads) {
  if (cfg.trials == 0) throw ValidationError("monte_carlo_bound: trials must be >= 1");
  if (cfg.test_vectors == 0)
    throw ValidationError("monte_carlo_bound: test_vectors must be >= 1");
  if (!(cfg.erasure_prob > 0.0 && cfg.erasure_prob < 1.0))
    throw ValidationError("monte_carlo_bound: erasure probability outside (0,1)");
  const FrameFamily frame = uniform_tight_frame(cfg.n, cfg.m);
  IndexSet full(cfg.m);
  for (std::size_t n = 0; n < cfg.m; ++n) full[n] = static_cast<int>(n + 1);

  std::vector<double> per_trial(cfg.trials);
  auto chunk_fn = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t t = lo; t < hi; ++t) {
      SplitMix64 rng = SplitMix64::stream(cfg.seed, t);
      std::vector<bool> keep(cfg.m);
      for (std::size_t n = 0; n < cfg.m; ++n)
        keep[n] = !rng.next_bernoulli(cfg.erasure_prob);
      double acc = 0.0;
      for (std::size_t v = 0; v < cfg.test_vectors; ++v) {
        const KVector k = random_unit_vector(cfg.n, false, rng);
        const KVector khat = reconstruct_from_pattern(frame, frame, full, k, keep);
        KVector diff(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) diff[i] = khat[i] - k[i];
        acc += euclid_norm(diff);  // ||k|| = 1
      }
      per_trial[t] = acc / static_cast<double>(cfg.test_vectors);
    }
    return 0;
  };
  detail::parallel_chunk_map<int>(cfg.trials, threads, 1, chunk_fn);

  double mean = 0.0;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) mean += per_trial[t];
  mean /= static_cast<double>(cfg.trials);
  double var = 0.0;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const double d = per_trial[t] - mean;
    var += d * d;
  }
  var = cfg.trials > 1 ? var / static_cast<double>(cfg.trials - 1) : 0.0;

  ErasureReport rep;
  rep.config = cfg;
  rep.mean_relative_error = mean;
  rep.std_error = std::sqrt(var / static_cast<double>(cfg.trials));
  rep.epsilon = std::sqrt(static_cast<double>(cfg.n) / static_cast<double>(cfg.m) *
                          std::log(static_cast<double>(cfg.n)));
  if (rep.epsilon > 0.0) {
    rep.m_hat = mean / rep.epsilon;
    rep.m_hat_std_error = rep.std_error / rep.epsilon;
  } else {
    rep.m_hat = std::numeric_limits<double>::quiet_NaN();
    rep.m_hat_std_error = std::numeric_limits<double>::quiet_NaN();
  }
  rep.unbiased_estimator = cfg.erasure_prob == 0.5;
  rep.rng_algorithm = "splitmix64";
  if (cfg.collect_per_trial) rep.per_trial = std::move(per_trial);
  return rep;
}

}  // namespace kweave
