#include "kweave/rng.hpp"

#include <cmath>
#include <numbers>

namespace kweave {

double SplitMix64::next_gaussian() {
  double u1 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

KVector random_unit_vector(std::size_t dim, bool complex_entries, SplitMix64& rng) {
  KVector v(dim);
  double n2 = 0.0;
  do {
    for (std::size_t i = 0; i < dim; ++i) {
      const double re = rng.next_gaussian();
      const double im = complex_entries ? rng.next_gaussian() : 0.0;
      v[i] = scalar(re, im);
    }
    n2 = 0.0;
    for (const scalar& x : v) n2 += std::norm(x);
  } while (n2 < 1e-12);
  const double inv = 1.0 / std::sqrt(n2);
  for (scalar& x : v) x *= inv;
  return v;
}

}  // namespace kweave
