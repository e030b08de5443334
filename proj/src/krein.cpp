#include "kweave/krein.hpp"

#include <cmath>

namespace kweave {

KreinSpace::KreinSpace(std::size_t dim, std::vector<int> signature, Field field)
    : dim_(dim), signature_(std::move(signature)), field_(field), pos_(0) {
  if (dim_ == 0) throw ValidationError("KreinSpace: dimension must be positive");
  if (signature_.size() != dim_)
    throw ValidationError("KreinSpace: signature has " + std::to_string(signature_.size()) +
                          " entries for dimension " + std::to_string(dim_));
  sign_.reserve(dim_);
  for (int s : signature_) {
    if (s != 1 && s != -1)
      throw ValidationError("KreinSpace: signature entries must be +1 or -1");
    sign_.push_back(static_cast<double>(s));
    if (s == 1) ++pos_;
  }
}

KreinSpace KreinSpace::trivial(std::size_t dim, Field field) {
  return KreinSpace(dim, std::vector<int>(dim, 1), field);
}

void KreinSpace::check_vector(const KVector& x, const char* who) const {
  if (x.size() != dim_)
    throw DimensionError(std::string(who) + ": vector length " + std::to_string(x.size()) +
                         " does not match space dimension " + std::to_string(dim_));
}

scalar indefinite_inner(const KVector& x, const KVector& y, const KreinSpace& sp) {
  sp.check_vector(x, "indefinite_inner");
  sp.check_vector(y, "indefinite_inner");
  scalar s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += sp.sign(i) * x[i] * std::conj(y[i]);
  return s;
}

KVector j_apply(const KVector& x, const KreinSpace& sp) {
  sp.check_vector(x, "j_apply");
  KVector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sp.sign(i) * x[i];
  return y;
}

scalar j_inner(const KVector& x, const KVector& y, const KreinSpace& sp) {
  sp.check_vector(x, "j_inner");
  sp.check_vector(y, "j_inner");
  return euclid_inner(x, y);
}

double j_norm(const KVector& x, const KreinSpace& sp) {
  sp.check_vector(x, "j_norm");
  return euclid_norm(x);
}

}  // namespace kweave
