#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace kweave;

TEST_CASE("analysis coefficients on the signed plane") {
  ts::Pair p = ts::c2_sign_flip_pair();
  std::vector<scalar> c = analysis_coefficients(p.f, {1.0, 0.0});
  REQUIRE(c.size() == 3);
  CHECK(c[0] == scalar(1.0));
  CHECK(c[1] == scalar(0.0));
  CHECK(c[2] == scalar(1.0));

  std::vector<scalar> z = analysis_coefficients(p.f, {0.0, 0.0});
  for (scalar v : z) CHECK(v == scalar(0.0));
}

TEST_CASE("coefficients of the j image keep their moduli") {
  ts::Pair p = ts::c3_neutral_span_pair();
  SplitMix64 rng(41);
  KVector k = random_unit_vector(3, true, rng);
  KVector jk = j_apply(k, p.space);
  std::vector<KVector> jz;
  for (const KVector& v : p.f.vectors()) jz.push_back(j_apply(v, p.space));
  FrameFamily jf(p.space, jz);

  std::vector<scalar> a = analysis_coefficients(p.f, k);
  std::vector<scalar> b = analysis_coefficients(jf, jk);
  for (std::size_t n = 0; n < a.size(); ++n)
    CHECK(std::abs(a[n]) == doctest::Approx(std::abs(b[n])).epsilon(1e-12));
}

TEST_CASE("frame operator of the standard basis is the identity") {
  KreinSpace sp = KreinSpace::trivial(3);
  FrameFamily f(sp, {ts::basis_vec(3, 0), ts::basis_vec(3, 1), ts::basis_vec(3, 2)});
  Matrix s = frame_operator(f);
  CHECK((s - Matrix::identity(3)).max_abs() < 1e-14);
}

TEST_CASE("frame operator of the diagonal pair") {
  ts::Pair p = ts::r2_diag_pair();
  Matrix s = frame_operator(p.f);
  CHECK(s(0, 0) == scalar(1.0));
  CHECK(s(1, 1) == scalar(-4.0));  // J-self-adjoint, not PSD
  CHECK(s(0, 1) == scalar(0.0));
  CHECK(s(1, 0) == scalar(0.0));
}

TEST_CASE("frame operator matches its defining sum and is j-self-adjoint") {
  ts::Pair p = ts::c3_neutral_span_pair();
  Matrix s = frame_operator(p.f);
  SplitMix64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    KVector k = random_unit_vector(3, true, rng);
    KVector direct(3);
    for (std::size_t n = 0; n < p.f.size(); ++n) {
      scalar c = indefinite_inner(k, p.f.vector(n), p.space);
      for (std::size_t i = 0; i < 3; ++i) direct[i] += c * p.f.vector(n)[i];
    }
    KVector via = s.apply(k);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(via[i] - direct[i]) < 1e-12);

    KVector y = random_unit_vector(3, true, rng);
    scalar lhs = indefinite_inner(s.apply(k), y, p.space);
    scalar rhs = indefinite_inner(k, s.apply(y), p.space);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("j times frame operator is hermitian psd") {
  ts::Pair p = ts::c2_sign_flip_pair();
  Matrix s = frame_operator(p.f);
  Matrix js(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) js(i, j) = p.space.sign(i) * s(i, j);
  CHECK((js - js.adjoint()).max_abs() < 1e-12);
  EigResult e = hermitian_eig(js, false);
  CHECK(e.values.front() >= -1e-12);
}

TEST_CASE("frame bounds of bases and the diagonal pair") {
  KreinSpace sp = KreinSpace::trivial(4);
  std::vector<KVector> basis;
  for (std::size_t i = 0; i < 4; ++i) basis.push_back(ts::basis_vec(4, i));
  FrameBounds ob = frame_bounds(FrameFamily(sp, basis));
  CHECK(ob.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ob.upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ob.is_frame);

  // The quadratic form of {(1,0),(0,2)} against signature (+1,-1) is
  // diag(1,4); the optimal upper bound is 4, not the vector norm 2.
  FrameBounds db = frame_bounds(ts::r2_diag_pair().f);
  CHECK(db.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(db.upper == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("signature conjugation does not move the spectrum") {
  SplitMix64 rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    KreinSpace sp = ts::random_space(4, Field::cplx, rng);
    FrameFamily f = ts::random_frame(sp, 6, rng);
    Matrix m = frame_quadratic_matrix(f);

    // Euclidean frame matrix Z Z^H of the same vectors.
    Matrix zz(4, 4);
    for (const KVector& z : f.vectors()) zz.add_outer(z, z);

    EigResult em = hermitian_eig(m, false);
    EigResult ez = hermitian_eig(zz, false);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(em.values[i] == doctest::Approx(ez.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("quadratic form sandwich with equality at the extremes") {
  ts::Pair p = ts::c2_sign_flip_pair();
  Matrix m = frame_quadratic_matrix(p.f);
  EigResult e = hermitian_eig(m);
  FrameBounds b = frame_bounds(p.f);
  SplitMix64 rng(55);
  for (int rep = 0; rep < 20; ++rep) {
    KVector k = random_unit_vector(2, true, rng);
    double q = 0.0;
    for (scalar c : analysis_coefficients(p.f, k)) q += std::norm(c);
    double nk = j_norm(k, p.space);
    CHECK(q >= b.lower * nk * nk - 1e-10);
    CHECK(q <= b.upper * nk * nk + 1e-10);
  }
  // Equality at the eigenvectors.
  for (bool top : {false, true}) {
    KVector k = e.vectors.column(top ? 1 : 0);
    double q = 0.0;
    for (scalar c : analysis_coefficients(p.f, k)) q += std::norm(c);
    CHECK(q == doctest::Approx(top ? b.upper : b.lower).epsilon(1e-10));
  }
}

TEST_CASE("four single-family bound formulations agree") {
  SplitMix64 rng(202);
  for (int rep = 0; rep < 10; ++rep) {
    KreinSpace sp = ts::random_space(3, Field::cplx, rng);
    FrameFamily f = ts::random_frame(sp, 5, rng);
    FrameBounds ref = frame_bounds(f);
    for (bool aj : {false, true})
      for (bool ji : {false, true}) {
        EigResult e = hermitian_eig(frame_quadratic_matrix(f, aj, ji), false);
        CHECK(e.values.front() == doctest::Approx(ref.lower).epsilon(1e-8));
        CHECK(e.values.back() == doctest::Approx(ref.upper).epsilon(1e-8));
      }
  }
}

TEST_CASE("appending a vector never shrinks the bounds") {
  SplitMix64 rng(301);
  KreinSpace sp = ts::random_space(3, Field::real, rng);
  FrameFamily f = ts::random_frame(sp, 4, rng);
  FrameBounds before = frame_bounds(f);
  std::vector<KVector> ext = f.vectors();
  ext.push_back(random_unit_vector(3, false, rng));
  FrameBounds after = frame_bounds(FrameFamily(sp, ext));
  CHECK(after.lower >= before.lower - 1e-12);
  CHECK(after.upper >= before.upper - 1e-12);
}

TEST_CASE("gramian entries and symmetry") {
  KreinSpace sp = KreinSpace::trivial(3);
  std::vector<KVector> basis;
  for (std::size_t i = 0; i < 3; ++i) basis.push_back(ts::basis_vec(3, i));
  CHECK((gramian(FrameFamily(sp, basis)) - Matrix::identity(3)).max_abs() < 1e-14);

  ts::Pair p = ts::r3_axis_pair();
  Matrix g = gramian(p.f);
  CHECK(g(0, 0).real() == doctest::Approx(std::pow(1.0 / 2.16, 2)).epsilon(1e-12));
  CHECK(g(1, 1).real() == doctest::Approx(std::pow(2.0 / 2.17, 2)).epsilon(1e-12));
  CHECK(g(2, 2).real() == doctest::Approx(-std::pow(1.0 / 2.18, 2)).epsilon(1e-12));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(std::abs(g(r, c) - std::conj(g(c, r))) < 1e-12);
}

TEST_CASE("j-inner gramian of the j images has the euclidean frame spectrum") {
  SplitMix64 rng(404);
  KreinSpace sp = ts::random_space(3, Field::cplx, rng);
  FrameFamily f = ts::random_frame(sp, 5, rng);

  // Gramian in the J-inner product of the J-images; its nonzero spectrum is
  // that of Z Z^H (same two factors multiplied in the opposite order).
  Matrix gj(5, 5);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c)
      gj(r, c) = j_inner(j_apply(f.vector(r), sp), j_apply(f.vector(c), sp), sp);

  Matrix zz(3, 3);
  for (const KVector& z : f.vectors()) zz.add_outer(z, z);

  EigResult eg = hermitian_eig(gj, false);
  EigResult ez = hermitian_eig(zz, false);
  std::vector<double> gnz, znz;
  const double cut = 1e-9 * std::max(gj.max_abs(), 1.0);
  for (double v : eg.values)
    if (std::abs(v) > cut) gnz.push_back(v);
  for (double v : ez.values)
    if (std::abs(v) > cut) znz.push_back(v);
  REQUIRE(gnz.size() == znz.size());
  for (std::size_t i = 0; i < gnz.size(); ++i)
    CHECK(gnz[i] == doctest::Approx(znz[i]).epsilon(1e-8));
}

TEST_CASE("frame verdict with witness") {
  ts::Pair p = ts::c2_sign_flip_pair();
  CHECK(is_frame(p.f).is_frame);

  KreinSpace sp(2, {1, 1}, Field::real);
  FrameFamily dup(sp, {ts::basis_vec(2, 0), ts::basis_vec(2, 0)});
  FrameCheck chk = is_frame(dup);
  CHECK(!chk.is_frame);
  REQUIRE(chk.witness.has_value());
  CHECK(std::abs((*chk.witness)[0]) < 1e-9);
  CHECK(std::abs((*chk.witness)[1]) == doctest::Approx(1.0).epsilon(1e-12));

  SplitMix64 rng(77);
  FrameFamily span = ts::random_frame(KreinSpace::trivial(4, Field::cplx), 7, rng);
  CHECK(is_frame(span).is_frame);
}

TEST_CASE("empty family handling") {
  KreinSpace sp = KreinSpace::trivial(2);
  FrameFamily empty(sp, {});
  CHECK_THROWS_AS(is_frame(empty), EmptyFamilyError);
  FrameBounds b = frame_bounds(empty);
  CHECK(!b.is_frame);
  CHECK(b.lower == 0.0);
  CHECK(b.upper == 0.0);
}

TEST_CASE("zero vectors are legal members and contribute nothing") {
  KreinSpace sp(2, {1, -1}, Field::real);
  FrameFamily with(sp, {ts::basis_vec(2, 0), KVector(2), ts::basis_vec(2, 1)});
  FrameFamily without(sp, {ts::basis_vec(2, 0), ts::basis_vec(2, 1)});
  FrameBounds a = frame_bounds(with), b = frame_bounds(without);
  CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-14));
  CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-14));
}

TEST_CASE("inverse frame operator inverts and rejects non-frames") {
  ts::Pair p = ts::c2_sign_flip_pair();
  Matrix s = frame_operator(p.f);
  Matrix sinv = inverse_frame_operator(p.f);
  CHECK((s * sinv - Matrix::identity(2)).max_abs() < 1e-10);
  CHECK((sinv * s - Matrix::identity(2)).max_abs() < 1e-10);

  KreinSpace sp(2, {1, 1}, Field::real);
  FrameFamily dup(sp, {ts::basis_vec(2, 0), ts::basis_vec(2, 0)});
  CHECK_THROWS_AS(inverse_frame_operator(dup), NotAFrameError);
}

TEST_CASE("family construction validates vector lengths") {
  KreinSpace sp = KreinSpace::trivial(2);
  CHECK_THROWS_AS(FrameFamily(sp, {KVector(3)}), DimensionError);
}
