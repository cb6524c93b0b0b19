#include "ret/core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ret;

namespace {

ComplexDyadic random_dyadic(std::mt19937_64 &rng) {
  std::normal_distribution<double> n;
  ComplexDyadic d;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      d(i, j) = {n(rng), n(rng)};
  return d;
}

CVec3 random_cvec(std::mt19937_64 &rng) {
  std::normal_distribution<double> n;
  return {cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)}};
}

} // namespace

TEST(Constants, VacuumRelation) {
  EXPECT_NEAR(phys::eps0 * phys::mu0 * phys::c * phys::c, 1.0, 1e-15);
}

TEST(Frequency, RejectsNonPositive) {
  EXPECT_THROW(Frequency(0.0), Error);
  EXPECT_THROW(Frequency(-1.0), Error);
  EXPECT_THROW(Frequency(std::nan("")), Error);
}

TEST(Frequency, WavelengthRoundTrip) {
  auto w = Frequency::from_wavelength(500e-9);
  EXPECT_NEAR(w.wavelength(), 500e-9, 1e-22);
  EXPECT_NEAR(w.k() * w.wavelength(), 2.0 * pi, 1e-12);
}

TEST(Outer, SingleEntry) {
  CVec3 ez{0.0, 0.0, 1.0};
  auto d = outer(ez, ez);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_EQ(d(i, j), (i == 2 && j == 2) ? cplx{1.0} : cplx{0.0});
}

TEST(Outer, ZeroVector) {
  CVec3 a{1.0, cplx{2.0, 1.0}, 3.0}, zero{};
  EXPECT_EQ(outer(a, zero).frobenius(), 0.0);
}

TEST(Outer, FirstColumn) {
  CVec3 a{1.0, 1.0, 0.0}, ex{1.0, 0.0, 0.0};
  auto d = outer(a, ex);
  EXPECT_EQ(d(0, 0), cplx{1.0});
  EXPECT_EQ(d(1, 0), cplx{1.0});
  EXPECT_EQ(d(2, 0), cplx{0.0});
  for (int i = 0; i < 3; ++i)
    for (int j = 1; j < 3; ++j)
      EXPECT_EQ(d(i, j), cplx{0.0});
}

TEST(Outer, Bilinear) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int t = 0; t < 50; ++t) {
    auto a = random_cvec(rng), b = random_cvec(rng);
    cplx s{n(rng), n(rng)};
    EXPECT_LT(relative_error(outer(s * a, b), s * outer(a, b)), 1e-15);
    EXPECT_LT(relative_error(outer(a, s * b), s * outer(a, b)), 1e-15);
  }
}

TEST(Dyadic, FrobeniusSubmultiplicative) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    auto a = random_dyadic(rng), b = random_dyadic(rng);
    EXPECT_LE((a * b).frobenius(), a.frobenius() * b.frobenius() * (1 + 1e-15));
  }
}

TEST(Dyadic, TransposeConjugateProduct) {
  std::mt19937_64 rng(3);
  auto a = random_dyadic(rng), b = random_dyadic(rng);
  EXPECT_LT(relative_error((a * b).transpose(), b.transpose() * a.transpose()), 1e-15);
  EXPECT_LT(relative_error(a.adjoint(), a.conj().transpose()), 0.0 + 1e-300);
  EXPECT_EQ(a.transpose().transpose()(1, 2), a(1, 2));
  EXPECT_EQ(a.conj()(0, 1), std::conj(a(0, 1)));
}

TEST(Dyadic, MatrixVector) {
  auto id = ComplexDyadic::identity();
  CVec3 v{1.0, cplx{0, 2}, -3.0};
  auto r = id * v;
  for (int i = 0; i < 3; ++i)
    EXPECT_EQ(r[i], v[i]);
  EXPECT_EQ(ComplexDyadic::diagonal(1, 2, 3).trace(), cplx{6.0});
}

TEST(Reciprocity, ExactTransposeIsZero) {
  std::mt19937_64 rng(4);
  auto a = random_dyadic(rng);
  EXPECT_EQ(dyadic_reciprocity_defect(a, a.transpose()), 0.0);
}

TEST(Reciprocity, DetectsAsymmetry) {
  auto a = ComplexDyadic::identity();
  auto b = ComplexDyadic::identity();
  b(0, 1) = 1.0;
  EXPECT_GT(dyadic_reciprocity_defect(a, b), 0.1);
  EXPECT_EQ(dyadic_reciprocity_defect(ComplexDyadic{}, ComplexDyadic{}), 0.0);
}

TEST(RelativeError, Definition) {
  EXPECT_DOUBLE_EQ(relative_error(1.0, 1.1), (1.1 - 1.0) / 1.1);
  EXPECT_EQ(relative_error(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(cplx{0, 1}, cplx{0, -1}), 2.0);
}

TEST(Vec3, Geometry) {
  Vec3 a{1, 2, 3};
  EXPECT_EQ(a.reflected(), (Vec3{1, 2, -3}));
  EXPECT_DOUBLE_EQ(distance(a, Vec3{1, 2, 0}), 3.0);
  EXPECT_FALSE((Vec3{0, std::nan(""), 0}).finite());
}
