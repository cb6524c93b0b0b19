#include "ret/oracles.hpp"
#include "ret/verify.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ret;
using namespace ret::oracle;

namespace {
const Frequency w = Frequency::from_wavelength(500e-9);
const double lam = w.wavelength();
} // namespace

TEST(Report, RelativeErrorDefinition) {
  auto r = make_report("x", "y", 2.0, 2.2, 0.1);
  EXPECT_DOUBLE_EQ(r.relative_error, (2.2 - 2.0) / 2.2);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(make_report("x", "y", 1.0, 2.0, 0.1).passed);
}

TEST(Contour, PlusIdentity) {
  auto r = contour_identity_check(env::Vacuum{}, {lam, 0, 0}, {}, w, Identity::Plus);
  EXPECT_TRUE(r.passed) << r.relative_error;
  EXPECT_LT(r.relative_error, 1e-3);
}

TEST(Contour, MinusIdentity) {
  auto r = contour_identity_check(env::Vacuum{}, {lam, 0, 0}, {}, w, Identity::Minus);
  EXPECT_LT(r.relative_error, 1e-3);
}

TEST(Contour, MinusWithoutPoleFails) {
  ContourOptions o;
  o.include_pole = false;
  auto r = contour_identity_check(env::Vacuum{}, {lam, 0, 0}, {}, w, Identity::Minus, o);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.relative_error, 0.5);
}

TEST(Contour, OtherComponents) {
  ContourOptions o;
  o.row = 0;
  o.col = 2;
  const Vec3 r{0.6 * lam, 0.0, 0.8 * lam};
  for (auto which : {Identity::Plus, Identity::Minus})
    EXPECT_LT(contour_identity_check(env::Vacuum{}, r, {}, w, which, o).relative_error, 1e-3);
}

TEST(Contour, ExtrapolationBeatsRawEpsilon) {
  auto v = contour_identity_values({lam, 0, 0}, {}, w, Identity::Minus);
  ASSERT_EQ(v.at_eps.size(), 2u);
  EXPECT_LT(relative_error(v.real_axis, v.imaginary_axis),
            relative_error(v.at_eps.back(), v.imaginary_axis));
}

TEST(Contour, ImaginaryAxisIntegrand) {
  const double wd = w.omega();
  auto integrand = [&](const oracle::detail::VacuumComponent &g, double xi) {
    return g.xi2_g_imag(xi) * wd / (wd * wd + xi * xi);
  };
  // longitudinal xx: 2(1+x)e^{-x} times a Lorentzian, monotone
  oracle::detail::VacuumComponent lng{{1, 0, 0}, lam, 0, 0};
  double prev = INFINITY;
  for (double xi = 0.0; xi < 50 * wd; xi += 0.05 * wd) {
    const double v = std::abs(integrand(lng, xi));
    EXPECT_LE(v, prev);
    prev = v;
  }
  // transverse xx: (1+x+x^2)e^{-x}, sign-definite with exponential decay
  oracle::detail::VacuumComponent trn{{0, 0, 1}, lam, 0, 0};
  for (double xi = 0.0; xi < 50 * wd; xi += 0.05 * wd)
    EXPECT_GT(integrand(trn, xi), 0.0);
  EXPECT_LT(integrand(trn, 20 * wd), 1e-30 * integrand(trn, 0.0));
}

TEST(Contour, HalfSpaceRejected) {
  EXPECT_THROW(contour_identity_check(env::PerfectMirror{}, {0, 0, lam}, {0, 0, 0.5 * lam}, w,
                                      Identity::Plus),
               Error);
}

TEST(Reference, AgreesWithinErrorBars) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> xy(-0.3, 0.3), z(0.12, 0.7);
  const std::vector<PermittivityModel> ms{material::Constant{2.0}, material::Constant{11.68},
                                          material::Constant{cplx{-3.0, 0.6}},
                                          material::Constant{cplx{4.0, 2.0}},
                                          material::DrudeLorentz{6e15, 1e15, 1e14}};
  for (int i = 0; i < 25; ++i) {
    Vec3 r{xy(rng) * lam, xy(rng) * lam, z(rng) * lam}, rp{xy(rng) * lam, xy(rng) * lam, z(rng) * lam};
    const auto &m = ms[i % ms.size()];
    auto main = halfspace_scatter_full(r, rp, w, m);
    auto ref = sommerfeld_reference(r, rp, w, m);
    const double diff = (main.tensor - ref.tensor).frobenius();
    EXPECT_LE(diff, main.error_estimate + ref.error_estimate) << "geometry " << i;
    EXPECT_LT(ref.error_estimate, 1e-4 * ref.tensor.frobenius());
  }
}

TEST(Reference, TransparentIsZero) {
  auto r = sommerfeld_reference({0, 0, 0.2 * lam}, {0.1 * lam, 0, 0.3 * lam}, w,
                                material::Constant{1.0});
  EXPECT_EQ(r.tensor.frobenius(), 0.0);
}

TEST(Reference, PerfectReflectorMatchesImage) {
  Vec3 r{0.1 * lam, -0.05 * lam, 0.3 * lam}, rp{-0.1 * lam, 0.02 * lam, 0.2 * lam};
  auto ref = sommerfeld_reference(r, rp, w, material::PerfectReflector{});
  EXPECT_LT(relative_error(ref.tensor, mirror_scatter_exact(r, rp, w)), 1e-6);
}

TEST(LimitScan, VacuumNearZone) {
  auto s = limit_scan(vacuum_near_evaluator(w), Direction::NearZone, 1e-4, 1e-1, 4, 1e-4);
  EXPECT_TRUE(s.report.passed) << s.report.detail;
  EXPECT_EQ(s.samples.size(), 13u);
}

TEST(LimitScan, HalfSpaceFarZone) {
  auto s = limit_scan(halfspace_far_evaluator(material::Constant{2.0}, w), Direction::FarZone, 5.0,
                      500.0, 2, 2e-2);
  EXPECT_TRUE(s.report.passed) << s.report.detail;
}

TEST(LimitScan, IdenticalEvaluatorGivesZero) {
  LimitEvaluator same = [](double s) {
    auto d = ComplexDyadic::diagonal(s, 2 * s, 3 * s);
    return std::pair{d, d};
  };
  auto s = limit_scan(same, Direction::FarZone, 1.0, 100.0, 3, 1e-12);
  EXPECT_TRUE(s.report.passed);
  for (const auto &p : s.samples)
    EXPECT_EQ(p.error, 0.0);
}

TEST(LimitScan, DetectsNonMonotone) {
  LimitEvaluator bumpy = [](double s) {
    auto d = ComplexDyadic::identity();
    return std::pair{d * cplx{1.0 + 0.1 * std::abs(std::sin(5 * std::log(s)))}, d};
  };
  auto s = limit_scan(bumpy, Direction::FarZone, 1.0, 1000.0, 5, 1.0);
  EXPECT_FALSE(s.report.passed);
  EXPECT_EQ(s.report.detail, "non-monotone convergence");
}

TEST(LimitScan, BadRange) {
  LimitEvaluator f = [](double) { return std::pair{ComplexDyadic{}, ComplexDyadic{}}; };
  EXPECT_THROW(limit_scan(f, Direction::NearZone, 1.0, 0.5, 3, 1.0), Error);
}

TEST(Suite, AllChecksPass) {
  auto reports = verification_suite();
  EXPECT_GE(reports.size(), 15u);
  for (const auto &r : reports)
    EXPECT_TRUE(r.passed) << r.name << ": " << r.relative_error << " " << r.detail;
  EXPECT_NE(format_table(reports).find("PASS"), std::string::npos);
}
