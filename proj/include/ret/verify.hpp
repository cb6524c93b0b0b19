#pragma once

// The oracle suite behind the `verify` subcommand.

#include "ret/greens.hpp"
#include "ret/oracles.hpp"
#include "ret/rates.hpp"

#include <random>
#include <sstream>
#include <vector>

namespace ret::oracle {

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

/// Drops the components along the surface normal, leaving the transverse
/// block that the far-zone vacuum form describes.
inline ComplexDyadic transverse(const ComplexDyadic &g) {
  ComplexDyadic t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      t(i, j) = g(i, j);
  return t;
}

} // namespace detail

inline LimitEvaluator halfspace_near_evaluator(const PermittivityModel &m, Frequency w) {
  return [m, w](double s) {
    const double z = s * w.wavelength();
    Vec3 r{0, 0, 0.6 * z}, rp{0, 0, 0.4 * z};
    auto full = halfspace_scatter_full(r, rp, w, m).tensor;
    return std::pair{full, halfspace_scatter_nr_coeff(r, rp, w, limit_reflection(m, w).r_nr)};
  };
}

inline LimitEvaluator halfspace_far_evaluator(const PermittivityModel &m, Frequency w) {
  return [m, w](double s) {
    const double z = s * w.wavelength();
    Vec3 r{0, 0, 0.6 * z}, rp{0, 0, 0.4 * z};
    auto full = halfspace_scatter_full(r, rp, w, m).tensor;
    return std::pair{full, halfspace_scatter_r_coeff(r, rp, w, limit_reflection(m, w).r_r)};
  };
}

inline LimitEvaluator vacuum_near_evaluator(Frequency w) {
  return [w](double y) {
    const double rho = y / w.k();
    Vec3 r{0.3 * rho, 0.0, 0.4 * rho}, rp{0.0, 0.0, 0.0};
    // rho along (0.6, 0, 0.8)
    return std::pair{vacuum_bulk_exact(r, rp, w), vacuum_bulk_nr(r, rp, w)};
  };
}

inline LimitEvaluator vacuum_far_evaluator(Frequency w) {
  return [w](double y) {
    const double rho = y / w.k();
    Vec3 r{0.0, 0.0, rho}, rp{0.0, 0.0, 0.0};
    return std::pair{detail::transverse(vacuum_bulk_exact(r, rp, w)),
                     detail::transverse(vacuum_bulk_r(r, rp, w))};
  };
}

/// Full oracle suite. Runs in a few seconds.
inline std::vector<OracleReport> verification_suite() {
  std::vector<OracleReport> out;
  const Frequency w = Frequency::from_wavelength(500e-9);
  const double lam = w.wavelength();

  // contour identities, vacuum xx at rho = lambda
  {
    const Vec3 r{lam, 0, 0}, rp{0, 0, 0};
    out.push_back(contour_identity_check(env::Vacuum{}, r, rp, w, Identity::Plus));
    out.push_back(contour_identity_check(env::Vacuum{}, r, rp, w, Identity::Minus));
    ContourOptions no_pole;
    no_pole.include_pole = false;
    auto ab = contour_identity_check(env::Vacuum{}, r, rp, w, Identity::Minus, no_pole);
    ab.name = "contour identity (-) pole-term ablation";
    ab.detail = "must fail by O(1)";
    ab.tolerance = 0.1;
    ab.passed = ab.relative_error > ab.tolerance;
    out.push_back(ab);
  }

  // analytic limits of the Sommerfeld tensor
  const std::vector<std::pair<std::string, PermittivityModel>> mats{
      {"eps=2", material::Constant{2.0}},
      {"eps=11.68", material::Constant{11.68}},
      {"eps=inf", material::PerfectReflector{}}};
  for (const auto &[name, m] : mats) {
    auto [f_nr, l_nr] = halfspace_near_evaluator(m, w)(1.0 / 200.0);
    out.push_back(tensor_report("half-space NR limit, " + name, "(z+z')=lambda/200, on axis",
                                l_nr, f_nr, 1e-2));
    auto [f_r, l_r] = halfspace_far_evaluator(m, w)(20.0);
    out.push_back(tensor_report("half-space R limit, " + name, "(z+z')=20 lambda, on axis", l_r,
                                f_r, 2e-2));
  }

  // limit scans
  out.push_back(limit_scan(vacuum_near_evaluator(w), Direction::NearZone, 1e-4, 1e-1, 3, 1e-4,
                           "vacuum bulk near-zone scan")
                    .report);
  out.push_back(limit_scan(vacuum_far_evaluator(w), Direction::FarZone, 10.0, 1e3, 3, 1e-2,
                           "vacuum bulk far-zone scan (transverse)")
                    .report);
  out.push_back(limit_scan(halfspace_near_evaluator(material::Constant{2.0}, w),
                           Direction::NearZone, 1.0 / 20000.0, 1.0 / 20.0, 2, 1e-2,
                           "half-space eps=2 near-zone scan")
                    .report);
  out.push_back(limit_scan(halfspace_far_evaluator(material::Constant{2.0}, w), Direction::FarZone,
                           5.0, 500.0, 2, 2e-2, "half-space eps=2 far-zone scan")
                    .report);

  // mirror image vs Sommerfeld integral with r_s = -1, r_p = 1
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xy(-1.0, 1.0), z(0.05, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Vec3 r{xy(rng) * lam, xy(rng) * lam, z(rng) * lam};
      Vec3 rp{xy(rng) * lam, xy(rng) * lam, z(rng) * lam};
      worst = std::max(worst, relative_error(mirror_scatter_exact(r, rp, w),
                                             halfspace_scatter_full(r, rp, w,
                                                                    material::PerfectReflector{})
                                                 .tensor));
    }
    out.push_back(worst_case_report("mirror image vs Sommerfeld", "20 random off-axis pairs",
                                    worst, 1e-6));
  }

  // independent integrator
  {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xy(-0.25, 0.25), z(0.15, 0.6);
    const std::vector<PermittivityModel> ms{material::Constant{2.0},
                                            material::Constant{cplx{-3.0, 0.7}},
                                            material::Constant{11.68}};
    double worst_ratio = 0.0, worst_rel = 0.0;
    for (int i = 0; i < 9; ++i) {
      Vec3 r{xy(rng) * lam, xy(rng) * lam, z(rng) * lam};
      Vec3 rp{xy(rng) * lam, xy(rng) * lam, z(rng) * lam};
      const auto &m = ms[i % ms.size()];
      auto main = halfspace_scatter_full(r, rp, w, m);
      auto ref = sommerfeld_reference(r, rp, w, m);
      const double diff = (main.tensor - ref.tensor).frobenius();
      worst_ratio = std::max(worst_ratio, diff / (main.error_estimate + ref.error_estimate));
      worst_rel = std::max(worst_rel, relative_error(main.tensor, ref.tensor));
    }
    // pass criterion is the error-bar ratio, not the relative error
    auto rep = worst_case_report("Sommerfeld vs brute-force reference", "9 random geometries",
                                 worst_rel, 1.0,
                                 "worst |diff| / combined error bar = " + detail::fmt(worst_ratio));
    rep.passed = worst_ratio <= 1.0;
    out.push_back(rep);
  }

  // reciprocity
  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> xy(-1.0, 1.0), z(0.05, 1.0);
    double worst = 0.0;
    const std::vector<Environment> envs{env::Vacuum{}, env::PerfectMirror{},
                                        env::HalfSpace{material::Constant{cplx{2.5, 0.3}}}};
    for (const auto &e : envs) {
      for (int i = 0; i < 5; ++i) {
        Vec3 r{xy(rng) * lam, xy(rng) * lam, z(rng) * lam};
        Vec3 rp{xy(rng) * lam, xy(rng) * lam, z(rng) * lam};
        auto ab = green_total(e, {r, rp, w, Part::Total, Method::Exact}).value;
        auto ba = green_total(e, {rp, r, w, Part::Total, Method::Exact}).value;
        worst = std::max(worst, dyadic_reciprocity_defect(ab, ba));
      }
    }
    out.push_back(worst_case_report("reciprocity", "vacuum, mirror, half-space; 15 pairs", worst,
                                    1e-8));
  }

  // rate closed forms
  {
    const double d = phys::debye;
    double worst = 0.0;
    for (double rr : {0.01, 0.05}) {
      const double sep = rr * lam;
      auto res = rate_isotropic(d, d, {{0, 0, 0}, {0, 0, sep}}, std::nullopt, env::Vacuum{}, w,
                                RateMethod::NonRetarded);
      worst = std::max(worst, relative_error(forster_vacuum(sep, w, d, d), res.gamma));
    }
    out.push_back(worst_case_report("Forster limit", "vacuum, R in {0.01, 0.05} lambda", worst,
                                    1e-12));

    double worst_x = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double zd = (0.01 + 0.01 * i) * lam, za = zd + (0.02 + 0.005 * i) * lam;
      worst_x = std::max(worst_x, relative_error(gamma_xx_mirror(zd, za, 1.0, d, d),
                                                 gamma_trans_qd(zd, za, 0.0, d, d)));
    }
    out.push_back(worst_case_report("appendix identity", "10 geometries, r_NR = 1, k -> 0",
                                    worst_x, 1e-12));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_c = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double zd = (0.01 + 0.2 * u(rng)) * lam;
      const double za = zd + (0.01 + 0.2 * u(rng)) * lam;
      const double zm = za + (0.5 + 3.0 * u(rng)) * lam;
      const cplx eps{1.0 + 10.0 * u(rng), u(rng)};
      const PermittivityModel m = material::Constant{eps};
      const cplx alpha = alpha_from_volume(0.2 * u(rng) * lam * lam * lam);
      auto closed = rate_colinear_approx(zd, za, zm, limit_reflection(m, w), alpha, w, d, d);
      auto assembled =
          rate_isotropic(d, d, {{0, 0, zd}, {0, 0, za}},
                         Mediator{{0, 0, zm}, polarizability_model::StaticScalar{alpha.real()}},
                         env::HalfSpace{m}, w, RateMethod::Limits);
      worst_c = std::max(worst_c, relative_error(closed.gamma, assembled.gamma));
    }
    out.push_back(worst_case_report("colinear closed form vs assembled", "100 random geometries",
                                    worst_c, 1e-10));
  }
  return out;
}

inline std::string format_table(const std::vector<OracleReport> &reports) {
  std::ostringstream s;
  char line[512];
  std::snprintf(line, sizeof line, "%-44s %-6s %-11s %-11s %s\n", "check", "result", "rel.err",
                "tolerance", "inputs");
  s << line;
  for (const auto &r : reports) {
    std::snprintf(line, sizeof line, "%-44s %-6s %-11s %-11s %s%s%s\n", r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", detail::fmt(r.relative_error).c_str(),
                  detail::fmt(r.tolerance).c_str(), r.inputs.c_str(),
                  r.detail.empty() ? "" : "; ", r.detail.c_str());
    s << line;
  }
  return s.str();
}

} // namespace ret::oracle
