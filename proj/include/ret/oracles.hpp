#pragma once

// Independent verification machinery: the frequency-integral contour
// identities, a brute-force plane-wave integrator for the half-space tensor,
// and asymptotic-limit scans.

#include "ret/core.hpp"
#include "ret/greens.hpp"
#include "ret/media.hpp"
#include "ret/quadrature.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ret::oracle {

struct OracleReport {
  std::string name;
  std::string inputs;
  double reference = 0.0;
  double test = 0.0;
  double relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

inline OracleReport make_report(std::string name, std::string inputs, double reference,
                                double test, double tolerance, std::string detail = {}) {
  OracleReport r{std::move(name), std::move(inputs), reference, test, 0.0, tolerance, false,
                 std::move(detail)};
  r.relative_error = ret::relative_error(reference, test);
  r.passed = r.relative_error < tolerance;
  return r;
}

inline OracleReport tensor_report(std::string name, std::string inputs, const ComplexDyadic &ref,
                                  const ComplexDyadic &test, double tolerance) {
  OracleReport r{std::move(name), std::move(inputs), ref.frobenius(), test.frobenius(), 0.0,
                 tolerance, false, {}};
  r.relative_error = ret::relative_error(ref, test);
  r.passed = r.relative_error < tolerance;
  return r;
}

/// For aggregate checks: `worst` is the largest relative deviation found.
inline OracleReport worst_case_report(std::string name, std::string inputs, double worst,
                                      double tolerance, std::string detail = {}) {
  return {std::move(name), std::move(inputs), 0.0, worst, worst, tolerance, worst < tolerance,
          std::move(detail)};
}

//==============================================================================
// contour identities
//==============================================================================

enum class Identity { Plus, Minus };

struct ContourOptions {
  int row = 0, col = 0;                   // tensor component
  double omega_max = 50.0;                // real-axis cutoff in units of w_D
  std::vector<double> eps_fractions{1e-3, 1e-4}; // regularization, units of w_D
  bool include_pole = true;               // Minus identity only
  double tolerance = 1e-3;
  double rel_tol = 1e-11;                 // quadrature
};

struct ContourValues {
  cplx real_axis;      // eps -> 0 extrapolated real-frequency side
  cplx imaginary_axis; // xi integral plus (optionally) the pole term
  std::vector<cplx> at_eps;
};

namespace detail {

inline std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// w^2 G_ij(w) of the vacuum bulk tensor, continued to complex w. Entire.
struct VacuumComponent {
  Vec3 e;
  double rho;
  int i, j;

  cplx h(cplx w) const {
    const cplx y = w * rho / phys::c;
    const double delta = i == j ? 1.0 : 0.0;
    const cplx a = 1.0 - I * y - y * y;
    const cplx b = 3.0 - 3.0 * I * y - y * y;
    return -phys::c * phys::c * std::exp(I * y) / (4.0 * pi * rho * rho * rho) *
           (a * delta - b * e[i] * e[j]);
  }
  /// xi^2 G(i xi) = -h(i xi), real
  double xi2_g_imag(double xi) const { return -h(cplx{0.0, xi}).real(); }
};

} // namespace detail

/// Evaluates both sides of
///   lim int_0^inf dw w^2 Im G(w) / (w_D +- w + i eps)
///     = -int_0^inf dxi G(i xi) xi^2 w_D / (w_D^2 + xi^2)  [- pi w_D^2 G(w_D)]
/// for one component of the vacuum tensor. The real-axis integral is cut at
/// omega_max; the remainder is integrated along vertical rays from the cutoff,
/// on which the e^{+-i w rho / c} halves of Im G decay.
inline ContourValues contour_identity_values(Vec3 r, Vec3 rp, Frequency wd, Identity which,
                                             const ContourOptions &opt = {}) {
  auto [e, rho] = ret::detail::separation(r, rp);
  const detail::VacuumComponent g{e, rho, opt.row, opt.col};
  const double w_d = wd.omega();
  const double sign = which == Identity::Plus ? 1.0 : -1.0;
  const double big = opt.omega_max * w_d;

  // imaginary-frequency side
  const double xi_decay = phys::c / rho; // e^{-xi rho / c}
  std::vector<std::pair<double, double>> xi_breaks;
  {
    double a = 0.0;
    for (double b : {0.1 * w_d, w_d, 10.0 * w_d}) {
      if (b > a && b < 80.0 * xi_decay)
        xi_breaks.emplace_back(a, b), a = b;
    }
    for (int n = 1; n <= 80; n *= 2) {
      double b = std::max(a, n * xi_decay);
      if (b > a)
        xi_breaks.emplace_back(a, b), a = b;
    }
  }
  auto xi_side = quad::integrate_scalar(
      xi_breaks,
      [&](double xi) -> cplx { return g.xi2_g_imag(xi) * w_d / (w_d * w_d + xi * xi); },
      opt.rel_tol);
  ContourValues out;
  out.imaginary_axis = -xi_side.value[0];
  if (which == Identity::Minus && opt.include_pole)
    out.imaginary_axis -= pi * g.h(w_d); // pi w_D^2 G(w_D) = pi h(w_D)

  auto real_side = [&](double eps) {
    auto den = [&](cplx w) { return w_d + sign * w + I * eps; };
    std::vector<std::pair<double, double>> br;
    std::vector<double> pts{0.0};
    if (which == Identity::Minus) {
      for (double m : {-1000.0, -100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0, 1000.0}) {
        double p = w_d + m * eps;
        if (p > pts.back() && p < big)
          pts.push_back(p);
      }
    }
    // one panel per half period of the e^{i w rho / c} oscillation
    const double half_period = pi * phys::c / rho;
    for (double p = half_period; p < big; p += half_period)
      pts.push_back(p);
    pts.push_back(big);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      if (pts[i + 1] > pts[i])
        br.emplace_back(pts[i], pts[i + 1]);

    auto body = quad::integrate_scalar(
        br, [&](double w) -> cplx { return g.h(w).imag() / den(w); }, opt.rel_tol,
        1e-14 * std::abs(out.imaginary_axis));

    // tail: Im h = (h(w) - h(-w)) / 2i on the real axis; h(w) decays upward,
    // h(-w) downward
    std::vector<std::pair<double, double>> sb;
    {
      double a = 0.0;
      for (int n = 1; n <= 80; n *= 2)
        sb.emplace_back(a, n * xi_decay), a = n * xi_decay;
    }
    auto up = quad::integrate_scalar(
        sb, [&](double s) { cplx w{big, s}; return I * g.h(w) / den(w); }, opt.rel_tol,
        1e-14 * std::abs(out.imaginary_axis));
    auto down = quad::integrate_scalar(
        sb, [&](double s) { cplx w{big, -s}; return -I * g.h(-w) / den(w); }, opt.rel_tol,
        1e-14 * std::abs(out.imaginary_axis));
    return body.value[0] + (up.value[0] - down.value[0]) / (2.0 * I);
  };

  std::vector<double> eps;
  for (double f : opt.eps_fractions)
    eps.push_back(f * w_d);
  for (double ep : eps)
    out.at_eps.push_back(real_side(ep));

  if (eps.size() >= 2) {
    // linear Richardson extrapolation to eps -> 0 from the two smallest values
    const std::size_t n = eps.size();
    const double e1 = eps[n - 2], e2 = eps[n - 1];
    const cplx l1 = out.at_eps[n - 2], l2 = out.at_eps[n - 1];
    out.real_axis = (e1 * l2 - e2 * l1) / (e1 - e2);
  } else {
    out.real_axis = out.at_eps.back();
  }
  return out;
}

/// Vacuum only: the imaginary-axis side needs G(i xi) in closed form.
inline OracleReport contour_identity_check(const Environment &environment, Vec3 r, Vec3 rp,
                                           Frequency wd, Identity which,
                                           const ContourOptions &opt = {}) {
  if (!std::holds_alternative<env::Vacuum>(environment))
    throw Error(ErrorKind::Geometry, "contour identity check is implemented for vacuum only");
  auto v = contour_identity_values(r, rp, wd, which, opt);
  OracleReport rep;
  rep.name = which == Identity::Plus ? "contour identity (+)" : "contour identity (-)";
  if (which == Identity::Minus && !opt.include_pole)
    rep.name += " without pole term";
  rep.inputs = "vacuum G_" + std::to_string(opt.row) + std::to_string(opt.col) +
               ", rho = " + detail::short_num(distance(r, rp)) + " m, cutoff " +
               detail::short_num(opt.omega_max) + " w_D";
  rep.reference = std::abs(v.imaginary_axis);
  rep.test = std::abs(v.real_axis);
  rep.relative_error = ret::relative_error(v.imaginary_axis, v.real_axis);
  rep.tolerance = opt.tolerance;
  rep.passed = rep.relative_error < opt.tolerance;
  return rep;
}

//==============================================================================
// brute-force plane-wave integrator
//==============================================================================

struct ReferenceOptions {
  /// Simpson nodes per unit of accumulated phase along each radial segment.
  double nodes_per_radian = 10.0;
  int min_nodes = 256;
  double decay_cutoff = 40.0;
};

struct ReferenceResult {
  ComplexDyadic tensor;
  double error_estimate = 0.0; // |fine - coarse| in Frobenius norm
  long evaluations = 0;
};

/// Angular-spectrum integral of the reflected field evaluated on a fixed
/// tensor-product grid: composite Simpson in k_par (same sin / cosh contour as
/// the main evaluator), trapezoid in the azimuth, with the polarization dyads
/// built explicitly instead of through Bessel kernels. No adaptivity and no
/// static-image subtraction. The error estimate compares against the same sum
/// on every second node in both directions.
inline ReferenceResult sommerfeld_reference(Vec3 r, Vec3 rp, Frequency w,
                                            const PermittivityModel &material,
                                            const ReferenceOptions &opt = {}) {
  ret::detail::require_above(r, "observation point");
  ret::detail::require_above(rp, "source point");
  const double k = w.k();
  const double zs = r.z + rp.z;
  const double lx = r.x - rp.x, ly = r.y - rp.y;
  const double lat = std::hypot(lx, ly);

  cplx eps{1.0, 0.0};
  const bool perfect = is_perfect_reflector(material);
  if (!perfect) {
    eps = permittivity(material, w);
    if (std::abs(eps - 1.0) < 1e-15)
      return {};
    if (eps.imag() == 0.0)
      eps += cplx{0.0, 1e-12};
  }
  auto coeffs = [&](double q) -> FresnelPair {
    return perfect ? FresnelPair{-1.0, 1.0} : fresnel(eps, q, w);
  };

  const double t_max = std::asinh(opt.decay_cutoff / (k * zs));
  const double q_max = k * std::cosh(t_max);

  // azimuth: trapezoid converges geometrically once M exceeds q |L|
  int m_beta = 2 * static_cast<int>(std::ceil(0.5 * (q_max * lat + 32.0)));
  m_beta = std::max(m_beta, 16);
  m_beta += m_beta % 2;

  std::vector<double> cb(m_beta), sb(m_beta);
  for (int j = 0; j < m_beta; ++j) {
    const double beta = 2.0 * pi * j / m_beta;
    cb[j] = std::cos(beta);
    sb[j] = std::sin(beta);
  }

  ComplexDyadic fine, coarse;
  long evals = 0;

  // one radial node: q, kz, weight (q dq / kz per unit variable), Simpson
  // weights on the fine and coarse grids
  auto radial_node = [&](double q, cplx kz, cplx weight, double wf, double wc) {
    const auto [r_s, r_p] = coeffs(q);
    const cplx common = weight * std::exp(I * kz * zs);
    ComplexDyadic acc_f, acc_c;
    for (int j = 0; j < m_beta; ++j) {
      const double c = cb[j], s = sb[j];
      const cplx ph = common * std::exp(I * (q * (lx * c + ly * s)));
      const double sv[3] = {s, -c, 0.0};
      const cplx ep[3] = {-kz * c / k, -kz * s / k, q / k}; // e_p+
      const cplx em[3] = {kz * c / k, kz * s / k, q / k};   // e_p-
      ComplexDyadic local;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          local(a, b) = ph * (r_s * sv[a] * sv[b] + r_p * ep[a] * em[b]);
      acc_f += local;
      if (j % 2 == 0)
        acc_c += local;
    }
    evals += m_beta;
    fine += (wf * (2.0 * pi / m_beta)) * acc_f;
    if (wc != 0.0)
      coarse += (wc * (2.0 * pi / (m_beta / 2))) * acc_c;
  };

  auto simpson = [&](double a, double b, double phase_span, auto &&node) {
    int n = static_cast<int>(std::ceil(opt.nodes_per_radian * phase_span));
    n = std::max(n, opt.min_nodes);
    n += (4 - n % 4) % 4; // fine and half-grid both need an even count
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
      const double wf = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      double wc = 0.0;
      if (i % 2 == 0) {
        const int ic = i / 2, nc = n / 2;
        wc = (ic == 0 || ic == nc) ? 1.0 : (ic % 2 ? 4.0 : 2.0);
      }
      node(a + i * h, wf * h / 3.0, wc * 2.0 * h / 3.0);
    }
  };

  // propagating
  simpson(0.0, pi / 2, k * zs + k * lat + 8.0, [&](double th, double wf, double wc) {
    const double q = k * std::sin(th);
    radial_node(q, cplx{k * std::cos(th), 0.0}, k * std::sin(th), wf, wc);
  });
  // evanescent; split at the material branch point k_par = k sqrt(Re eps) and
  // grade the nodes quadratically toward it so the square-root kink is smooth
  // in the integration variable
  auto evanescent = [&](double t, double dt_du, double wf, double wc) {
    const double q = k * std::cosh(t);
    radial_node(q, cplx{0.0, k * std::sinh(t)}, -I * k * std::cosh(t) * dt_du, wf, wc);
  };
  const double phase = (q_max - k) * lat + opt.decay_cutoff + 8.0 * t_max;
  const double t_b = (!perfect && eps.real() > 1.0) ? std::acosh(std::sqrt(eps.real())) : 0.0;
  if (t_b > 0.0 && t_b < t_max) {
    const double span_l = t_b, span_r = t_max - t_b;
    simpson(0.0, 1.0, phase * span_l / t_max + 8.0, [&](double u, double wf, double wc) {
      const double v = 1.0 - u; // t = t_b (1 - v^2)
      evanescent(t_b * (1.0 - v * v), 2.0 * t_b * v, wf, wc);
    });
    simpson(0.0, 1.0, phase * span_r / t_max + 8.0, [&](double u, double wf, double wc) {
      evanescent(t_b + span_r * u * u, 2.0 * span_r * u, wf, wc);
    });
  } else {
    simpson(0.0, t_max, phase, [&](double t, double wf, double wc) { evanescent(t, 1.0, wf, wc); });
  }

  const cplx pref = I / (8.0 * pi * pi);
  ReferenceResult out;
  out.tensor = pref * fine;
  out.error_estimate = (pref * (fine - coarse)).frobenius();
  out.evaluations = evals;
  return out;
}

//==============================================================================
// limit scans
//==============================================================================

enum class Direction { NearZone, FarZone };

struct ScanSample {
  double scale;
  double error;
};

struct ScanResult {
  OracleReport report;
  std::vector<ScanSample> samples;
};

/// Evaluator returns (full value, analytic limit) at a given scale.
using LimitEvaluator = std::function<std::pair<ComplexDyadic, ComplexDyadic>(double)>;

/// Relative deviation from the analytic limit on a log-spaced grid from
/// `from` to `to`. Passes when the deviation shrinks monotonically as the
/// scale moves toward the limit (small scales for NearZone, large for FarZone)
/// and the deviation at the scale closest to the limit is below tolerance.
inline ScanResult limit_scan(const LimitEvaluator &evaluator, Direction direction, double from,
                             double to, int points_per_decade, double tolerance,
                             std::string name = "limit scan") {
  if (!(from > 0.0 && to > from) || points_per_decade < 1)
    throw Error(ErrorKind::Geometry, "limit scan needs 0 < from < to");
  const double decades = std::log10(to / from);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
  ScanResult out;
  for (int i = 0; i < n; ++i) {
    const double s = from * std::pow(10.0, decades * i / (n - 1));
    auto [full, limit] = evaluator(s);
    out.samples.push_back({s, ret::relative_error(full, limit)});
  }

  // order samples from far-from-limit to at-limit
  std::vector<ScanSample> toward = out.samples;
  if (direction == Direction::NearZone)
    std::reverse(toward.begin(), toward.end());
  bool monotone = true;
  for (std::size_t i = 1; i < toward.size(); ++i)
    if (toward[i].error > toward[i - 1].error * (1.0 + 1e-9) + 1e-300)
      monotone = false;

  auto &rep = out.report;
  rep.name = std::move(name);
  rep.inputs = std::string(direction == Direction::NearZone ? "near zone" : "far zone") +
               " scan over [" + detail::short_num(from) + ", " + detail::short_num(to) + "]";
  rep.reference = 0.0;
  rep.test = toward.back().error;
  rep.relative_error = toward.back().error;
  rep.tolerance = tolerance;
  rep.passed = monotone && toward.back().error < tolerance;
  rep.detail = monotone ? "monotone" : "non-monotone convergence";
  return out;
}

} // namespace ret::oracle
