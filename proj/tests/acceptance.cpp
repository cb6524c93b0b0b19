// Acceptance checks. One PASS/FAIL line per criterion; nonzero exit on failure.

#include "ret/oracles.hpp"
#include "ret/sweep.hpp"
#include "ret/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace ret;
using namespace ret::oracle;

namespace {

const Frequency w = Frequency::from_wavelength(500e-9);
const double lam = w.wavelength();
const double d = phys::debye;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Outcome forster() {
  double worst = 0.0;
  for (double rr : {0.01, 0.05}) {
    const double sep = rr * lam;
    auto res = rate_isotropic(d, d, {{0, 0, 0}, {0, 0, sep}}, std::nullopt, env::Vacuum{}, w,
                              RateMethod::NonRetarded);
    worst = std::max(worst, relative_error(forster_vacuum(sep, w, d, d), res.gamma));
  }
  return {worst <= 1e-12, "max rel err " + num(worst) + " (tol 1e-12)"};
}

Outcome appendix() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double zd = (0.01 + 0.02 * i) * lam, za = zd + (0.01 + 0.03 * i) * lam;
    worst = std::max(worst, relative_error(gamma_xx_mirror(zd, za, 1.0, d, d),
                                           gamma_trans_qd(zd, za, 0.0, d, d)));
  }
  return {worst <= 1e-12, "max rel err " + num(worst) + " over 10 geometries (tol 1e-12)"};
}

Outcome closed_form() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double zd = (0.005 + 0.3 * u(rng)) * lam;
    const double za = zd + (0.005 + 0.3 * u(rng)) * lam;
    const double zm = za + (0.05 + 3.0 * u(rng)) * lam;
    const PermittivityModel m =
        i % 4 == 0 ? PermittivityModel{material::PerfectReflector{}}
                   : PermittivityModel{material::Constant{cplx{-5.0 + 20.0 * u(rng), 2.0 * u(rng)}}};
    if (const auto *c = std::get_if<material::Constant>(&m); c && std::abs(c->eps + 1.0) < 0.2)
      continue;
    const cplx alpha = alpha_from_volume(0.3 * u(rng) * lam * lam * lam);
    auto closed = rate_colinear_approx(zd, za, zm, limit_reflection(m, w), alpha, w, d, d);
    auto assembled =
        rate_isotropic(d, d, {{0, 0, zd}, {0, 0, za}},
                       Mediator{{0, 0, zm}, polarizability_model::StaticScalar{alpha.real()}},
                       env::HalfSpace{m}, w, RateMethod::Limits);
    worst = std::max(worst, relative_error(closed.gamma, assembled.gamma));
  }
  return {worst <= 1e-10, "max rel err " + num(worst) + " over 100 geometries (tol 1e-10)"};
}

Outcome limits() {
  const std::vector<std::pair<std::string, PermittivityModel>> mats{
      {"eps=2", material::Constant{2.0}},
      {"eps=11.68", material::Constant{11.68}},
      {"eps=inf", material::PerfectReflector{}}};
  bool ok = true;
  std::ostringstream s;
  for (const auto &[name, m] : mats) {
    auto [f_nr, l_nr] = halfspace_near_evaluator(m, w)(1.0 / 200.0);
    auto [f_r, l_r] = halfspace_far_evaluator(m, w)(20.0);
    const double e_nr = relative_error(l_nr, f_nr), e_r = relative_error(l_r, f_r);
    auto near = limit_scan(halfspace_near_evaluator(m, w), Direction::NearZone, 1.0 / 20000.0,
                           1.0 / 20.0, 3, 1e-2);
    auto far = limit_scan(halfspace_far_evaluator(m, w), Direction::FarZone, 2.0, 2000.0, 3, 2e-2);
    const bool mono = near.report.detail == "monotone" && far.report.detail == "monotone";
    ok = ok && e_nr <= 1e-2 && e_r <= 2e-2 && mono;
    s << name << ": NR " << num(e_nr) << ", R " << num(e_r) << (mono ? ", monotone; " : ", NON-MONOTONE; ");
  }
  return {ok, s.str() + "tol 1e-2 / 2e-2"};
}

Outcome mirror_grid() {
  const Vec3 rp{0.13 * lam, -0.07 * lam, 0.31 * lam};
  double worst = 0.0;
  int n = 0;
  for (int ix = 0; ix < 5; ++ix)
    for (int iy = 0; iy < 5; ++iy)
      for (int iz = 0; iz < 5; ++iz) {
        const Vec3 r{(-0.8 + 0.4 * ix) * lam, (-0.75 + 0.4 * iy) * lam, (0.05 + 0.25 * iz) * lam};
        auto som = halfspace_scatter_full(r, rp, w, material::PerfectReflector{});
        worst = std::max(worst, relative_error(mirror_scatter_exact(r, rp, w), som.tensor));
        ++n;
      }
  return {worst <= 1e-6, "max rel err " + num(worst) + " over " + std::to_string(n) +
                             " pairs (tol 1e-6)"};
}

SimulationConfig colinear_setup(const std::string &environment) {
  return parse_config(R"({"lambda_nm": 500, "environment": ")" + environment + R"(",
    "donor": {"z": 0.04}, "acceptor": {"z": 0.08}, "mediator": {"polarizability_volume": 0.1}})");
}

Outcome colinear_sweep() {
  const OneD range{1.2, 3.0, 400};
  const auto vac = sweep_1d(colinear_setup("vacuum"), range, "both", 0);
  const auto mir = sweep_1d(colinear_setup("mirror"), range, "both", 0);
  const std::size_t n = 400;
  auto exact = [&](const std::vector<RateRecord> &rows, std::size_t i) {
    return rows[n + i].gamma_normalized;
  };

  // (a) crossings of 1 and a shrinking envelope from the first to the last third
  int crossings = 0;
  double first = 0.0, last = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = exact(vac, i) - 1.0;
    mean += dev / n;
    if (i > 0 && (exact(vac, i - 1) - 1.0) * dev < 0.0)
      ++crossings;
    if (i < n / 3)
      first = std::max(first, std::abs(dev));
    if (i >= n - n / 3)
      last = std::max(last, std::abs(dev));
  }
  const bool a = crossings >= 2 && last < first && std::abs(mean) < 0.25 * first;

  // (b)
  double dv = 0.0, dm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dv = std::max(dv, std::abs(exact(vac, i) - 1.0));
    dm = std::max(dm, std::abs(exact(mir, i) - 1.0));
  }
  const bool b = dm < dv;

  // (c)
  double worst = 0.0;
  bool errors = false;
  for (const auto *rows : {&vac, &mir})
    for (std::size_t i = 0; i < n; ++i) {
      const auto &lim = (*rows)[i];
      const auto &ex = (*rows)[n + i];
      errors = errors || lim.flag.rfind("error", 0) == 0 || ex.flag.rfind("error", 0) == 0;
      if (ex.z_m >= 1.5)
        worst = std::max(worst, std::abs(lim.gamma_normalized / ex.gamma_normalized - 1.0));
    }
  const bool c = worst <= 0.05 && !errors;

  std::ostringstream s;
  s << "(a) " << (a ? "ok" : "FAIL") << " crossings=" << crossings << " envelope " << num(first)
    << " -> " << num(last) << " mean dev " << num(mean) << "; (b) " << (b ? "ok" : "FAIL")
    << " max dev mirror " << num(dm) << " < vacuum " << num(dv) << "; (c) " << (c ? "ok" : "FAIL")
    << " max limits/exact dev " << num(worst) << " (tol 5e-2)";
  return {a && b && c, s.str()};
}

Outcome mediator_map() {
  auto c = parse_config(R"({"lambda_nm": 500, "environment": "mirror",
    "donor": {"x": -1, "z": 1}, "acceptor": {"x": 1, "z": 2},
    "mediator": {"polarizability_volume": 0.1}})");
  const auto rows = sweep_2d(c, {-3.0, 3.0, 0.1, 4.0, 60, 60, 0.15}, 0);
  int above = 0, below = 0, clipped = 0, failed = 0;
  double hi = 0.0, lo = INFINITY;
  for (const auto &r : rows) {
    if (r.flag == flags::clipped) {
      ++clipped;
      continue;
    }
    if (r.flag != flags::ok) {
      ++failed;
      continue;
    }
    above += r.gamma_normalized > 1.05;
    below += r.gamma_normalized < 0.95;
    hi = std::max(hi, r.gamma_normalized);
    lo = std::min(lo, r.gamma_normalized);
  }
  std::ostringstream s;
  s << rows.size() << " cells, " << above << " > 1.05, " << below << " < 0.95, range [" << num(lo)
    << ", " << num(hi) << "], " << clipped << " clipped, " << failed << " failed";
  return {above > 0 && below > 0 && failed == 0, s.str()};
}

Outcome contour() {
  const Vec3 r{lam, 0, 0}, rp{0, 0, 0};
  auto plus = contour_identity_check(env::Vacuum{}, r, rp, w, Identity::Plus);
  auto minus = contour_identity_check(env::Vacuum{}, r, rp, w, Identity::Minus);
  ContourOptions no_pole;
  no_pole.include_pole = false;
  auto ablation = contour_identity_check(env::Vacuum{}, r, rp, w, Identity::Minus, no_pole);
  const bool ok = plus.relative_error <= 1e-3 && minus.relative_error <= 1e-3 &&
                  ablation.relative_error > 0.1;
  return {ok, "(+) " + num(plus.relative_error) + ", (-) " + num(minus.relative_error) +
                  " (tol 1e-3); without pole term " + num(ablation.relative_error)};
}

Outcome invariants() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pos = [&](double zmin) {
    return Vec3{(u(rng) - 0.5) * 2.0 * lam, (u(rng) - 0.5) * 2.0 * lam, (zmin + u(rng)) * lam};
  };
  const std::vector<Environment> envs{
      env::Vacuum{}, env::PerfectMirror{}, env::HalfSpace{material::Constant{cplx{2.5, 0.3}}},
      env::HalfSpace{material::Constant{11.68}},
      env::HalfSpace{material::DrudeLorentz{1.2e16, 0.0, 1e14}}};

  double recip = 0.0;
  for (const auto &e : envs)
    for (int i = 0; i < 10; ++i) {
      const Vec3 a = pos(0.02), b = pos(0.02);
      auto ab = green_total(e, {a, b, w, Part::Total, Method::Exact}).value;
      auto ba = green_total(e, {b, a, w, Part::Total, Method::Exact}).value;
      recip = std::max(recip, dyadic_reciprocity_defect(ab, ba));
    }

  int negative = 0;
  double scale_dev = 0.0, exchange = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto &e = envs[i % envs.size()];
    const Vec3 rd = pos(0.02), ra = pos(0.02), rm = pos(0.05);
    const Mediator med{rm, polarizability_model::StaticScalar{alpha_from_volume(0.2 * u(rng) * lam * lam * lam)}};
    if (i % 2 == 0) {
      CVec3 md{cplx{u(rng) - 0.5, u(rng) - 0.5}, cplx{u(rng) - 0.5, 0.0}, cplx{u(rng) - 0.5, 0.1}};
      CVec3 ma{cplx{u(rng) - 0.5, 0.0}, cplx{u(rng) - 0.5, u(rng) - 0.5}, cplx{u(rng) - 0.5, 0.0}};
      auto r1 = rate_oriented({rd, d * md, Role::Donor}, {ra, d * ma, Role::Acceptor}, med, e, w);
      auto r3 = rate_oriented({rd, 3.0 * d * md, Role::Donor}, {ra, 0.5 * d * ma, Role::Acceptor},
                              med, e, w);
      negative += !(r1.gamma >= 0.0) || !(r1.gamma0 >= 0.0);
      scale_dev = std::max(scale_dev, relative_error(r1.gamma_normalized, r3.gamma_normalized));
    } else {
      auto r1 = rate_isotropic(d, 2.0 * d, {rd, ra}, med, e, w);
      auto r3 = rate_isotropic(4.0 * d, 0.7 * d, {rd, ra}, med, e, w);
      auto sw = rate_isotropic(2.0 * d, d, {ra, rd}, med, e, w);
      negative += !(r1.gamma >= 0.0) || !(r1.gamma0 >= 0.0);
      scale_dev = std::max(scale_dev, relative_error(r1.gamma_normalized, r3.gamma_normalized));
      exchange = std::max(exchange, relative_error(r1.gamma, sw.gamma));
    }
  }

  auto c = parse_config(R"({"lambda_nm": 500,
    "environment": {"type": "halfspace", "permittivity": {"re": 2.5, "im": 0.2}},
    "donor": {"z": 0.04}, "acceptor": {"z": 0.08}, "mediator": {"polarizability_volume": 0.1}})");
  const std::string one = to_csv(sweep_1d(c, {1.2, 3.0, 20}, "both", 1));
  const bool identical = one == to_csv(sweep_1d(c, {1.2, 3.0, 20}, "both", 4)) &&
                         one == to_csv(sweep_1d(c, {1.2, 3.0, 20}, "both", 7));

  const bool ok = recip < 1e-8 && negative == 0 && scale_dev <= 1e-10 && exchange <= 1e-10 &&
                  identical;
  std::ostringstream s;
  s << "reciprocity " << num(recip) << " (tol 1e-8); negative rates " << negative
    << "/1000; dipole scaling " << num(scale_dev) << "; exchange " << num(exchange)
    << " (tol 1e-10); csv " << (identical ? "identical" : "DIFFERS") << " for 1/4/7 workers";
  return {ok, s.str()};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Forster limit", forster},
      {"appendix xx identity", appendix},
      {"colinear closed form vs assembled pipeline", closed_form},
      {"half-space limit convergence", limits},
      {"mirror image vs Sommerfeld, 5x5x5 grid", mirror_grid},
      {"colinear mediator sweep properties", colinear_sweep},
      {"mediator map enhancement and suppression", mediator_map},
      {"frequency-integral contour identities", contour},
      {"invariant suite", invariants}};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.passed;
    std::printf("%s %zu %s: %s [%.2f s]\n", o.passed ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
