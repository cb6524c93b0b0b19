#pragma once

// Resonance energy transfer rates: matrix elements, the oriented three-body
// rate, isotropic averaging, the closed-form colinear rate and the two-body
// reference formulas.

#include "ret/core.hpp"
#include "ret/greens.hpp"
#include "ret/media.hpp"

#include <optional>

namespace ret {

enum class Role { Donor, Acceptor };

struct Dipole {
  Vec3 position;
  CVec3 moment; // C m
  Role role = Role::Donor;
};

struct Mediator {
  Vec3 position;
  PolarizabilityModel polarizability;
};

struct RateResult {
  double gamma = 0.0;            // 1/s
  double gamma_normalized = 0.0; // gamma / gamma0
  double gamma0 = 0.0;           // mediator-free rate, same method
  cplx matrix_element_direct{};  // J
  cplx matrix_element_indirect{};
  double error_estimate = 0.0; // relative
};

/// Which Green's tensors feed the rate. Limits uses the non-retarded tensor for
/// the donor-acceptor leg and the retarded one for both mediator legs.
enum class RateMethod { Exact, Limits, NonRetarded, Retarded };

inline const char *to_string(RateMethod m) {
  switch (m) {
  case RateMethod::Exact: return "exact";
  case RateMethod::Limits: return "limits";
  case RateMethod::NonRetarded: return "nonretarded";
  case RateMethod::Retarded: return "retarded";
  }
  return "?";
}

/// Pairwise distances below this many donor wavelengths are rejected.
inline constexpr double min_separation_wavelengths = 1e-4;

namespace detail {

struct LegMethods {
  Method direct;
  Method mediated;
};

inline LegMethods leg_methods(RateMethod m) {
  switch (m) {
  case RateMethod::Limits: return {Method::NonRetardedLimit, Method::RetardedLimit};
  case RateMethod::NonRetarded: return {Method::NonRetardedLimit, Method::NonRetardedLimit};
  case RateMethod::Retarded: return {Method::RetardedLimit, Method::RetardedLimit};
  default: return {Method::Exact, Method::Exact};
  }
}

inline void check_pair(Vec3 a, Vec3 b, Frequency w, const char *what) {
  if (!a.finite() || !b.finite())
    throw Error(ErrorKind::Geometry, std::string("non-finite position for ") + what);
  if (distance(a, b) < min_separation_wavelengths * w.wavelength())
    throw Error(ErrorKind::Geometry, std::string(what) + " closer than 1e-4 wavelengths");
}

inline void check_body(const Environment &e, Vec3 r, const char *what) {
  if (has_surface(e) && !(r.z > 0.0))
    throw Error(ErrorKind::Geometry, std::string(what) + " must lie above the surface (z > 0)");
}

inline Evaluated green(const Environment &e, Vec3 r, Vec3 rp, Frequency w, Method m,
                       const EvalOptions &opt) {
  return green_total(e, GreensRequest{r, rp, w, Part::Total, m}, opt);
}

inline double relative(const Evaluated &g) {
  const double n = g.value.frobenius();
  return n > 0.0 ? g.error_estimate / n : 0.0;
}

/// 2 pi mu0^2 w^4 / hbar
inline double golden_rule_prefactor(Frequency w) {
  const double w2 = w.omega() * w.omega();
  return 2.0 * pi * phys::mu0 * phys::mu0 * w2 * w2 / phys::hbar;
}

} // namespace detail

//==============================================================================
// matrix elements
//==============================================================================

/// mu0 w^2 d_A^* . G(r_A, r_D) . d_D
inline cplx matrix_element_direct(const Dipole &donor, const Dipole &acceptor,
                                  const Environment &e, Frequency w,
                                  RateMethod method = RateMethod::Exact,
                                  const EvalOptions &opt = {}) {
  detail::check_pair(donor.position, acceptor.position, w, "donor and acceptor");
  auto g = detail::green(e, acceptor.position, donor.position, w,
                         detail::leg_methods(method).direct, opt);
  const double w2 = w.omega() * w.omega();
  return phys::mu0 * w2 * dot(acceptor.moment.conj(), g.value * donor.moment);
}

/// mu0^2 w^4 alpha d_A^* . G(r_A, r_M) . G(r_M, r_D) . d_D, with the sign that
/// makes M_dir + M_indir reproduce the G + mu0 w^2 alpha G G coupling.
inline cplx matrix_element_indirect(const Dipole &donor, const Dipole &acceptor,
                                    const Mediator &mediator, const Environment &e, Frequency w,
                                    RateMethod method = RateMethod::Exact,
                                    const EvalOptions &opt = {}) {
  detail::check_pair(donor.position, mediator.position, w, "donor and mediator");
  detail::check_pair(acceptor.position, mediator.position, w, "acceptor and mediator");
  const cplx alpha = polarizability(mediator.polarizability, w.k());
  if (alpha == 0.0)
    return 0.0;
  const Method m = detail::leg_methods(method).mediated;
  auto g_am = detail::green(e, acceptor.position, mediator.position, w, m, opt);
  auto g_md = detail::green(e, mediator.position, donor.position, w, m, opt);
  const double w2 = w.omega() * w.omega();
  const CVec3 field = g_am.value * (g_md.value * donor.moment);
  return phys::mu0 * phys::mu0 * w2 * w2 * alpha * dot(acceptor.moment.conj(), field);
}

//==============================================================================
// oriented rate
//==============================================================================

/// Gamma = (2 pi / hbar) |M_dir + M_indir|^2. Without a mediator this is the
/// two-body rate. gamma_normalized divides by the mediator-free rate from the
/// same method.
inline RateResult rate_oriented(const Dipole &donor, const Dipole &acceptor,
                                const std::optional<Mediator> &mediator, const Environment &e,
                                Frequency w, RateMethod method = RateMethod::Exact,
                                const EvalOptions &opt = {}) {
  if (!(donor.moment.norm() > 0.0) || !(acceptor.moment.norm() > 0.0))
    throw Error(ErrorKind::Geometry, "dipole moments must be non-zero");
  detail::check_body(e, donor.position, "donor");
  detail::check_body(e, acceptor.position, "acceptor");
  detail::check_pair(donor.position, acceptor.position, w, "donor and acceptor");

  const auto legs = detail::leg_methods(method);
  const double w2 = w.omega() * w.omega();
  auto g_ad = detail::green(e, acceptor.position, donor.position, w, legs.direct, opt);

  RateResult out;
  out.matrix_element_direct =
      phys::mu0 * w2 * dot(acceptor.moment.conj(), g_ad.value * donor.moment);
  double rel = detail::relative(g_ad);

  if (mediator) {
    detail::check_body(e, mediator->position, "mediator");
    detail::check_pair(donor.position, mediator->position, w, "donor and mediator");
    detail::check_pair(acceptor.position, mediator->position, w, "acceptor and mediator");
    const cplx alpha = polarizability(mediator->polarizability, w.k());
    if (alpha != 0.0) {
      auto g_am = detail::green(e, acceptor.position, mediator->position, w, legs.mediated, opt);
      auto g_md = detail::green(e, mediator->position, donor.position, w, legs.mediated, opt);
      const CVec3 field = g_am.value * (g_md.value * donor.moment);
      out.matrix_element_indirect =
          phys::mu0 * phys::mu0 * w2 * w2 * alpha * dot(acceptor.moment.conj(), field);
      rel += detail::relative(g_am) + detail::relative(g_md);
    }
  }

  const double two_pi_over_hbar = 2.0 * pi / phys::hbar;
  out.gamma = two_pi_over_hbar * std::norm(out.matrix_element_direct + out.matrix_element_indirect);
  out.gamma0 = two_pi_over_hbar * std::norm(out.matrix_element_direct);
  out.gamma_normalized = out.gamma0 > 0.0 ? out.gamma / out.gamma0
                                          : std::numeric_limits<double>::quiet_NaN();
  out.error_estimate = 2.0 * rel;
  return out;
}

//==============================================================================
// isotropic rate
//==============================================================================

namespace detail {

inline Evaluated couple(const Evaluated &direct, Vec3 r_a, Vec3 r_m, Vec3 r_d,
                        const Environment &e, Frequency w, cplx alpha, Method mediated,
                        const EvalOptions &opt) {
  Evaluated f = direct;
  if (alpha != 0.0) {
    auto g_am = green(e, r_a, r_m, w, mediated, opt);
    auto g_md = green(e, r_m, r_d, w, mediated, opt);
    const cplx c = phys::mu0 * alpha * w.omega() * w.omega();
    f.value += c * (g_am.value * g_md.value);
    f.error_estimate += std::abs(c) * (g_am.error_estimate * g_md.value.frobenius() +
                                       g_am.value.frobenius() * g_md.error_estimate);
  }
  return f;
}

} // namespace detail

/// F = G(r_A, r_D) + mu0 alpha w^2 G(r_A, r_M) G(r_M, r_D). With alpha == 0 the
/// mediator legs are skipped.
inline Evaluated coupling_tensor_F(Vec3 r_a, Vec3 r_m, Vec3 r_d, const Environment &e,
                                   Frequency w, cplx alpha, RateMethod method = RateMethod::Exact,
                                   const EvalOptions &opt = {}) {
  const auto legs = detail::leg_methods(method);
  return detail::couple(detail::green(e, r_a, r_d, w, legs.direct, opt), r_a, r_m, r_d, e, w,
                        alpha, legs.mediated, opt);
}

struct DonorAcceptorPositions {
  Vec3 donor;
  Vec3 acceptor;
};

/// Everything in the isotropic rate that does not depend on the mediator: both
/// direct legs and the two-body rate. Built once per sweep.
struct IsotropicBaseline {
  double d_acceptor = 0.0, d_donor = 0.0;
  DonorAcceptorPositions pos;
  Environment environment;
  Frequency w{1.0};
  RateMethod method = RateMethod::Exact;
  EvalOptions opt;
  Evaluated g_ad, g_da;
  double gamma0 = 0.0;
  double error0 = 0.0;
};

namespace detail {

inline double averaged_trace(const IsotropicBaseline &b, const Evaluated &f_amd,
                             const Evaluated &f_dma) {
  const double pref = golden_rule_prefactor(b.w) / 9.0 * b.d_acceptor * b.d_acceptor *
                      b.d_donor * b.d_donor;
  const double imag_tol = std::max(1e-8, 10.0 * b.opt.sommerfeld.rel_tol);
  const cplx tr = (f_amd.value * f_dma.value.conj()).trace();
  if (std::abs(tr.imag()) > imag_tol * std::abs(tr.real()))
    throw QuadratureError("isotropic trace has a spurious imaginary part",
                          std::abs(tr.imag() / tr.real()));
  return pref * tr.real();
}

} // namespace detail

inline IsotropicBaseline isotropic_baseline(double d_acceptor, double d_donor,
                                            const DonorAcceptorPositions &pos,
                                            const Environment &e, Frequency w,
                                            RateMethod method = RateMethod::Exact,
                                            const EvalOptions &opt = {}) {
  if (!(d_acceptor > 0.0) || !(d_donor > 0.0))
    throw Error(ErrorKind::Geometry, "dipole magnitudes must be positive");
  detail::check_body(e, pos.donor, "donor");
  detail::check_body(e, pos.acceptor, "acceptor");
  detail::check_pair(pos.donor, pos.acceptor, w, "donor and acceptor");
  IsotropicBaseline b{d_acceptor, d_donor, pos, e, w, method, opt, {}, {}, 0.0, 0.0};
  const Method m = detail::leg_methods(method).direct;
  b.g_ad = detail::green(e, pos.acceptor, pos.donor, w, m, opt);
  b.g_da = detail::green(e, pos.donor, pos.acceptor, w, m, opt);
  b.gamma0 = detail::averaged_trace(b, b.g_ad, b.g_da);
  b.error0 = detail::relative(b.g_ad) + detail::relative(b.g_da);
  return b;
}

/// Isotropic rate for one mediator placement against a precomputed baseline.
inline RateResult rate_isotropic(const IsotropicBaseline &b,
                                 const std::optional<Mediator> &mediator) {
  RateResult out;
  out.gamma0 = b.gamma0;
  out.gamma = b.gamma0;
  out.error_estimate = b.error0;
  if (mediator) {
    const auto &e = b.environment;
    detail::check_body(e, mediator->position, "mediator");
    detail::check_pair(b.pos.donor, mediator->position, b.w, "donor and mediator");
    detail::check_pair(b.pos.acceptor, mediator->position, b.w, "acceptor and mediator");
    const cplx alpha = polarizability(mediator->polarizability, b.w.k());
    if (alpha != 0.0) {
      const Method m = detail::leg_methods(b.method).mediated;
      const Vec3 r_m = mediator->position;
      auto f_amd = detail::couple(b.g_ad, b.pos.acceptor, r_m, b.pos.donor, e, b.w, alpha, m, b.opt);
      auto f_dma = detail::couple(b.g_da, b.pos.donor, r_m, b.pos.acceptor, e, b.w, alpha, m, b.opt);
      out.gamma = detail::averaged_trace(b, f_amd, f_dma);
      out.error_estimate =
          std::max(out.error_estimate, detail::relative(f_amd) + detail::relative(f_dma));
    }
  }
  out.gamma_normalized = out.gamma0 > 0.0 ? out.gamma / out.gamma0
                                          : std::numeric_limits<double>::quiet_NaN();
  return out;
}

/// Orientation-averaged rate
///   (2 pi mu0^2 w^4 / 9 hbar) |d_A|^2 |d_D|^2 Tr[F(A,M,D) F^*(D,M,A)].
/// The trace is real by reciprocity; a residual imaginary part above 1e-8 of
/// the real part is reported as a quadrature failure.
inline RateResult rate_isotropic(double d_acceptor, double d_donor,
                                 const DonorAcceptorPositions &pos,
                                 const std::optional<Mediator> &mediator, const Environment &e,
                                 Frequency w, RateMethod method = RateMethod::Exact,
                                 const EvalOptions &opt = {}) {
  return rate_isotropic(isotropic_baseline(d_acceptor, d_donor, pos, e, w, method, opt), mediator);
}

//==============================================================================
// closed forms
//==============================================================================

/// Isotropic two-body rate for donor and acceptor on the surface normal in the
/// non-retarded limit:
///   (c^4 mu0^2 |d_A|^2 |d_D|^2 / 36 pi hbar)
///     [3|r|^2/(zA+zD)^6 + 2 Re r/((zA-zD)^3 (zA+zD)^3) + 3/(zA-zD)^6]
inline double gamma0(double z_d, double z_a, cplx r_nr, Frequency /*w*/, double d_a, double d_d) {
  if (!(z_d > 0.0 && z_a > z_d))
    throw Error(ErrorKind::Geometry, "gamma0 requires 0 < z_D < z_A");
  const double c = phys::c;
  const double sum3 = std::pow(z_a + z_d, 3), diff3 = std::pow(z_a - z_d, 3);
  const double bracket =
      3.0 * std::norm(r_nr) / (sum3 * sum3) + 2.0 * r_nr.real() / (diff3 * sum3) +
      3.0 / (diff3 * diff3);
  return c * c * c * c * phys::mu0 * phys::mu0 * d_a * d_a * d_d * d_d / (36.0 * pi * phys::hbar) *
         bracket;
}

/// Closed-form isotropic colinear rate with the mediator above both dipoles
/// (z_D < z_A < z_M): non-retarded donor-acceptor leg, retarded mediator legs.
inline RateResult rate_colinear_approx(double z_d, double z_a, double z_m,
                                       const LimitReflection &refl, cplx alpha, Frequency w,
                                       double d_a, double d_d) {
  if (!(z_d > 0.0 && z_d < z_a && z_a < z_m))
    throw Error(ErrorKind::Geometry, "colinear rate requires 0 < z_D < z_A < z_M");
  const double c = phys::c;
  const double c2 = c * c, c4 = c2 * c2;
  const double om = w.omega();
  const double om4 = om * om * om * om;
  const cplx r_nr = refl.r_nr, r_r = refl.r_r;

  const double sum3 = std::pow(z_a + z_d, 3), diff3 = std::pow(z_a - z_d, 3);
  const cplx zz = r_nr / sum3 + 1.0 / diff3;

  const cplx phase = std::exp(-I * om * (z_a + z_d - 2.0 * z_m) / c);
  const double den = (z_a - z_m) * (z_a + z_m) * (z_m - z_d) * (z_d + z_m);
  const cplx fa = r_r * (z_a - z_m) * std::exp(2.0 * I * z_a * om / c) - z_a - z_m;
  const cplx fd = r_r * (z_m - z_d) * std::exp(2.0 * I * om * z_d / c) + z_d + z_m;
  const cplx cc = 4.0 * pi * c2 * (1.0 / diff3 - r_nr / sum3) -
                  phys::mu0 * om4 * alpha * phase / den * fa * fd;

  const double pref = phys::mu0 * phys::mu0 * c4 * d_a * d_a * d_d * d_d / (18.0 * pi * phys::hbar);
  RateResult out;
  out.gamma = pref * (std::norm(zz) + std::norm(cc) / (32.0 * pi * pi * c4));
  out.gamma0 = gamma0(z_d, z_a, r_nr, w, d_a, d_d);
  out.gamma_normalized = out.gamma / out.gamma0;
  return out;
}

/// Oriented xx rate near a surface in the non-retarded limit.
inline double gamma_xx_mirror(double z_d, double z_a, cplx r_nr, double d_ax, double d_dx) {
  if (!(z_d > 0.0 && z_a > z_d))
    throw Error(ErrorKind::Geometry, "gamma_xx requires 0 < z_D < z_A");
  const double sum3 = std::pow(z_a + z_d, 3), diff3 = std::pow(z_a - z_d, 3);
  const double bracket = 1.0 / (diff3 * diff3) - 2.0 * r_nr.real() / (diff3 * sum3) +
                         std::norm(r_nr) / (sum3 * sum3);
  return d_ax * d_ax * d_dx * d_dx / (8.0 * pi * phys::hbar * phys::eps0 * phys::eps0) * bracket;
}

/// Mirror-modified rate for x-oriented dipoles from normal-mode QED, with the
/// retardation phase cos(2 k z_D) on the image term.
inline double gamma_trans_qd(double z_d, double z_a, double k, double d_ax, double d_dx) {
  if (!(z_d > 0.0 && z_a > z_d))
    throw Error(ErrorKind::Geometry, "gamma_trans requires 0 < z_D < z_A");
  const double sum3 = std::pow(z_a + z_d, 3), diff3 = std::pow(z_a - z_d, 3);
  const double bracket = 1.0 / (diff3 * diff3) - 2.0 * std::cos(2.0 * k * z_d) / (diff3 * sum3) +
                         1.0 / (sum3 * sum3);
  return d_ax * d_ax * d_dx * d_dx / (8.0 * pi * phys::hbar * phys::eps0 * phys::eps0) * bracket;
}

/// Isotropic vacuum Forster rate c^4 mu0^2 |d_A|^2 |d_D|^2 / (12 pi hbar R^6).
inline double forster_vacuum(double r, Frequency /*w*/, double d_a, double d_d) {
  if (!(r > 0.0))
    throw Error(ErrorKind::Geometry, "separation must be positive");
  const double c2 = phys::c * phys::c;
  return c2 * c2 * phys::mu0 * phys::mu0 * d_a * d_a * d_d * d_d /
         (12.0 * pi * phys::hbar * std::pow(r, 6));
}

} // namespace ret
