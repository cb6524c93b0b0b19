#pragma once

// Green's tensors G(r, r', w) for vacuum, a dielectric half-space filling
// z < 0 and a perfect mirror at z = 0. Units are 1/m; the convention is the
// one in which the bulk near field reads -(c^2 / 4 pi w^2 rho^3)(I - 3 e e).

#include "ret/core.hpp"
#include "ret/media.hpp"
#include "ret/quadrature.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <optional>
#include <variant>
#include <vector>

namespace ret {

//==============================================================================
// environment
//==============================================================================

namespace env {
struct Vacuum {};
/// Material below z = 0, vacuum above.
struct HalfSpace {
  PermittivityModel material;
};
/// Perfect reflector below z = 0.
struct PerfectMirror {};
} // namespace env

using Environment = std::variant<env::Vacuum, env::HalfSpace, env::PerfectMirror>;

inline bool has_surface(const Environment &e) {
  return !std::holds_alternative<env::Vacuum>(e);
}

enum class Part { Bulk, Scatter, Total };
enum class Method { Exact, NonRetardedLimit, RetardedLimit, Auto };

struct GreensRequest {
  Vec3 r;
  Vec3 r_prime;
  Frequency omega;
  Part part = Part::Total;
  Method method = Method::Auto;
};

/// A tensor together with an absolute error bound on its Frobenius norm.
struct Evaluated {
  ComplexDyadic value;
  double error_estimate = 0.0;
};

//==============================================================================
// vacuum
//==============================================================================

namespace detail {

struct Separation {
  Vec3 e;     // unit vector along r - r'
  double rho; // |r - r'|
};

inline Separation separation(Vec3 r, Vec3 rp) {
  Vec3 d = r - rp;
  double rho = d.norm();
  if (!(rho > 0.0) || !d.finite())
    throw Error(ErrorKind::CoincidentPoints,
                "bulk Green's tensor requires non-coincident points");
  return {(1.0 / rho) * d, rho};
}

inline ComplexDyadic eye_minus(double s, Vec3 e) {
  ComplexDyadic d = outer(e, e);
  d *= -s;
  d += ComplexDyadic::identity();
  return d;
}

} // namespace detail

/// Full homogeneous-space dyadic (the coincidence delta term is excluded).
inline ComplexDyadic vacuum_bulk_exact(Vec3 r, Vec3 rp, Frequency w) {
  auto [e, rho] = detail::separation(r, rp);
  const double k = w.k();
  const double y = k * rho;
  const cplx pref = -std::exp(I * y) / (4.0 * pi * k * k * rho * rho * rho);
  const cplx a = 1.0 - I * y - y * y;
  const cplx b = 3.0 - 3.0 * I * y - y * y;
  ComplexDyadic g = outer(e, e);
  g *= -b;
  g += a * ComplexDyadic::identity();
  return pref * g;
}

/// Quasi-static near field -(1/4 pi k^2 rho^3)(I - 3 e e). Taken without the
/// propagation phase: the e^{ik rho} factor is 1 to the order this limit
/// keeps, and the closed-form colinear rate is built on the phase-free form.
inline ComplexDyadic vacuum_bulk_nr(Vec3 r, Vec3 rp, Frequency w) {
  auto [e, rho] = detail::separation(r, rp);
  const double k = w.k();
  return (-1.0 / (4.0 * pi * k * k * rho * rho * rho)) * detail::eye_minus(3.0, e);
}

/// Radiation zone (e^{ik rho} / 4 pi rho)(I - e e), the large-rho limit of
/// vacuum_bulk_exact.
inline ComplexDyadic vacuum_bulk_r(Vec3 r, Vec3 rp, Frequency w) {
  auto [e, rho] = detail::separation(r, rp);
  const double k = w.k();
  return (std::exp(I * (k * rho)) / (4.0 * pi * rho)) * detail::eye_minus(1.0, e);
}

//==============================================================================
// half-space: analytic limits
//==============================================================================

namespace detail {

inline void require_above(Vec3 r, const char *what) {
  if (!(r.z > 0.0))
    throw Error(ErrorKind::Geometry, std::string(what) + " must lie above the surface (z > 0)");
}

inline void require_on_axis(Vec3 r, Vec3 rp) {
  const double scale = std::abs(r.z) + std::abs(rp.z);
  const double tol = 1e-12 * scale;
  if (std::abs(r.x) > tol || std::abs(r.y) > tol || std::abs(rp.x) > tol ||
      std::abs(rp.y) > tol)
    throw Error(ErrorKind::OffAxis, "limit form of the scattering tensor is on-axis only");
}

} // namespace detail

/// Non-retarded scattering tensor on the z axis, given the quasi-static
/// reflection coefficient.
inline ComplexDyadic halfspace_scatter_nr_coeff(Vec3 r, Vec3 rp, Frequency w, cplx r_nr) {
  detail::require_above(r, "observation point");
  detail::require_above(rp, "source point");
  detail::require_on_axis(r, rp);
  const double zs = r.z + rp.z;
  const double k = w.k();
  const cplx pref = r_nr / (4.0 * pi * k * k * zs * zs * zs);
  return pref * ComplexDyadic::diagonal(1.0, 1.0, 2.0);
}

inline ComplexDyadic halfspace_scatter_nr(Vec3 r, Vec3 rp, Frequency w, cplx eps) {
  return halfspace_scatter_nr_coeff(r, rp, w, r_nonretarded(eps));
}

/// Retarded scattering tensor on the z axis, given r_R.
inline ComplexDyadic halfspace_scatter_r_coeff(Vec3 r, Vec3 rp, Frequency w, cplx r_r) {
  detail::require_above(r, "observation point");
  detail::require_above(rp, "source point");
  detail::require_on_axis(r, rp);
  const double zs = r.z + rp.z;
  const double k = w.k();
  const cplx pref = r_r * std::exp(I * (k * zs)) / (4.0 * pi * zs);
  return pref * ComplexDyadic::diagonal(1.0, 1.0, 0.0);
}

inline ComplexDyadic halfspace_scatter_r(Vec3 r, Vec3 rp, Frequency w, cplx eps) {
  return halfspace_scatter_r_coeff(r, rp, w, r_retarded(eps));
}

//==============================================================================
// perfect mirror: image construction
//==============================================================================

/// G1(r, r') = G0(r, r'_image) diag(-1, -1, 1) with r'_image = (x', y', -z').
inline ComplexDyadic mirror_scatter_exact(Vec3 r, Vec3 rp, Frequency w) {
  detail::require_above(r, "observation point");
  detail::require_above(rp, "source point");
  return vacuum_bulk_exact(r, rp.reflected(), w) * ComplexDyadic::diagonal(-1.0, -1.0, 1.0);
}

//==============================================================================
// half-space: Sommerfeld integral
//==============================================================================

struct SommerfeldOptions {
  /// Relative tolerance on the Frobenius norm of the scattering tensor.
  double rel_tol = 1e-9;
  /// The evanescent integral is truncated where k_z (z + z') reaches this.
  double decay_cutoff = 40.0;
  /// Imaginary part added to lossless permittivities.
  double lossless_nudge = 1e-12;
  quad::Options quadrature{};
};

struct ScatterResult {
  ComplexDyadic tensor;
  double error_estimate = 0.0; // absolute, same units as tensor
  long evaluations = 0;
};

namespace detail {

struct BesselTriple {
  double j0, j1, j2;
};

inline BesselTriple bessel_j012(double x) {
  if (x == 0.0)
    return {1.0, 0.0, 0.0};
  // integer-order rational approximations; the generic cyl_bessel_j entry
  // point is an order of magnitude slower
  const double j0 = boost::math::detail::bessel_j0(x);
  const double j1 = boost::math::detail::bessel_j1(x);
  const double j2 = x < 1e-3 ? x * x / 8.0 * (1.0 - x * x / 24.0) : 2.0 * j1 / x - j0;
  return {j0, j1, j2};
}

/// Reflection coefficients as functions of the vacuum k_z, which the
/// integration variables provide without cancellation near k_par = k.
struct Reflector {
  bool perfect = false;
  cplx eps{1.0, 0.0};
  cplx r_static{0.0, 0.0}; // r_p as k_par -> infinity

  FresnelPair at(double q, cplx kz, double k) const {
    if (perfect)
      return {-1.0, 1.0};
    const cplx kz2 = sqrt_upper(eps * (k * k) - q * q);
    return {(kz - kz2) / (kz + kz2), (eps * kz - kz2) / (eps * kz + kz2)};
  }
};

inline Reflector make_reflector(const PermittivityModel &m, Frequency w, double nudge) {
  Reflector r;
  if (is_perfect_reflector(m)) {
    r.perfect = true;
    r.r_static = 1.0;
    return r;
  }
  r.eps = permittivity(m, w);
  if (r.eps.imag() == 0.0 && std::abs(r.eps - 1.0) >= 1e-15)
    r.eps += cplx{0.0, nudge};
  r.r_static = r_nonretarded(r.eps);
  return r;
}

using Kernels = quad::Values<6>;

/// Electrostatic image of strength r_static; exactly the integral over
/// [0, inf) of the subtracted static kernels.
inline ComplexDyadic static_image(Vec3 r, Vec3 rp, double k, cplx r_static) {
  auto [e, rho] = separation(r, rp.reflected());
  ComplexDyadic g = (-1.0 / (4.0 * pi * k * k * rho * rho * rho)) * eye_minus(3.0, e);
  return r_static * (g * ComplexDyadic::diagonal(-1.0, -1.0, 1.0));
}

/// Assemble the tensor from the six Bessel-kernel integrals.
///   I1 = int w r_s J0       I2 = int w r_s J2
///   I3 = int w r_p kz^2/k^2 J0   I4 = ... J2
///   I5 = int w r_p q^2/k^2 J0    I6 = int w r_p q kz/k^2 J1
/// with w = q e^{i kz Z} / kz dq.
inline ComplexDyadic assemble(const Kernels &in, double ux, double uy) {
  const cplx c = I / (8.0 * pi);
  const cplx iso = c * (in[0] - in[1] - in[2] - in[3]);
  const cplx aniso = c * 2.0 * (in[1] + in[3]);
  ComplexDyadic g;
  g(0, 0) = iso + aniso * ux * ux;
  g(1, 1) = iso + aniso * uy * uy;
  g(0, 1) = g(1, 0) = aniso * ux * uy;
  g(2, 2) = I * in[4] / (4.0 * pi);
  const cplx s = in[5] / (4.0 * pi);
  g(0, 2) = s * ux;
  g(1, 2) = s * uy;
  g(2, 0) = -s * ux;
  g(2, 1) = -s * uy;
  return g;
}

} // namespace detail

/// Scattering part of the half-space Green's tensor for arbitrary z, z' > 0 and
/// lateral separation. The azimuthal integral is done with J0, J1, J2; the
/// remaining k_par integral runs over k sin(theta) on the propagating part and
/// k cosh(t) on the evanescent part, with the electrostatic image subtracted
/// from the integrand and added back in closed form.
inline ScatterResult halfspace_scatter_full(Vec3 r, Vec3 rp, Frequency w,
                                            const PermittivityModel &material,
                                            const SommerfeldOptions &opt = {}) {
  detail::require_above(r, "observation point");
  detail::require_above(rp, "source point");

  const double k = w.k();
  const double zs = r.z + rp.z;
  const double lx = r.x - rp.x, ly = r.y - rp.y;
  const double rho = std::hypot(lx, ly);
  const double ux = rho > 0.0 ? lx / rho : 1.0;
  const double uy = rho > 0.0 ? ly / rho : 0.0;

  const auto refl = detail::make_reflector(material, w, opt.lossless_nudge);
  if (!refl.perfect && std::abs(refl.eps - 1.0) < 1e-15)
    return {ComplexDyadic{}, 0.0, 0};

  const cplx rs = refl.r_static;
  const ComplexDyadic image = detail::static_image(r, rp, k, rs);

  auto kernels = [&](double q, cplx kz, cplx weight, double dq) {
    const auto [j0, j1, j2] = detail::bessel_j012(q * rho);
    const auto [r_s, r_p] = refl.at(q, kz, k);
    const double k2 = k * k;
    const cplx kz2k = kz * kz / k2;
    const double q2k = q * q / k2;
    detail::Kernels out{weight * r_s * j0,
                        weight * r_s * j2,
                        weight * r_p * kz2k * j0,
                        weight * r_p * kz2k * j2,
                        weight * r_p * q2k * j0,
                        weight * r_p * (q * kz / k2) * j1};
    // static image kernels: kz -> i q, r_p -> r_static, r_s -> 0
    const cplx ws = -I * std::exp(-q * zs) * dq;
    out[2] -= ws * rs * (-q2k) * j0;
    out[3] -= ws * rs * (-q2k) * j2;
    out[4] -= ws * rs * q2k * j0;
    out[5] -= ws * rs * (I * q2k) * j1;
    return out;
  };

  // propagating: q = k sin(theta), kz = k cos(theta), q dq / kz = k sin(theta) dtheta
  auto propagating = [&](double th) {
    const double s = std::sin(th), c = std::cos(th);
    const double q = k * s;
    const cplx kz{k * c, 0.0};
    return kernels(q, kz, k * s * std::exp(I * (k * zs * c)), k * c);
  };
  // evanescent: q = k cosh(t), kz = i k sinh(t), q dq / kz = -i k cosh(t) dt
  auto evanescent = [&](double t) {
    const double ch = std::cosh(t), sh = std::sinh(t);
    const double q = k * ch;
    const cplx kz{0.0, k * sh};
    return kernels(q, kz, -I * k * ch * std::exp(-k * zs * sh), k * sh);
  };

  std::vector<quad::Panel<6>> panels;
  auto add_panels = [&](double a, double b, int n, const std::function<detail::Kernels(double)> &f) {
    n = std::max(n, 1);
    for (int i = 0; i < n; ++i)
      panels.push_back({a + (b - a) * i / n, a + (b - a) * (i + 1) / n, f});
  };

  // breakpoints at the material branch point and, for metals, the surface pole
  std::vector<double> theta_breaks{0.0, pi / 2};
  std::vector<double> t_breaks{0.0};
  const double t_max = std::asinh(opt.decay_cutoff / (k * zs));
  if (!refl.perfect) {
    const double re = refl.eps.real();
    if (re > 0.0 && re < 1.0)
      theta_breaks.insert(theta_breaks.begin() + 1, std::asin(std::sqrt(re)));
    if (re > 1.0 && std::acosh(std::sqrt(re)) < t_max)
      t_breaks.push_back(std::acosh(std::sqrt(re)));
    if (re < -1.0) {
      const double qsp = std::sqrt(re / (re + 1.0));
      if (qsp > 1.0 && std::acosh(qsp) < t_max)
        t_breaks.push_back(std::acosh(qsp));
    }
  }
  t_breaks.push_back(t_max);

  // roughly one panel per oscillation of the phase and Bessel factors
  const int n_prop = 1 + static_cast<int>((k * zs + k * rho) / 4.0);
  for (std::size_t i = 0; i + 1 < theta_breaks.size(); ++i)
    add_panels(theta_breaks[i], theta_breaks[i + 1], n_prop, propagating);

  const double q_max = k * std::cosh(t_max);
  const int n_bessel = std::min(4000, 1 + static_cast<int>(q_max * rho / (2.0 * pi)));
  for (std::size_t i = 0; i + 1 < t_breaks.size(); ++i) {
    const double a = t_breaks[i], b = t_breaks[i + 1];
    // uniform in q so that each panel holds about one Bessel period
    const double qa = k * std::cosh(a), qb = k * std::cosh(b);
    const int n = std::max(4, static_cast<int>(n_bessel * (qb - qa) / (q_max - k)));
    double prev = a;
    for (int j = 1; j <= n; ++j) {
      double t = j == n ? b : std::acosh((qa + (qb - qa) * j / n) / k);
      if (t > prev)
        panels.push_back({prev, t, evanescent});
      prev = t;
    }
  }

  // integral error -> tensor error: every entry is at most 1/(4 pi) times a
  // sum of the six kernels with coefficients <= 2
  constexpr double to_tensor = 1.0 / (2.0 * pi);
  auto target = [&](const detail::Kernels &v) {
    const double norm = (detail::assemble(v, ux, uy) + image).frobenius();
    return opt.rel_tol * std::max(norm, 1e-300) / to_tensor;
  };

  auto res = quad::integrate<6>(panels, target, opt.quadrature);
  ScatterResult out;
  out.tensor = detail::assemble(res.value, ux, uy) + image;
  out.error_estimate = res.error * to_tensor;
  out.evaluations = res.evaluations;
  return out;
}

//==============================================================================
// assembly
//==============================================================================

struct EvalOptions {
  SommerfeldOptions sommerfeld{};
};

inline ComplexDyadic vacuum_bulk(Vec3 r, Vec3 rp, Frequency w, Method m) {
  switch (m) {
  case Method::NonRetardedLimit: return vacuum_bulk_nr(r, rp, w);
  case Method::RetardedLimit: return vacuum_bulk_r(r, rp, w);
  default: return vacuum_bulk_exact(r, rp, w);
  }
}

inline Evaluated scatter(const Environment &environment, Vec3 r, Vec3 rp, Frequency w, Method m,
                         const EvalOptions &opt = {}) {
  return std::visit(
      [&](const auto &e) -> Evaluated {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, env::Vacuum>) {
          return {ComplexDyadic{}, 0.0};
        } else if constexpr (std::is_same_v<T, env::PerfectMirror>) {
          switch (m) {
          case Method::NonRetardedLimit: return {halfspace_scatter_nr_coeff(r, rp, w, 1.0), 0.0};
          case Method::RetardedLimit: return {halfspace_scatter_r_coeff(r, rp, w, -1.0), 0.0};
          default: return {mirror_scatter_exact(r, rp, w), 0.0};
          }
        } else {
          switch (m) {
          case Method::NonRetardedLimit:
          case Method::RetardedLimit: {
            auto lr = limit_reflection(e.material, w);
            if (m == Method::NonRetardedLimit)
              return {halfspace_scatter_nr_coeff(r, rp, w, lr.r_nr), 0.0};
            return {halfspace_scatter_r_coeff(r, rp, w, lr.r_r), 0.0};
          }
          default: {
            auto s = halfspace_scatter_full(r, rp, w, e.material, opt.sommerfeld);
            return {s.tensor, s.error_estimate};
          }
          }
        }
      },
      environment);
}

/// Bulk + scattering parts as requested. Auto means the exact bulk tensor plus
/// the full (Sommerfeld or image) scattering tensor.
inline Evaluated green_total(const Environment &environment, const GreensRequest &req,
                             const EvalOptions &opt = {}) {
  if (has_surface(environment)) {
    detail::require_above(req.r, "observation point");
    detail::require_above(req.r_prime, "source point");
  }
  Evaluated out;
  if (req.part != Part::Scatter)
    out.value = vacuum_bulk(req.r, req.r_prime, req.omega, req.method);
  if (req.part != Part::Bulk) {
    auto s = scatter(environment, req.r, req.r_prime, req.omega, req.method, opt);
    out.value += s.value;
    out.error_estimate += s.error_estimate;
  }
  return out;
}

} // namespace ret
