#pragma once

// Material response: permittivity models, interface reflection coefficients
// and the dispersive mediator polarizability.

#include "ret/core.hpp"

#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace ret {

//==============================================================================
// permittivity
//==============================================================================

namespace material {

struct Constant {
  cplx eps;
};

/// eps(w) = 1 + wp^2 / (w0^2 - w^2 - i*gamma*w), all in rad/s.
struct DrudeLorentz {
  double omega_p;
  double omega_0;
  double gamma;
};

/// eps -> infinity. Never evaluated numerically; callers branch on it.
struct PerfectReflector {};

} // namespace material

using PermittivityModel =
    std::variant<material::Constant, material::DrudeLorentz, material::PerfectReflector>;

inline bool is_perfect_reflector(const PermittivityModel &m) {
  return std::holds_alternative<material::PerfectReflector>(m);
}

inline cplx permittivity(const PermittivityModel &model, Frequency w) {
  const double omega = w.omega();
  return std::visit(
      [omega](const auto &m) -> cplx {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, material::Constant>) {
          return m.eps;
        } else if constexpr (std::is_same_v<T, material::DrudeLorentz>) {
          cplx den{m.omega_0 * m.omega_0 - omega * omega, -m.gamma * omega};
          return 1.0 + m.omega_p * m.omega_p / den;
        } else {
          throw Error(ErrorKind::SymbolicMaterial,
                      "perfect reflector has no finite permittivity");
        }
      },
      model);
}

/// Square root on the branch Im >= 0 (outgoing / decaying waves).
inline cplx sqrt_upper(cplx z) {
  cplx s = std::sqrt(z);
  return s.imag() < 0.0 ? -s : s;
}

inline bool is_infinite(cplx eps) {
  return std::isinf(eps.real()) || std::isinf(eps.imag());
}

//==============================================================================
// reflection coefficients
//==============================================================================

/// Quasi-static reflection coefficient (eps - 1)/(eps + 1).
inline cplx r_nonretarded(cplx eps) {
  if (is_infinite(eps))
    return 1.0;
  cplx den = eps + 1.0;
  if (std::abs(den) < 1e-14 * std::max(1.0, std::abs(eps)))
    throw Error(ErrorKind::SurfacePole, "eps = -1 is the surface-mode resonance");
  return (eps - 1.0) / den;
}

/// Normal-incidence Fresnel amplitude (1 - sqrt eps)/(1 + sqrt eps). The
/// perfect-reflector limit is -1.
inline cplx r_retarded(cplx eps) {
  if (is_infinite(eps))
    return -1.0;
  cplx n = sqrt_upper(eps);
  return (1.0 - n) / (1.0 + n);
}

struct FresnelPair {
  cplx r_s;
  cplx r_p;
};

/// Plane-wave reflection from vacuum onto a half-space of permittivity eps at
/// in-plane wavenumber k_par. Sign convention: r_p(k_par -> 0) = -r_retarded,
/// r_s(k_par -> 0) = r_retarded, perfect conductor gives (r_s, r_p) = (-1, +1).
inline FresnelPair fresnel(cplx eps, double k_par, Frequency w) {
  if (is_infinite(eps))
    return {-1.0, 1.0};
  const double k = w.k();
  const double q2 = k_par * k_par;
  const cplx kz1 = sqrt_upper(cplx{k * k - q2, 0.0});
  const cplx kz2 = sqrt_upper(eps * (k * k) - q2);
  return {(kz1 - kz2) / (kz1 + kz2), (eps * kz1 - kz2) / (eps * kz1 + kz2)};
}

/// The two limit reflection coefficients of a material, handling the
/// perfect reflector symbolically.
struct LimitReflection {
  cplx r_nr;
  cplx r_r;
};

inline LimitReflection limit_reflection(const PermittivityModel &m, Frequency w) {
  if (is_perfect_reflector(m))
    return {1.0, -1.0};
  cplx eps = permittivity(m, w);
  return {r_nonretarded(eps), r_retarded(eps)};
}

//==============================================================================
// mediator polarizability
//==============================================================================

namespace polarizability_model {

/// Frequency-independent alpha in C^2 m^2 / J.
struct StaticScalar {
  double alpha;
};

/// One virtual transition s -> r: dipole magnitude (C m) and energy (J).
struct TwoLevel {
  double dipole;
  double energy;
};

using Sum = std::vector<TwoLevel>;

} // namespace polarizability_model

using PolarizabilityModel =
    std::variant<polarizability_model::StaticScalar, polarizability_model::TwoLevel,
                 polarizability_model::Sum>;

/// Relative half-width of the rejected band around a mediator resonance.
inline constexpr double resonance_guard = 1e-6;

/// alpha = 4 pi eps0 V for a polarizability volume V in m^3.
inline double alpha_from_volume(double volume) { return 4.0 * pi * phys::eps0 * volume; }

namespace detail {

inline double two_level_term(const polarizability_model::TwoLevel &t, double k) {
  if (!(t.energy > 0.0))
    throw Error(ErrorKind::MediatorResonance, "transition energy must be positive");
  const double photon = phys::hbar * phys::c * k;
  const double minus = t.energy - photon;
  const double plus = t.energy + photon;
  if (std::min(std::abs(minus), std::abs(plus)) < resonance_guard * t.energy)
    throw Error(ErrorKind::MediatorResonance,
                "photon energy inside the guard band of a mediator transition");
  return t.dipole * t.dipole * (1.0 / plus + 1.0 / minus);
}

} // namespace detail

/// alpha(k) = sum_r |d_sr|^2 [1/(E_rs + hbar c k) + 1/(E_rs - hbar c k)]
inline cplx polarizability(const PolarizabilityModel &model, double k) {
  return std::visit(
      [k](const auto &m) -> cplx {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, polarizability_model::StaticScalar>) {
          return m.alpha;
        } else if constexpr (std::is_same_v<T, polarizability_model::TwoLevel>) {
          return detail::two_level_term(m, k);
        } else {
          double s = 0.0;
          for (const auto &t : m)
            s += detail::two_level_term(t, k);
          return s;
        }
      },
      model);
}

} // namespace ret
