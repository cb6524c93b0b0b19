#pragma once

// Dimensioned value types, SI constants and the error type shared by the
// whole library. Everything in here is a plain value; all functions are pure.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ret {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

//==============================================================================
// errors
//==============================================================================

enum class ErrorKind {
  SymbolicMaterial,   // permittivity requested from a perfect reflector
  SurfacePole,        // eps = -1 in the non-retarded reflection coefficient
  MediatorResonance,  // polarizability evaluated inside the guard band
  CoincidentPoints,   // bulk Green's tensor at r == r'
  OffAxis,            // on-axis limit form called with lateral separation
  Geometry,           // ordering / half-space / degenerate-distance guards
  Quadrature,         // Sommerfeld integral failed to converge
  Config,             // configuration parse or validation failure
  Io,
};

inline const char *to_string(ErrorKind k) {
  switch (k) {
  case ErrorKind::SymbolicMaterial: return "symbolic-material";
  case ErrorKind::SurfacePole: return "surface-pole";
  case ErrorKind::MediatorResonance: return "mediator-resonance";
  case ErrorKind::CoincidentPoints: return "coincident-points";
  case ErrorKind::OffAxis: return "off-axis";
  case ErrorKind::Geometry: return "geometry";
  case ErrorKind::Quadrature: return "quadrature";
  case ErrorKind::Config: return "config";
  case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind), message_(what) {}
  ErrorKind kind() const noexcept { return kind_; }
  /// what() without the kind prefix.
  const std::string &message() const noexcept { return message_; }

private:
  ErrorKind kind_;
  std::string message_;
};

/// Thrown when an adaptive integral cannot reach its tolerance.
class QuadratureError : public Error {
public:
  QuadratureError(const std::string &what, double achieved)
      : Error(ErrorKind::Quadrature,
              what + " (achieved error estimate " + format(achieved) + ")"),
        achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  double achieved_;
};

//==============================================================================
// constants
//==============================================================================

/// SI constants. eps0 is derived from mu0 and c so that eps0*mu0*c^2 == 1
/// holds to rounding.
struct PhysicalConstants {
  static constexpr double c = 299792458.0;             // m/s
  static constexpr double mu0 = 1.25663706212e-6;      // H/m
  static constexpr double eps0 = 1.0 / (mu0 * c * c);  // F/m
  static constexpr double hbar = 1.054571817e-34;      // J s
  static constexpr double debye = 3.33564095198152e-30; // C m
};

using phys = PhysicalConstants;

//==============================================================================
// frequency
//==============================================================================

/// Angular frequency in rad/s. Always positive.
class Frequency {
public:
  explicit Frequency(double omega) : omega_(omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw Error(ErrorKind::Geometry, "angular frequency must be positive");
  }
  static Frequency from_wavelength(double lambda) {
    if (!(lambda > 0.0))
      throw Error(ErrorKind::Geometry, "wavelength must be positive");
    return Frequency(2.0 * pi * phys::c / lambda);
  }

  double omega() const noexcept { return omega_; }
  double wavelength() const noexcept { return 2.0 * pi * phys::c / omega_; }
  /// vacuum wavenumber omega/c
  double k() const noexcept { return omega_ / phys::c; }

private:
  double omega_;
};

//==============================================================================
// vectors
//==============================================================================

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  /// mirror image in the plane z = 0
  constexpr Vec3 reflected() const { return {x, y, -z}; }
};

inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }

struct CVec3 {
  std::array<cplx, 3> v{};

  CVec3() = default;
  CVec3(cplx x, cplx y, cplx z) : v{x, y, z} {}
  static CVec3 from_real(Vec3 r) { return {r.x, r.y, r.z}; }

  cplx &operator[](int i) { return v[i]; }
  const cplx &operator[](int i) const { return v[i]; }

  friend CVec3 operator*(cplx s, const CVec3 &a) { return {s * a[0], s * a[1], s * a[2]}; }
  friend CVec3 operator+(const CVec3 &a, const CVec3 &b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
  }

  CVec3 conj() const { return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])}; }
  double norm() const {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
  }
  bool finite() const {
    return std::all_of(v.begin(), v.end(), [](cplx c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }
};

/// Bilinear product a . b (no conjugation).
inline cplx dot(const CVec3 &a, const CVec3 &b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

//==============================================================================
// dyadics
//==============================================================================

/// Complex 3x3 tensor, row-major. Green's tensors carry units of 1/m.
class ComplexDyadic {
public:
  ComplexDyadic() { m_.fill(cplx{}); }

  static ComplexDyadic identity() { return diagonal(1.0, 1.0, 1.0); }
  static ComplexDyadic diagonal(cplx a, cplx b, cplx c) {
    ComplexDyadic d;
    d(0, 0) = a;
    d(1, 1) = b;
    d(2, 2) = c;
    return d;
  }

  cplx &operator()(int i, int j) { return m_[3 * i + j]; }
  const cplx &operator()(int i, int j) const { return m_[3 * i + j]; }

  ComplexDyadic transpose() const {
    ComplexDyadic t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t(i, j) = (*this)(j, i);
    return t;
  }
  ComplexDyadic conj() const {
    ComplexDyadic t;
    for (int i = 0; i < 9; ++i)
      t.m_[i] = std::conj(m_[i]);
    return t;
  }
  ComplexDyadic adjoint() const { return conj().transpose(); }

  cplx trace() const { return m_[0] + m_[4] + m_[8]; }

  double frobenius() const {
    double s = 0.0;
    for (auto c : m_)
      s += std::norm(c);
    return std::sqrt(s);
  }
  bool finite() const {
    return std::all_of(m_.begin(), m_.end(), [](cplx c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  ComplexDyadic &operator+=(const ComplexDyadic &o) {
    for (int i = 0; i < 9; ++i)
      m_[i] += o.m_[i];
    return *this;
  }
  ComplexDyadic &operator-=(const ComplexDyadic &o) {
    for (int i = 0; i < 9; ++i)
      m_[i] -= o.m_[i];
    return *this;
  }
  ComplexDyadic &operator*=(cplx s) {
    for (auto &c : m_)
      c *= s;
    return *this;
  }

  friend ComplexDyadic operator+(ComplexDyadic a, const ComplexDyadic &b) { return a += b; }
  friend ComplexDyadic operator-(ComplexDyadic a, const ComplexDyadic &b) { return a -= b; }
  friend ComplexDyadic operator*(cplx s, ComplexDyadic a) { return a *= s; }
  friend ComplexDyadic operator*(ComplexDyadic a, cplx s) { return a *= s; }

  friend ComplexDyadic operator*(const ComplexDyadic &a, const ComplexDyadic &b) {
    ComplexDyadic r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        cplx s{};
        for (int k = 0; k < 3; ++k)
          s += a(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }

  friend CVec3 operator*(const ComplexDyadic &a, const CVec3 &v) {
    CVec3 r;
    for (int i = 0; i < 3; ++i)
      r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
    return r;
  }

private:
  std::array<cplx, 9> m_;
};

/// (a (x) b)_ij = a_i b_j
inline ComplexDyadic outer(const CVec3 &a, const CVec3 &b) {
  ComplexDyadic d;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      d(i, j) = a[i] * b[j];
  return d;
}

inline ComplexDyadic outer(Vec3 a, Vec3 b) {
  return outer(CVec3::from_real(a), CVec3::from_real(b));
}

/// |a - b| / max(|a|, |b|, tiny). Used by every tolerance check.
inline double relative_error(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

inline double relative_error(cplx a, cplx b) {
  double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

inline double relative_error(const ComplexDyadic &a, const ComplexDyadic &b) {
  double scale = std::max({a.frobenius(), b.frobenius(), std::numeric_limits<double>::min()});
  return (a - b).frobenius() / scale;
}

/// ||G_ab - G_ba^T||_F / max(||G_ab||_F, tiny). Zero for a reciprocal pair.
inline double dyadic_reciprocity_defect(const ComplexDyadic &g_ab, const ComplexDyadic &g_ba) {
  double scale = std::max(g_ab.frobenius(), std::numeric_limits<double>::min());
  return (g_ab - g_ba.transpose()).frobenius() / scale;
}

} // namespace ret
