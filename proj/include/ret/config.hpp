#pragma once

// JSON run configuration. All lengths in the file are in units of the donor
// wavelength and are converted to meters on load.

#include "ret/core.hpp"
#include "ret/greens.hpp"
#include "ret/media.hpp"
#include "ret/rates.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

namespace ret {

enum class ConfigMethod { Auto, Limits, Exact };

struct BodyConfig {
  Vec3 position;                   // meters
  std::optional<CVec3> orientation; // unit direction; enables the oriented rate
};

struct MediatorConfig {
  Vec3 position; // meters
  PolarizabilityModel polarizability;
};

struct OneD {
  double min, max; // mediator z, in wavelengths
  int steps;
};

struct TwoD {
  double xmin, xmax, zmin, zmax; // wavelengths
  int nx, nz;
  double clip_radius = 0.15;
};

using SweepSpec = std::variant<OneD, TwoD>;

struct SimulationConfig {
  Environment environment;
  std::string environment_name;
  Frequency omega{1.0};
  BodyConfig donor, acceptor;
  std::optional<MediatorConfig> mediator;
  double d_donor = phys::debye;
  double d_acceptor = phys::debye;
  bool normalized_only = true;
  ConfigMethod method = ConfigMethod::Auto;
  double tolerance = 1e-9;
  std::optional<SweepSpec> sweep;
  std::optional<std::string> sweep_method; // limits | exact | both
  int workers = 0;

  double wavelength() const { return omega.wavelength(); }
  EvalOptions eval_options() const {
    EvalOptions o;
    o.sommerfeld.rel_tol = tolerance;
    return o;
  }
};

inline RateMethod resolve(ConfigMethod m) {
  return m == ConfigMethod::Limits ? RateMethod::Limits : RateMethod::Exact;
}

namespace detail {

using nlohmann::json;

inline std::string line_col(const std::string &text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n')
      ++line, col = 1;
    else
      ++col;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] inline void field_error(const std::string &field, const std::string &msg) {
  throw Error(ErrorKind::Config, "field '" + field + "': " + msg);
}

inline const json *find(const json &j, const char *key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double number(const json &j, const std::string &field) {
  if (!j.is_number())
    field_error(field, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v))
    field_error(field, "must be finite");
  return v;
}

inline double number_or(const json &obj, const char *key, const std::string &path, double fallback) {
  const json *v = find(obj, key);
  return v ? number(*v, path + "." + key) : fallback;
}

inline double require_number(const json &obj, const char *key, const std::string &path) {
  const json *v = find(obj, key);
  if (!v)
    field_error(path + "." + key, "missing");
  return number(*v, path + "." + key);
}

inline int integer(const json &j, const std::string &field) {
  if (!j.is_number_integer())
    field_error(field, "expected an integer");
  return j.get<int>();
}

inline std::string string(const json &j, const std::string &field) {
  if (!j.is_string())
    field_error(field, "expected a string");
  return j.get<std::string>();
}

inline const json &object(const json &j, const std::string &field) {
  if (!j.is_object())
    field_error(field, "expected an object");
  return j;
}

inline PermittivityModel parse_permittivity(const json &j, const std::string &path) {
  if (j.is_number())
    return material::Constant{number(j, path)};
  object(j, path);
  const json *t = find(j, "type");
  const std::string type = t ? string(*t, path + ".type") : "constant";
  if (type == "constant") {
    return material::Constant{cplx{require_number(j, "re", path), number_or(j, "im", path, 0.0)}};
  }
  if (type == "drude_lorentz") {
    material::DrudeLorentz m{require_number(j, "omega_p", path), number_or(j, "omega_0", path, 0.0),
                             number_or(j, "gamma", path, 0.0)};
    if (m.omega_p < 0.0 || m.omega_0 < 0.0 || m.gamma < 0.0)
      field_error(path, "Drude-Lorentz parameters must be non-negative (passive medium)");
    return m;
  }
  if (type == "perfect")
    return material::PerfectReflector{};
  field_error(path + ".type", "unknown permittivity type '" + type + "'");
}

inline Environment parse_environment(const json &j, std::string &name) {
  const std::string path = "environment";
  if (j.is_string()) {
    name = j.get<std::string>();
  } else {
    object(j, path);
    const json *t = find(j, "type");
    if (!t)
      field_error(path + ".type", "missing");
    name = string(*t, path + ".type");
  }
  if (name == "vacuum")
    return env::Vacuum{};
  if (name == "mirror")
    return env::PerfectMirror{};
  if (name == "halfspace") {
    if (!j.is_object() || !find(j, "permittivity"))
      field_error(path + ".permittivity", "missing for a half-space");
    return env::HalfSpace{parse_permittivity(j["permittivity"], path + ".permittivity")};
  }
  field_error(path + ".type", "expected vacuum, halfspace or mirror, got '" + name + "'");
}

inline BodyConfig parse_body(const json &j, const std::string &path, double lambda) {
  object(j, path);
  BodyConfig b;
  b.position = {lambda * number_or(j, "x", path, 0.0), lambda * number_or(j, "y", path, 0.0),
                lambda * require_number(j, "z", path)};
  if (const json *o = find(j, "orientation")) {
    if (!o->is_array() || o->size() != 3)
      field_error(path + ".orientation", "expected an array of three numbers");
    Vec3 d{number((*o)[0], path + ".orientation[0]"), number((*o)[1], path + ".orientation[1]"),
           number((*o)[2], path + ".orientation[2]")};
    if (!(d.norm() > 0.0))
      field_error(path + ".orientation", "must be non-zero");
    b.orientation = CVec3::from_real((1.0 / d.norm()) * d);
  }
  return b;
}

inline MediatorConfig parse_mediator(const json &j, const std::string &path, double lambda) {
  object(j, path);
  MediatorConfig m;
  m.position = {lambda * number_or(j, "x", path, 0.0), lambda * number_or(j, "y", path, 0.0),
                lambda * number_or(j, "z", path, 0.0)};
  const json *vol = find(j, "polarizability_volume");
  const json *lev = find(j, "two_level");
  if (vol && lev)
    field_error(path, "give either polarizability_volume or two_level, not both");
  if (vol) {
    const double v = number(*vol, path + ".polarizability_volume");
    if (v < 0.0)
      field_error(path + ".polarizability_volume", "must be non-negative");
    m.polarizability = polarizability_model::StaticScalar{alpha_from_volume(v * lambda * lambda * lambda)};
  } else if (lev) {
    auto one = [&](const json &t, const std::string &p) {
      object(t, p);
      polarizability_model::TwoLevel tl{require_number(t, "dipole_debye", p) * phys::debye,
                                        require_number(t, "energy_ev", p) * 1.602176634e-19};
      if (!(tl.energy > 0.0))
        field_error(p + ".energy_ev", "must be positive");
      return tl;
    };
    if (lev->is_array()) {
      polarizability_model::Sum s;
      for (std::size_t i = 0; i < lev->size(); ++i)
        s.push_back(one((*lev)[i], path + ".two_level[" + std::to_string(i) + "]"));
      m.polarizability = s;
    } else {
      m.polarizability = one(*lev, path + ".two_level");
    }
  } else {
    field_error(path + ".polarizability_volume", "missing (or give two_level)");
  }
  return m;
}

inline SweepSpec parse_sweep(const json &j, std::optional<std::string> &method) {
  const std::string path = "sweep";
  object(j, path);
  const json *t = find(j, "type");
  if (!t)
    field_error(path + ".type", "missing");
  const std::string type = string(*t, path + ".type");
  if (const json *m = find(j, "method"))
    method = string(*m, path + ".method");
  if (type == "z") {
    const json *steps = find(j, "steps");
    if (!steps)
      field_error(path + ".steps", "missing");
    return OneD{require_number(j, "min", path), require_number(j, "max", path),
                integer(*steps, path + ".steps")};
  }
  if (type == "map") {
    const json *nx = find(j, "nx");
    const json *nz = find(j, "nz");
    if (!nx || !nz)
      field_error(path + (nx ? ".nz" : ".nx"), "missing");
    return TwoD{require_number(j, "xmin", path), require_number(j, "xmax", path),
                require_number(j, "zmin", path), require_number(j, "zmax", path),
                integer(*nx, path + ".nx"), integer(*nz, path + ".nz"),
                number_or(j, "clip_radius", path, 0.15)};
  }
  field_error(path + ".type", "expected z or map, got '" + type + "'");
}

} // namespace detail

inline void validate(const SweepSpec &s) {
  std::visit(
      [](const auto &v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, OneD>) {
          if (!(v.min < v.max))
            throw Error(ErrorKind::Config, "sweep: min must be below max");
          if (v.steps < 2)
            throw Error(ErrorKind::Config, "sweep: steps must be at least 2");
        } else {
          if (!(v.xmin < v.xmax) || !(v.zmin < v.zmax))
            throw Error(ErrorKind::Config, "map: min must be below max on both axes");
          if (v.nx < 2 || v.nz < 2)
            throw Error(ErrorKind::Config, "map: nx and nz must be at least 2");
          if (!(v.clip_radius >= 0.0))
            throw Error(ErrorKind::Config, "map: clip_radius must be non-negative");
        }
      },
      s);
}

inline bool colinear(const SimulationConfig &c) {
  auto on_axis = [](Vec3 r) { return r.x == 0.0 && r.y == 0.0; };
  return on_axis(c.donor.position) && on_axis(c.acceptor.position);
}

/// Checks the invariants that span several fields.
inline void validate(const SimulationConfig &c) {
  const double lambda = c.wavelength();
  const double guard = min_separation_wavelengths * lambda;
  if (has_surface(c.environment)) {
    if (!(c.donor.position.z > 0.0))
      throw Error(ErrorKind::Config, "donor.z must be positive above a surface");
    if (!(c.acceptor.position.z > 0.0))
      throw Error(ErrorKind::Config, "acceptor.z must be positive above a surface");
  }
  if (distance(c.donor.position, c.acceptor.position) < guard)
    throw Error(ErrorKind::Config, "donor and acceptor closer than 1e-4 wavelengths");
  if (colinear(c) && !(c.donor.position.z < c.acceptor.position.z))
    throw Error(ErrorKind::Config, "colinear geometry requires donor.z < acceptor.z");
  if (c.sweep) {
    if (!c.mediator)
      throw Error(ErrorKind::Config, "a sweep moves the mediator, but no mediator is configured");
    validate(*c.sweep);
  }
  if (c.sweep_method && *c.sweep_method != "limits" && *c.sweep_method != "exact" &&
      *c.sweep_method != "both")
    throw Error(ErrorKind::Config, "sweep.method must be limits, exact or both");
  if (!(c.tolerance > 0.0 && c.tolerance < 1.0))
    throw Error(ErrorKind::Config, "tolerance must lie in (0, 1)");
  if (c.workers < 0)
    throw Error(ErrorKind::Config, "workers must be non-negative");
}

inline SimulationConfig parse_config(const std::string &text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::Config, "JSON syntax error at " + detail::line_col(text, e.byte) +
                                       ": " + e.what());
  }
  detail::object(j, "<root>");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char *known[] = {"environment", "lambda_nm", "omega",  "donor",
                                  "acceptor",    "mediator",  "dipoles", "method",
                                  "tolerance",   "sweep",     "workers", "comment"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char *k) { return it.key() == k; }) == std::end(known))
      detail::field_error(it.key(), "unknown field");
  }

  SimulationConfig c;
  const json *lam = detail::find(j, "lambda_nm");
  const json *om = detail::find(j, "omega");
  if (lam && om)
    detail::field_error("lambda_nm", "give either lambda_nm or omega, not both");
  if (lam) {
    const double l = detail::number(*lam, "lambda_nm");
    if (!(l > 0.0))
      detail::field_error("lambda_nm", "must be positive");
    c.omega = Frequency::from_wavelength(l * 1e-9);
  } else if (om) {
    const double w = detail::number(*om, "omega");
    if (!(w > 0.0))
      detail::field_error("omega", "must be positive");
    c.omega = Frequency(w);
  } else {
    detail::field_error("lambda_nm", "missing (or give omega in rad/s)");
  }
  const double lambda = c.wavelength();

  const json *e = detail::find(j, "environment");
  if (!e)
    detail::field_error("environment", "missing");
  c.environment = detail::parse_environment(*e, c.environment_name);

  for (const char *key : {"donor", "acceptor"})
    if (!detail::find(j, key))
      detail::field_error(key, "missing");
  c.donor = detail::parse_body(j["donor"], "donor", lambda);
  c.acceptor = detail::parse_body(j["acceptor"], "acceptor", lambda);
  if (const json *m = detail::find(j, "mediator"))
    c.mediator = detail::parse_mediator(*m, "mediator", lambda);

  if (const json *d = detail::find(j, "dipoles")) {
    if (d->is_string()) {
      if (d->get<std::string>() != "normalized")
        detail::field_error("dipoles", "expected \"normalized\" or an object");
    } else {
      detail::object(*d, "dipoles");
      c.d_donor = detail::require_number(*d, "donor_debye", "dipoles") * phys::debye;
      c.d_acceptor = detail::require_number(*d, "acceptor_debye", "dipoles") * phys::debye;
      if (!(c.d_donor > 0.0) || !(c.d_acceptor > 0.0))
        detail::field_error("dipoles", "magnitudes must be positive");
      c.normalized_only = false;
    }
  }
  if (const json *m = detail::find(j, "method")) {
    const std::string s = detail::string(*m, "method");
    if (s == "auto")
      c.method = ConfigMethod::Auto;
    else if (s == "limits")
      c.method = ConfigMethod::Limits;
    else if (s == "exact")
      c.method = ConfigMethod::Exact;
    else
      detail::field_error("method", "expected auto, limits or exact, got '" + s + "'");
  }
  if (const json *t = detail::find(j, "tolerance"))
    c.tolerance = detail::number(*t, "tolerance");
  if (const json *s = detail::find(j, "sweep"))
    c.sweep = detail::parse_sweep(*s, c.sweep_method);
  if (const json *w = detail::find(j, "workers"))
    c.workers = detail::integer(*w, "workers");

  validate(c);
  return c;
}

inline SimulationConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

} // namespace ret
