#pragma once

// Mediator-position sweeps (line and plane) and their CSV / JSON output.

#include "ret/config.hpp"
#include "ret/rates.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ret {

struct RateRecord {
  double x_m = 0.0; // mediator position, wavelengths
  double z_m = 0.0;
  double gamma = 0.0;
  double gamma_normalized = 0.0;
  std::string method;
  double error_estimate = 0.0;
  std::string flag = "ok";
  double gamma0 = 0.0; // not emitted per row
};

namespace flags {
inline constexpr const char *ok = "ok";
inline constexpr const char *near_zone = "near_zone_warning"; // limits with z_M - z_A < 1
inline constexpr const char *clipped = "clipped";
} // namespace flags

inline constexpr const char *csv_header = "x_m,z_m,gamma,gamma_normalized,method,error_estimate,flag";

//==============================================================================
// workers
//==============================================================================

inline int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Evaluates f(0..n-1) on up to `workers` threads. Results land at their own
/// index, so the output does not depend on scheduling.
template <class T, class F> std::vector<T> parallel_map(std::size_t n, int workers, F &&f) {
  std::vector<T> out(n);
  if (workers <= 0)
    workers = default_workers();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < n; i = next++)
          out[i] = f(i);
      } catch (...) {
        failures[t] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto &th : pool)
    th.join();
  for (auto &e : failures)
    if (e)
      std::rethrow_exception(e);
  return out;
}

//==============================================================================
// sweeps
//==============================================================================

namespace detail {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = i == n - 1 ? b : a + (b - a) * i / (n - 1);
  return v;
}

inline std::string error_flag(const Error &e) { return std::string("error:") + to_string(e.kind()); }

inline RateRecord failed_row(double x, double z, const char *method, std::string flag) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {x, z, nan, nan, method, nan, std::move(flag), nan};
}

/// One mediator placement against a baseline, with evaluation errors turned
/// into a flagged row.
inline RateRecord evaluate_point(const IsotropicBaseline &base, const MediatorConfig &med,
                                 double x_l, double z_l, double lambda) {
  const char *tag = to_string(base.method);
  try {
    Mediator m{Vec3{x_l * lambda, med.position.y, z_l * lambda}, med.polarizability};
    auto r = rate_isotropic(base, m);
    return {x_l, z_l, r.gamma, r.gamma_normalized, tag, r.error_estimate, flags::ok, r.gamma0};
  } catch (const Error &e) {
    return failed_row(x_l, z_l, tag, error_flag(e));
  }
}

inline std::vector<RateMethod> methods_for(const std::string &which) {
  if (which == "limits")
    return {RateMethod::Limits};
  if (which == "exact")
    return {RateMethod::Exact};
  if (which == "both")
    return {RateMethod::Limits, RateMethod::Exact};
  throw Error(ErrorKind::Config, "method must be limits, exact or both, got '" + which + "'");
}

inline std::string default_method(const SimulationConfig &c) {
  if (c.sweep_method)
    return *c.sweep_method;
  return c.method == ConfigMethod::Limits ? "limits" : "exact";
}

inline void require_mediator(const SimulationConfig &c) {
  if (!c.mediator)
    throw Error(ErrorKind::Config, "sweep requested but the config has no mediator");
}

} // namespace detail

/// Mediator moved along z at its configured x. One block of rows per method,
/// each normalized by its own mediator-free rate.
inline std::vector<RateRecord> sweep_1d(const SimulationConfig &c, const OneD &spec,
                                        const std::string &which, int workers) {
  detail::require_mediator(c);
  validate(SweepSpec{spec});
  const double lambda = c.wavelength();
  const auto zs = detail::linspace(spec.min, spec.max, spec.steps);
  const double x_l = c.mediator->position.x / lambda;
  const double z_a = c.acceptor.position.z / lambda;

  std::vector<RateRecord> out;
  for (RateMethod m : detail::methods_for(which)) {
    std::optional<IsotropicBaseline> base;
    std::string base_error;
    try {
      base = isotropic_baseline(c.d_acceptor, c.d_donor, {c.donor.position, c.acceptor.position},
                                c.environment, c.omega, m, c.eval_options());
    } catch (const Error &e) {
      base_error = detail::error_flag(e);
    }
    auto rows = parallel_map<RateRecord>(zs.size(), workers, [&](std::size_t i) {
      if (!base)
        return detail::failed_row(x_l, zs[i], to_string(m), base_error);
      auto r = detail::evaluate_point(*base, *c.mediator, x_l, zs[i], lambda);
      if (m == RateMethod::Limits && r.flag == flags::ok && zs[i] - z_a < 1.0)
        r.flag = flags::near_zone;
      return r;
    });
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

/// Mediator moved over the x-z plane (y fixed), exact Green's tensors. Rows run
/// over x fastest, then z. Cells within clip_radius of the donor or acceptor
/// are evaluated but flagged.
inline std::vector<RateRecord> sweep_2d(const SimulationConfig &c, const TwoD &spec, int workers) {
  detail::require_mediator(c);
  validate(SweepSpec{spec});
  const double lambda = c.wavelength();
  const auto xs = detail::linspace(spec.xmin, spec.xmax, spec.nx);
  const auto zs = detail::linspace(spec.zmin, spec.zmax, spec.nz);
  auto base = isotropic_baseline(c.d_acceptor, c.d_donor, {c.donor.position, c.acceptor.position},
                                 c.environment, c.omega, RateMethod::Exact, c.eval_options());
  const Vec3 d = (1.0 / lambda) * c.donor.position;
  const Vec3 a = (1.0 / lambda) * c.acceptor.position;
  const double y_l = c.mediator->position.y / lambda;

  return parallel_map<RateRecord>(xs.size() * zs.size(), workers, [&](std::size_t i) {
    const double x = xs[i % xs.size()], z = zs[i / xs.size()];
    auto r = detail::evaluate_point(base, *c.mediator, x, z, lambda);
    const Vec3 p{x, y_l, z};
    if (distance(p, d) < spec.clip_radius || distance(p, a) < spec.clip_radius)
      r.flag = flags::clipped;
    return r;
  });
}

//==============================================================================
// emission
//==============================================================================

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string &s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::Io, "malformed number '" + s + "'");
  return v;
}

enum class Format { Csv, Json };

struct EmitOptions {
  Format format = Format::Csv;
  /// "# key: value" lines written ahead of the CSV header (ignored for JSON,
  /// where they go under "metadata").
  std::vector<std::pair<std::string, std::string>> metadata;
};

inline std::string to_csv(const std::vector<RateRecord> &rows, const EmitOptions &opt = {}) {
  if (rows.empty())
    throw Error(ErrorKind::Io, "no records to emit");
  std::string s;
  for (const auto &[k, v] : opt.metadata)
    s += "# " + k + ": " + v + "\n";
  s += csv_header;
  s += '\n';
  for (const auto &r : rows) {
    s += format_double(r.x_m) + ',' + format_double(r.z_m) + ',' + format_double(r.gamma) + ',' +
         format_double(r.gamma_normalized) + ',' + r.method + ',' +
         format_double(r.error_estimate) + ',' + r.flag + '\n';
  }
  return s;
}

inline nlohmann::json to_json(const std::vector<RateRecord> &rows, const EmitOptions &opt = {}) {
  if (rows.empty())
    throw Error(ErrorKind::Io, "no records to emit");
  // non-finite values become null
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &r : rows) {
    arr.push_back({{"x_m", num(r.x_m)},
                   {"z_m", num(r.z_m)},
                   {"gamma", num(r.gamma)},
                   {"gamma_normalized", num(r.gamma_normalized)},
                   {"method", r.method},
                   {"error_estimate", num(r.error_estimate)},
                   {"flag", r.flag}});
  }
  if (opt.metadata.empty())
    return arr;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto &[k, v] : opt.metadata)
    meta[k] = v;
  return {{"metadata", meta}, {"records", arr}};
}

inline void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out)
    throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

inline void emit(const std::vector<RateRecord> &rows, const std::string &path,
                 const EmitOptions &opt = {}) {
  const std::string body =
      opt.format == Format::Csv ? to_csv(rows, opt) : to_json(rows, opt).dump(2) + "\n";
  write_file(path, body);
}

/// Inverse of to_csv; metadata comment lines are skipped.
inline std::vector<RateRecord> parse_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::vector<RateRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (!header) {
      if (line != csv_header)
        throw Error(ErrorKind::Io, "unexpected CSV header '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      f.push_back(cell);
    if (f.size() != 7)
      throw Error(ErrorKind::Io, "CSV row with " + std::to_string(f.size()) + " fields");
    RateRecord r;
    r.x_m = parse_double(f[0]);
    r.z_m = parse_double(f[1]);
    r.gamma = parse_double(f[2]);
    r.gamma_normalized = parse_double(f[3]);
    r.method = f[4];
    r.error_estimate = parse_double(f[5]);
    r.flag = f[6];
    rows.push_back(r);
  }
  if (!header)
    throw Error(ErrorKind::Io, "CSV has no header");
  return rows;
}

/// gnuplot script that plots a sweep CSV (line plot for z sweeps, heat map for
/// x-z maps).
inline std::string gnuplot_script(const std::string &csv_path, bool map, int nx = 0) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key autotitle columnhead\n";
  if (!map) {
    s << "set xlabel 'z_M / lambda_D'\nset ylabel 'Gamma / Gamma_0'\n"
      << "plot '" << csv_path << "' using 2:4 with lines\n";
  } else {
    s << "set xlabel 'x_M / lambda_D'\nset ylabel 'z_M / lambda_D'\nset view map\n"
      << "set cbrange [0.8:1.2]\n"
      << "# rows run over x fastest; " << nx << " points per z line\n"
      << "plot '" << csv_path << "' using 1:2:(stringcolumn(7) eq 'ok' ? $4 : NaN) with image\n";
  }
  return s.str();
}

} // namespace ret
