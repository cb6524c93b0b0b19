// Command-line front end: single rates, mediator sweeps, tensor dumps and the
// oracle suite.

#include "ret/config.hpp"
#include "ret/greens.hpp"
#include "ret/rates.hpp"
#include "ret/sweep.hpp"
#include "ret/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>

using namespace ret;
using nlohmann::json;

namespace {

struct OutputFlags {
  std::string out;
  std::string format = "csv";
  bool metadata = false;
  std::string gnuplot;
  int workers = -1;
};

void add_output_flags(CLI::App *cmd, OutputFlags &o) {
  cmd->add_option("--out", o.out, "output file")->required();
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--metadata", o.metadata, "write '# key: value' lines ahead of the CSV header");
  cmd->add_option("--gnuplot", o.gnuplot, "also write a gnuplot script to this path");
  cmd->add_option("--workers", o.workers, "worker threads (0 = all cores; default from config)");
}

std::string lambda_units(const Vec3 &r, double lambda) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%s, %s, %s)", format_double(r.x / lambda).c_str(),
                format_double(r.y / lambda).c_str(), format_double(r.z / lambda).c_str());
  return buf;
}

std::vector<std::pair<std::string, std::string>> metadata(const SimulationConfig &c,
                                                          const std::vector<RateRecord> &rows) {
  const double lambda = c.wavelength();
  std::vector<std::pair<std::string, std::string>> m{
      {"environment", c.environment_name},
      {"lambda_D_m", format_double(lambda)},
      {"donor_position_lambda", lambda_units(c.donor.position, lambda)},
      {"acceptor_position_lambda", lambda_units(c.acceptor.position, lambda)}};
  std::string last;
  for (const auto &r : rows) {
    if (r.method != last && std::isfinite(r.gamma0)) {
      m.emplace_back("gamma0_" + r.method + "_per_s", format_double(r.gamma0));
      last = r.method;
    }
  }
  return m;
}

void write_outputs(const SimulationConfig &c, const std::vector<RateRecord> &rows,
                   const OutputFlags &o, bool map, int nx) {
  EmitOptions opt;
  opt.format = o.format == "json" ? Format::Json : Format::Csv;
  if (o.metadata)
    opt.metadata = metadata(c, rows);
  emit(rows, o.out, opt);
  if (!o.gnuplot.empty())
    write_file(o.gnuplot, gnuplot_script(o.out, map, nx));
  std::size_t ok = 0;
  for (const auto &r : rows)
    ok += r.flag.rfind("error", 0) != 0;
  std::cerr << "wrote " << rows.size() << " rows (" << rows.size() - ok << " failed) to " << o.out
            << "\n";
}

int workers_for(const SimulationConfig &c, const OutputFlags &o) {
  return o.workers >= 0 ? o.workers : c.workers;
}

json rate_json(const RateResult &r) {
  return {{"gamma", r.gamma},
          {"gamma_normalized", r.gamma_normalized},
          {"gamma0", r.gamma0},
          {"error_estimate", r.error_estimate}};
}

int cmd_rate(const std::string &path) {
  const auto c = load_config(path);
  const RateMethod m = resolve(c.method);
  std::optional<Mediator> med;
  if (c.mediator)
    med = Mediator{c.mediator->position, c.mediator->polarizability};
  auto iso = rate_isotropic(c.d_acceptor, c.d_donor, {c.donor.position, c.acceptor.position}, med,
                            c.environment, c.omega, m, c.eval_options());
  json out{{"environment", c.environment_name},
           {"method", to_string(m)},
           {"lambda_D_m", c.wavelength()},
           {"isotropic", rate_json(iso)}};
  if (c.donor.orientation && c.acceptor.orientation) {
    Dipole d{c.donor.position, c.d_donor * *c.donor.orientation, Role::Donor};
    Dipole a{c.acceptor.position, c.d_acceptor * *c.acceptor.orientation, Role::Acceptor};
    auto r = rate_oriented(d, a, med, c.environment, c.omega, m, c.eval_options());
    json o = rate_json(r);
    o["matrix_element_direct"] = {r.matrix_element_direct.real(), r.matrix_element_direct.imag()};
    o["matrix_element_indirect"] = {r.matrix_element_indirect.real(),
                                    r.matrix_element_indirect.imag()};
    out["oriented"] = o;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

Environment environment_from_flags(const std::string &name, double eps_re, double eps_im) {
  if (name == "vacuum")
    return env::Vacuum{};
  if (name == "mirror")
    return env::PerfectMirror{};
  return env::HalfSpace{material::Constant{cplx{eps_re, eps_im}}};
}

Method method_from_flag(const std::string &s) {
  if (s == "nr")
    return Method::NonRetardedLimit;
  if (s == "r")
    return Method::RetardedLimit;
  if (s == "auto")
    return Method::Auto;
  return Method::Exact;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Resonance energy transfer near surfaces, with a polarizable mediator"};
  app.require_subcommand(1);

  std::string config;

  auto *rate = app.add_subcommand("rate", "single-point rate, JSON on stdout");
  rate->add_option("--config", config, "JSON config")->required();

  OutputFlags zflags;
  double zmin = 0, zmax = 0;
  int steps = 0;
  std::string zmethod;
  auto *sweep = app.add_subcommand("sweep-z", "move the mediator along z");
  sweep->add_option("--config", config, "JSON config")->required();
  auto *o_zmin = sweep->add_option("--zmin", zmin, "lower z_M, wavelengths");
  auto *o_zmax = sweep->add_option("--zmax", zmax, "upper z_M, wavelengths");
  auto *o_steps = sweep->add_option("--steps", steps, "number of points");
  sweep->add_option("--method", zmethod, "limits, exact or both")
      ->check(CLI::IsMember({"limits", "exact", "both"}));
  add_output_flags(sweep, zflags);

  OutputFlags mflags;
  double xmin = 0, xmax = 0, mzmin = 0, mzmax = 0, clip = 0.15;
  int nx = 0, nz = 0;
  auto *map = app.add_subcommand("map", "move the mediator over the x-z plane");
  map->add_option("--config", config, "JSON config")->required();
  auto *o_xmin = map->add_option("--xmin", xmin, "wavelengths");
  auto *o_xmax = map->add_option("--xmax", xmax, "wavelengths");
  auto *o_mzmin = map->add_option("--zmin", mzmin, "wavelengths");
  auto *o_mzmax = map->add_option("--zmax", mzmax, "wavelengths");
  auto *o_nx = map->add_option("--nx", nx, "points along x");
  auto *o_nz = map->add_option("--nz", nz, "points along z");
  auto *o_clip = map->add_option("--clip-radius", clip, "flag radius around donor and acceptor");
  add_output_flags(map, mflags);

  std::string genv = "vacuum", gpart = "total", gmethod = "exact";
  double eps_re = 2.0, eps_im = 0.0, lambda_nm = 500.0;
  double rx = 0, ry = 0, rz = 0, rpx = 0, rpy = 0, rpz = 0;
  auto *green = app.add_subcommand("green", "print one Green's tensor (positions in wavelengths)");
  green->add_option("--env", genv, "vacuum, mirror or halfspace")
      ->check(CLI::IsMember({"vacuum", "mirror", "halfspace"}));
  green->add_option("--eps-re", eps_re, "half-space permittivity, real part");
  green->add_option("--eps-im", eps_im, "half-space permittivity, imaginary part");
  green->add_option("--lambda-nm", lambda_nm, "wavelength in nm");
  green->add_option("--rx", rx)->required();
  green->add_option("--ry", ry)->required();
  green->add_option("--rz", rz)->required();
  green->add_option("--rpx", rpx)->required();
  green->add_option("--rpy", rpy)->required();
  green->add_option("--rpz", rpz)->required();
  green->add_option("--part", gpart, "bulk, scatter or total")
      ->check(CLI::IsMember({"bulk", "scatter", "total"}));
  green->add_option("--method", gmethod, "exact, nr, r or auto")
      ->check(CLI::IsMember({"exact", "nr", "r", "auto"}));

  std::string vjson;
  auto *verify = app.add_subcommand("verify", "run the oracle suite");
  verify->add_option("--json", vjson, "also write the JSON report to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rate)
      return cmd_rate(config);

    if (*sweep) {
      auto c = load_config(config);
      if (!c.mediator)
        throw Error(ErrorKind::Config, "sweep-z needs a mediator in the config");
      OneD spec{1.2, 3.0, 400};
      if (c.sweep && std::holds_alternative<OneD>(*c.sweep))
        spec = std::get<OneD>(*c.sweep);
      if (*o_zmin)
        spec.min = zmin;
      if (*o_zmax)
        spec.max = zmax;
      if (*o_steps)
        spec.steps = steps;
      const std::string which = zmethod.empty() ? detail::default_method(c) : zmethod;
      auto rows = sweep_1d(c, spec, which, workers_for(c, zflags));
      write_outputs(c, rows, zflags, false, 0);
      return 0;
    }

    if (*map) {
      auto c = load_config(config);
      if (!c.mediator)
        throw Error(ErrorKind::Config, "map needs a mediator in the config");
      TwoD spec{-3.0, 3.0, 0.1, 4.0, 60, 60, 0.15};
      if (c.sweep && std::holds_alternative<TwoD>(*c.sweep))
        spec = std::get<TwoD>(*c.sweep);
      if (*o_xmin) spec.xmin = xmin;
      if (*o_xmax) spec.xmax = xmax;
      if (*o_mzmin) spec.zmin = mzmin;
      if (*o_mzmax) spec.zmax = mzmax;
      if (*o_nx) spec.nx = nx;
      if (*o_nz) spec.nz = nz;
      if (*o_clip) spec.clip_radius = clip;
      auto rows = sweep_2d(c, spec, workers_for(c, mflags));
      write_outputs(c, rows, mflags, true, spec.nx);
      return 0;
    }

    if (*green) {
      const Frequency w = Frequency::from_wavelength(lambda_nm * 1e-9);
      const double lam = w.wavelength();
      const Part part = gpart == "bulk" ? Part::Bulk : gpart == "scatter" ? Part::Scatter : Part::Total;
      GreensRequest req{{rx * lam, ry * lam, rz * lam}, {rpx * lam, rpy * lam, rpz * lam}, w, part,
                        method_from_flag(gmethod)};
      auto g = green_total(environment_from_flags(genv, eps_re, eps_im), req);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const cplx v = g.value(i, j);
          std::printf("%s%+.16e%+.16ei", j ? "  " : "", v.real(), v.imag());
        }
        std::printf("\n");
      }
      std::printf("error_estimate %.16e\n", g.error_estimate);
      return 0;
    }

    if (*verify) {
      auto reports = oracle::verification_suite();
      std::cout << oracle::format_table(reports) << "\n";
      json arr = json::array();
      bool all = true;
      for (const auto &r : reports) {
        arr.push_back({{"name", r.name},
                       {"inputs", r.inputs},
                       {"reference", r.reference},
                       {"test", r.test},
                       {"relative_error", r.relative_error},
                       {"tolerance", r.tolerance},
                       {"passed", r.passed},
                       {"detail", r.detail}});
        all = all && r.passed;
      }
      json doc{{"passed", all}, {"checks", arr}};
      std::cout << doc.dump(2) << "\n";
      if (!vjson.empty())
        write_file(vjson, doc.dump(2) + "\n");
      return all ? 0 : 1;
    }
  } catch (const Error &e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.message() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
