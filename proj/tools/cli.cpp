#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nlok/diagnostics.hpp"
#include "nlok/error.hpp"
#include "nlok/functionals.hpp"
#include "nlok/geometry_io.hpp"
#include "nlok/onedim.hpp"
#include "nlok/parallel.hpp"
#include "nlok/shapeopt.hpp"

#ifndef NLOK_VERSION
#define NLOK_VERSION "unknown"
#endif

namespace nlok::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what, int line) {
  throw ConfigError(key + ": " + what, line, key);
}

double to_double(const std::string& key, const std::string& v, int line) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + v + "'", line);
  }
  if (pos != v.size()) bad(key, "expected a number, got '" + v + "'", line);
  return x;
}

long to_integer(const std::string& key, const std::string& v, int line) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    bad(key, "expected an integer, got '" + v + "'", line);
  }
  if (pos != v.size()) bad(key, "expected an integer, got '" + v + "'", line);
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> number_list(const std::string& key, const std::string& v, char sep, int line) {
  std::vector<double> out;
  for (const auto& item : split(v, sep)) out.push_back(to_double(key, item, line));
  return out;
}

double positive(const std::string& key, double x, int line) {
  if (!(x > 0.0) || !std::isfinite(x)) bad(key, "must be positive and finite", line);
  return x;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- output

struct Output {
  std::ostringstream csv;
  Json summary = Json::object();
  std::vector<std::pair<std::string, std::string>> extra_files;
};

Json params_json(const Params& p) {
  Json j;
  j["n"] = p.n;
  j["s"] = p.s;
  j["alpha"] = p.alpha;
  j["eps"] = p.eps;
  j["mass"] = p.mass ? Json(*p.mass) : Json(nullptr);
  j["c_coupling"] = p.c_coupling;
  j["c_var"] = p.c_var;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string() + ": output directory not writable");
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::filesystem::path prepare_output(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("output directory not writable: " + cfg.output_dir, 0, "output");
  }
  return dir;
}

// ---------------------------------------------------------------- geometry

SetGeometry load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("this command needs an input geometry", 0, "input");
  return read_geometry(cfg.input);
}

Params params_for(const RunConfig& cfg, const SetGeometry& set) {
  Params p = cfg.params;
  const int n = dimension(set);
  if (cfg.n_explicit && p.n != n) {
    throw ConfigError("n = " + std::to_string(p.n) + " does not match the geometry dimension " +
                          std::to_string(n),
                      0, "n");
  }
  p.n = n;
  if (p.mass) p = p.with_mass(*p.mass);
  p.validate();
  return p;
}

Params params_fixed_n(const RunConfig& cfg, int n) {
  Params p = cfg.params;
  if (cfg.n_explicit && p.n != n) {
    throw ConfigError(cfg.command + " needs n = " + std::to_string(n), 0, "n");
  }
  p.n = n;
  if (p.mass) p = p.with_mass(*p.mass);
  p.validate();
  return p;
}

// ---------------------------------------------------------------- commands

void cmd_energy(const RunConfig& cfg, Output& out) {
  const auto set = load_input(cfg);
  const Params p = params_for(cfg, set);
  const auto e = energy(set, p, cfg.resolution);
  const auto pe = frac_perimeter_estimate(set, p.s, cfg.resolution);
  const auto re = riesz_energy_estimate(set, p.alpha, cfg.resolution);
  out.csv << "perimeter_term,riesz_term,total_F,total_F_eps,eps_used,perimeter_error,riesz_error\n";
  out.csv << fmt(e.perimeter_term) << ',' << fmt(e.riesz_term) << ',' << fmt(e.total_F) << ','
          << fmt(e.total_F_eps) << ',' << fmt(e.eps_used) << ',' << fmt(pe.error) << ',' << fmt(re.error) << '\n';
  out.summary["total_F"] = e.total_F;
  out.summary["total_F_eps"] = e.total_F_eps;
}

double oracle_curvature_1d(const IntervalSet& set, double x, double s, const QuadTolerance& tol) {
  ScalarIntegrand f;
  f.f = [&set, x, s](std::span<const double> y) {
    const double sign = set.contains(y[0]) ? -1.0 : 1.0;
    return sign * std::pow(std::abs(y[0] - x), -1.0 - s);
  };
  f.breakpoints = set.endpoints();
  f.decay = 1.0 + s;
  double gap = std::numeric_limits<double>::infinity();
  for (double e : f.breakpoints) {
    if (e != x) gap = std::min(gap, std::abs(e - x));
  }
  PVSpec pv;
  pv.singular_point = {x};
  pv.pairing_radius = std::isfinite(gap) ? 0.5 * gap : 1.0;
  const double inf = std::numeric_limits<double>::infinity();
  return brute_oracle(f, Box{{{-inf, inf}}}, tol, pv).estimate;
}

void cmd_curvature(const RunConfig& cfg, Output& out) {
  const auto set = load_input(cfg);
  const Params p = params_for(cfg, set);
  const auto fields = boundary_fields(set, p, cfg.resolution, true);
  const auto& mesh = fields.mesh;
  std::vector<double> oracle;
  if (cfg.oracle) {
    oracle.resize(mesh.size());
    if (p.n == 1) {
      const IntervalSet iv =
          std::holds_alternative<IntervalSet>(set) ? std::get<IntervalSet>(set) : as_intervals(std::get<Ball>(set));
      parallel_for(mesh.size(), [&](std::size_t j) {
        oracle[j] = oracle_curvature_1d(iv, mesh.points[j].x, p.s, cfg.tolerances);
      });
    } else {
      const StarShape2D star = std::holds_alternative<StarShape2D>(set)
                                   ? std::get<StarShape2D>(set)
                                   : as_star(std::get<Ball>(set), cfg.resolution);
      parallel_for(mesh.size(), [&](std::size_t j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(mesh.size());
        oracle[j] = oracle_curvature_star(star, theta, p.s, cfg.tolerances).estimate;
      });
    }
  }
  out.csv << "node,x,y,kappa,V,grad_tau,zeta" << (cfg.oracle ? ",kappa_oracle" : "") << '\n';
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const double gt =
        fields.grad_tangential.empty() ? std::numeric_limits<double>::quiet_NaN() : fields.grad_tangential[j];
    out.csv << j << ',' << fmt(mesh.points[j].x) << ',' << fmt(mesh.points[j].y) << ',' << fmt(fields.kappa[j])
            << ',' << fmt(fields.potential[j]) << ',' << fmt(gt) << ',' << fmt(fields.zeta[j]);
    if (cfg.oracle) out.csv << ',' << fmt(oracle[j]);
    out.csv << '\n';
  }
  out.summary["nodes"] = mesh.size();
}

void cmd_potential(const RunConfig& cfg, Output& out) {
  const auto set = load_input(cfg);
  const Params p = params_for(cfg, set);
  if (cfg.points.empty()) throw ConfigError("potential needs at least one evaluation point", 0, "points");
  const int n = p.n;
  out.csv << "index";
  for (int k = 0; k < n; ++k) out.csv << ",x" << k;
  out.csv << ",V";
  for (int k = 0; k < n; ++k) out.csv << ",grad" << k;
  out.csv << '\n';
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const auto& x = cfg.points[i];
    if (static_cast<int>(x.size()) != n) {
      throw ConfigError("point " + std::to_string(i) + " has the wrong dimension", 0, "points");
    }
    const double v = potential(set, x, p.alpha, cfg.resolution);
    std::vector<double> g(n, std::numeric_limits<double>::quiet_NaN());
    try {
      g = grad_potential(set, x, p.alpha, cfg.resolution);
    } catch (const DomainError&) {
      // Divergent regime at a boundary point: reported as nan.
    }
    out.csv << i;
    for (double c : x) out.csv << ',' << fmt(c);
    out.csv << ',' << fmt(v);
    for (double c : g) out.csv << ',' << fmt(c);
    out.csv << '\n';
  }
  out.summary["points"] = cfg.points.size();
}

void cmd_diagnose(const RunConfig& cfg, Output& out) {
  const auto set = load_input(cfg);
  const Params p = params_for(cfg, set);
  DiagnoseOptions opts;
  opts.identity.probes = cfg.probes;
  opts.identity.seed = cfg.seed;
  for (const auto& name : cfg.identities) opts.identities.push_back(identity_kind_from_string(name));
  const auto report = diagnose(set, p, cfg.resolution, opts);
  out.csv << DiagnosticsReport::csv_header() << '\n' << report.csv_row() << '\n';
  out.summary["report"] = Json::parse(report.to_json());
}

void cmd_onedim_root(const RunConfig& cfg, Output& out) {
  const Params p = params_fixed_n(cfg, 1);
  const auto root = solve_critical_d(p);
  const auto z = zeta_endpoints({root.d_star, p});
  const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
  out.csv << "eps,d_star,d_eps,diameter,f_at_root,residual\n";
  out.csv << fmt(p.eps) << ',' << fmt(root.d_star) << ',' << fmt(root.d_eps) << ',' << fmt(root.d_star + 0.5)
          << ',' << fmt(root.f_at_root) << ',' << fmt(*mx - *mn) << '\n';
  out.summary["d_star"] = root.d_star;
  out.summary["d_eps"] = root.d_eps;
  out.summary["probes"] = root.probes;
  out.summary["bisections"] = root.bisections;
}

void cmd_onedim_sweep(const RunConfig& cfg, Output& out) {
  const Params p = params_fixed_n(cfg, 1);
  const auto grid = geometric_grid(cfg.sweep_eps_first, cfg.sweep_eps_last, cfg.sweep_count);
  const auto sweep = epsilon_sweep(p, grid);
  out.csv << "eps,d_star,d_eps,diameter,f_at_root,residual\n";
  for (const auto& r : sweep.records) {
    if (!r.ok) continue;
    out.csv << fmt(r.eps) << ',' << fmt(r.d_star) << ',' << fmt(r.d_eps) << ',' << fmt(r.diameter) << ','
            << fmt(r.f_at_root) << ',' << fmt(r.residual) << '\n';
  }
  Json failures = Json::array();
  for (const auto& r : sweep.records) {
    if (!r.ok) failures.push_back({{"eps", r.eps}, {"error", r.error}});
  }
  out.summary["slope"] = sweep.slope;
  out.summary["target_slope"] = sweep.target_slope;
  out.summary["rel_error"] = sweep.rel_error;
  out.summary["C_o_implied"] = sweep.c_o_implied;
  out.summary["successes"] = sweep.successes;
  out.summary["failures"] = failures;
  out.summary["eps_bar"] = empirical_eps_bar(p);
}

void cmd_optimize2d(const RunConfig& cfg, Output& out) {
  const Params p = params_fixed_n(cfg, 2);
  StarShape2D init = [&] {
    if (!cfg.input.empty()) {
      const auto g = read_geometry(cfg.input);
      if (const auto* s = std::get_if<StarShape2D>(&g)) return s->resampled(cfg.resolution);
      if (const auto* b = std::get_if<Ball>(&g); b && b->dim() == 2) return as_star(*b, cfg.resolution);
      throw ConfigError("optimize2d needs a star-shaped or disk initial geometry", 0, "input");
    }
    FourierCoefficients c;
    c.r0 = 1.0;
    if (cfg.init_mode > 0) c.a.assign(static_cast<std::size_t>(cfg.init_mode), 0.0);
    if (cfg.init_mode > 0) c.a.back() = cfg.init_amplitude;
    return fourier_shape(c, cfg.resolution);
  }();
  init = volume_project(init);
  OptimizerOptions o;
  o.resolution = cfg.resolution;
  o.max_modes = cfg.modes;
  o.tol = cfg.opt_tol;
  o.max_iter = cfg.max_iter;
  o.step_initial = cfg.step;
  o.step_max = std::max(o.step_max, cfg.step);
  for (const auto& name : cfg.identities) o.identities.push_back(identity_kind_from_string(name));
  const auto result = find_critical_2d(init, p, o);
  const auto& st = result.state;
  out.csv << "iteration,residual,energy\n";
  for (std::size_t i = 0; i < st.residual_history.size(); ++i) {
    const double e = i < st.energy_history.size() ? st.energy_history[i] : std::numeric_limits<double>::quiet_NaN();
    out.csv << i << ',' << fmt(st.residual_history[i]) << ',' << fmt(e) << '\n';
  }
  out.summary["converged"] = result.converged;
  out.summary["iterations"] = st.iteration;
  out.summary["final_step"] = st.step_size;
  out.summary["volume_drift"] = st.volume_drift;
  out.summary["report"] = Json::parse(result.report.to_json());
  out.extra_files.emplace_back("optimize2d_shape.json", geometry_to_json(result.shape));
  if (!result.converged) throw DomainError("optimize2d did not reach tol within max_iter");
}

void cmd_calibrate(const RunConfig& cfg, Output& out) {
  const Params p = params_fixed_n(cfg, cfg.n_explicit ? cfg.params.n : 2);
  out.csv << "n,s,radius,c_var\n";
  Json values = Json::array();
  for (double r : cfg.radii) {
    const double c = calibrate_variation_constant(p.s, p.n, r, cfg.resolution);
    out.csv << p.n << ',' << fmt(p.s) << ',' << fmt(r) << ',' << fmt(c) << '\n';
    values.push_back(c);
  }
  out.summary["c_var"] = values;
}

void dispatch(const RunConfig& cfg, Output& out) {
  const auto& c = cfg.command;
  if (c == "energy") return cmd_energy(cfg, out);
  if (c == "curvature") return cmd_curvature(cfg, out);
  if (c == "potential") return cmd_potential(cfg, out);
  if (c == "diagnose") return cmd_diagnose(cfg, out);
  if (c == "onedim-root") return cmd_onedim_root(cfg, out);
  if (c == "onedim-sweep") return cmd_onedim_sweep(cfg, out);
  if (c == "optimize2d") return cmd_optimize2d(cfg, out);
  if (c == "calibrate") return cmd_calibrate(cfg, out);
  throw ConfigError("unknown command '" + c + "'", 0, "command");
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  const std::string v = trim(value);
  auto& p = cfg.params;
  if (key == "command") {
    if (std::find(kCommands.begin(), kCommands.end(), v) == kCommands.end()) bad(key, "unknown command '" + v + "'", line);
    cfg.command = v;
  } else if (key == "n") {
    const long n = to_integer(key, v, line);
    if (n < 1) bad(key, "must be a positive integer", line);
    p.n = static_cast<int>(n);
    cfg.n_explicit = true;
  } else if (key == "s") {
    const double s = to_double(key, v, line);
    if (!(s > 0.0 && s < 1.0)) bad(key, "s must lie in (0,1)", line);
    p.s = s;
  } else if (key == "alpha") {
    const double a = to_double(key, v, line);
    if (!(a > 0.0) || !std::isfinite(a)) bad(key, "alpha must lie in (0,n)", line);
    p.alpha = a;
  } else if (key == "eps") {
    const double e = to_double(key, v, line);
    if (!(e >= 0.0) || !std::isfinite(e)) bad(key, "eps must be nonnegative", line);
    p.eps = e;
    p.mass.reset();
  } else if (key == "mass") {
    p.mass = positive(key, to_double(key, v, line), line);
  } else if (key == "c") {
    p.c_coupling = positive(key, to_double(key, v, line), line);
  } else if (key == "c_var") {
    p.c_var = positive(key, to_double(key, v, line), line);
  } else if (key == "input") {
    cfg.input = v;
  } else if (key == "output") {
    if (v.empty()) bad(key, "must not be empty", line);
    cfg.output_dir = v;
  } else if (key == "resolution") {
    const long m = to_integer(key, v, line);
    if (m < 8 || m % 2 != 0 || m > (1 << 16)) bad(key, "must be even and in [8, 65536]", line);
    cfg.resolution = static_cast<std::size_t>(m);
  } else if (key == "rel_tol") {
    cfg.tolerances.rel_tol = positive(key, to_double(key, v, line), line);
  } else if (key == "abs_tol") {
    cfg.tolerances.abs_tol = positive(key, to_double(key, v, line), line);
  } else if (key == "max_subdivisions") {
    const long k = to_integer(key, v, line);
    if (k < 1) bad(key, "must be at least 1", line);
    cfg.tolerances.max_subdivisions = static_cast<int>(k);
  } else if (key == "sweep_eps_first") {
    cfg.sweep_eps_first = positive(key, to_double(key, v, line), line);
  } else if (key == "sweep_eps_last") {
    cfg.sweep_eps_last = positive(key, to_double(key, v, line), line);
  } else if (key == "sweep_count") {
    const long k = to_integer(key, v, line);
    if (k < 2) bad(key, "must be at least 2", line);
    cfg.sweep_count = static_cast<std::size_t>(k);
  } else if (key == "modes") {
    const long k = to_integer(key, v, line);
    if (k < 1) bad(key, "must be at least 1", line);
    cfg.modes = static_cast<std::size_t>(k);
  } else if (key == "tol") {
    const double t = to_double(key, v, line);
    if (!(t > 0.0)) bad(key, "must be positive", line);
    cfg.opt_tol = t;
  } else if (key == "max_iter") {
    const long k = to_integer(key, v, line);
    if (k < 0) bad(key, "must be nonnegative", line);
    cfg.max_iter = static_cast<int>(k);
  } else if (key == "step") {
    cfg.step = positive(key, to_double(key, v, line), line);
  } else if (key == "init_mode") {
    const long k = to_integer(key, v, line);
    if (k < 0) bad(key, "must be nonnegative", line);
    cfg.init_mode = static_cast<int>(k);
  } else if (key == "init_amplitude") {
    cfg.init_amplitude = to_double(key, v, line);
  } else if (key == "identities") {
    cfg.identities = split(v, ',');
    for (const auto& name : cfg.identities) {
      try {
        identity_kind_from_string(name);
      } catch (const InvalidArgument&) {
        bad(key, "unknown identity '" + name + "'", line);
      }
    }
  } else if (key == "probes") {
    const long k = to_integer(key, v, line);
    if (k < 1) bad(key, "must be at least 1", line);
    cfg.probes = static_cast<std::size_t>(k);
  } else if (key == "seed") {
    const long k = to_integer(key, v, line);
    if (k < 0) bad(key, "must be nonnegative", line);
    cfg.seed = static_cast<std::uint64_t>(k);
  } else if (key == "points") {
    cfg.points.clear();
    for (const auto& pt : split(v, ';')) cfg.points.push_back(number_list(key, pt, ' ', line));
  } else if (key == "oracle") {
    if (v == "true" || v == "1") {
      cfg.oracle = true;
    } else if (v == "false" || v == "0") {
      cfg.oracle = false;
    } else {
      bad(key, "expected true or false", line);
    }
  } else if (key == "radii") {
    cfg.radii = number_list(key, v, ',', line);
    if (cfg.radii.empty()) bad(key, "needs at least one radius", line);
    for (double r : cfg.radii) positive(key, r, line);
  } else {
    throw ConfigError("unknown key '" + key + "'", line, key);
  }
}

void parse_config(RunConfig& cfg, std::istream& in) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key=value", line);
    }
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key", line);
    try {
      apply_setting(cfg, key, text.substr(eq + 1), line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + e.what(), line, e.key());
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path);
  RunConfig cfg;
  parse_config(cfg, in);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.command.empty()) throw ConfigError("no command given", 0, "command");
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
    throw ConfigError("unknown command '" + cfg.command + "'", 0, "command");
  }
  if (!(cfg.params.alpha < cfg.params.n)) {
    throw ConfigError("alpha must lie in (0,n)", 0, "alpha");
  }
  const bool needs_input = cfg.command == "energy" || cfg.command == "curvature" || cfg.command == "potential" ||
                           cfg.command == "diagnose";
  if (needs_input && cfg.input.empty()) throw ConfigError("this command needs an input geometry", 0, "input");
  if (!cfg.input.empty() && !std::filesystem::exists(cfg.input)) throw FileNotFound(cfg.input);
}

int run_command(const RunConfig& cfg, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Output out;
  int status = 0;
  std::string message;
  try {
    validate(cfg);
    const auto dir = prepare_output(cfg);
    try {
      dispatch(cfg, out);
    } catch (const DomainError& e) {
      status = 1;
      message = e.what();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json meta;
    meta["command"] = cfg.command;
    meta["status"] = status;
    if (status != 0) meta["error"] = message;
    meta["version"] = NLOK_VERSION;
    meta["params"] = params_json(cfg.params);
    meta["input"] = cfg.input;
    meta["resolution"] = cfg.resolution;
    meta["tolerances"] = {{"rel_tol", cfg.tolerances.rel_tol},
                          {"abs_tol", cfg.tolerances.abs_tol},
                          {"max_subdivisions", cfg.tolerances.max_subdivisions}};
    meta["threads"] = thread_count();
    meta["wall_time_s"] = wall;
    meta["summary"] = out.summary;
    if (!out.csv.str().empty()) write_file(dir / (cfg.command + ".csv"), out.csv.str());
    write_file(dir / (cfg.command + ".json"), meta.dump(2) + "\n");
    for (const auto& [name, text] : out.extra_files) write_file(dir / name, text);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (status != 0) err << "error: " << message << '\n';
  return status;
}

}  // namespace nlok::cli
