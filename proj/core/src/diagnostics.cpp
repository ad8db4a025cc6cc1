#include "nlok/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "json.hpp"
#include "nlok/error.hpp"
#include "nlok/numeric.hpp"
#include "nlok/parallel.hpp"
#include "nlok/quad.hpp"

namespace nlok {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_residual(double lhs, double rhs, double floor = 1e-300) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), floor});
}

// Concrete 1D or 2D representation; n >= 3 balls are rejected by callers.
struct Concrete {
  std::optional<IntervalSet> line;
  std::optional<StarShape2D> star;
};

Concrete concretize(const SetGeometry& set, std::size_t resolution, const char* what) {
  Concrete c;
  if (const auto* iv = std::get_if<IntervalSet>(&set)) {
    c.line = *iv;
  } else if (const auto* st = std::get_if<StarShape2D>(&set)) {
    c.star = *st;
  } else {
    const auto& b = std::get<Ball>(set);
    if (b.dim() == 1) {
      c.line = as_intervals(b);
    } else if (b.dim() == 2) {
      c.star = as_star(b, resolution);
    } else {
      throw InvalidArgument(std::string(what) + ": balls with n >= 3 are not supported");
    }
  }
  return c;
}

double boundary_moment(const BoundaryMesh& mesh, std::span<const double> values) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const Vec2 x = mesh.points[j];
    acc.add(values[j] * dot(x, mesh.normals[j]) * mesh.weights[j]);
  }
  return acc.value();
}

double weighted_mean(const BoundaryMesh& mesh, std::span<const double> values) {
  CompensatedSum num, den;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    num.add(mesh.weights[j] * values[j]);
    den.add(mesh.weights[j]);
  }
  return num.value() / den.value();
}

double tangential_sup(const StarShape2D& shape, double alpha, std::size_t resolution) {
  const auto mesh = boundary_mesh(shape, resolution);
  const auto g = grad_potential_on_mesh(mesh, alpha);
  double sup = 0.0;
  for (std::size_t j = 0; j < mesh.size(); ++j) sup = std::max(sup, std::abs(dot(g[j], mesh.tangents[j])));
  return sup;
}

// ---------------------------------------------------------------- identities, 1D

IdentityResult au1_line(const IntervalSet& set, const Params& p) {
  QuadTolerance tol;
  tol.rel_tol = 1e-12;
  tol.abs_tol = 1e-14;
  // V' blows up like |x - e|^{-alpha} at each endpoint e; on each half
  // interval x = e +- h u^k with k = 1 / (1 - alpha) makes the integrand smooth.
  const double k = 1.0 / (1.0 - p.alpha);
  CompensatedSum acc;
  for (const auto& [a, b] : set.intervals()) {
    const double h = 0.5 * (b - a);
    for (const auto [e, dir] : {std::pair{a, 1.0}, std::pair{b, -1.0}}) {
      const auto f = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = e + dir * h * std::pow(u, k);
        if (set.is_endpoint(x)) return 0.0;
        return grad_potential(set, x, p.alpha) * x * h * k * std::pow(u, k - 1.0);
      };
      try {
        acc.add(integrate(f, 0.0, 1.0, tol).estimate);
      } catch (const QuadratureError& err) {
        acc.add(err.best().estimate);
      }
    }
  }
  const double rhs = -0.5 * p.alpha * riesz_energy(set, p.alpha);
  return {acc.value(), rhs, relative_residual(acc.value(), rhs)};
}

IdentityResult au2_line(const IntervalSet& set, const Params& p) {
  const auto mesh = boundary_mesh(set);
  std::vector<double> v(mesh.size());
  for (std::size_t j = 0; j < mesh.size(); ++j) v[j] = potential(set, mesh.points[j].x, p.alpha);
  const double lhs = boundary_moment(mesh, v);
  const double rhs = (1.0 - 0.5 * p.alpha) * riesz_energy(set, p.alpha);
  return {lhs, rhs, relative_residual(lhs, rhs)};
}

IdentityResult minkowski_line(const IntervalSet& set, const Params& p) {
  const auto mesh = boundary_mesh(set);
  std::vector<double> k(mesh.size());
  for (std::size_t j = 0; j < mesh.size(); ++j) k[j] = pv_pair_integral(set, mesh.points[j].x, p.s);
  const double lhs = boundary_moment(mesh, k);
  const double rhs = (1.0 - p.s) * frac_perimeter(set, p.s) / p.c_var;
  return {lhs, rhs, relative_residual(lhs, rhs)};
}

IdentityResult lal_line(const IntervalSet& set, const Params& p, const IdentityOptions& opts) {
  const double length = volume(set);
  const double vb = ball_center_potential(1, p.alpha, 0.5 * length);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double vmax = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < opts.probes; ++k) {
    double u = unit(rng) * length;
    double x = set.intervals().back().second;
    for (const auto& [a, b] : set.intervals()) {
      if (u < b - a) {
        x = a + u;
        break;
      }
      u -= b - a;
    }
    vmax = std::max(vmax, potential(set, x, p.alpha));
  }
  return {vmax, vb, std::max(0.0, vmax - vb) / vb};
}

// ---------------------------------------------------------------- identities, 2D

IdentityResult au1_star(const StarShape2D& shape, const Params& p, std::size_t m) {
  const std::size_t radial = std::max<std::size_t>(8, m / 8);
  const auto rule = gauss_legendre_unit(radial);
  const OffBoundaryEvaluator eval(shape, m);
  const Vec2 c = shape.center();
  std::vector<double> terms(m * radial);
  parallel_for(terms.size(), [&](std::size_t idx) {
    const std::size_t t = idx / radial;
    const std::size_t k = idx % radial;
    const double theta = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(m);
    const Vec2 e{std::cos(theta), std::sin(theta)};
    const double r = shape.radius(theta);
    const double rho = rule.nodes[k] * r;
    const Vec2 g = eval.grad_potential(c + rho * e, p.alpha);
    // x relative to the polar center, area element rho d rho d theta.
    terms[idx] = rule.weights[k] * dot(g, e) * rho * rho * r;
  });
  const double lhs = compensated_sum(terms) * 2.0 * kPi / static_cast<double>(m);
  const double rhs = -0.5 * p.alpha * riesz_energy(shape, p.alpha, m);
  return {lhs, rhs, relative_residual(lhs, rhs)};
}

BoundaryMesh centered_mesh(const StarShape2D& shape, std::size_t m) {
  auto mesh = boundary_mesh(shape, m);
  for (auto& x : mesh.points) x = x - shape.center();
  return mesh;
}

IdentityResult au2_star(const StarShape2D& shape, const Params& p, std::size_t m) {
  const auto mesh = centered_mesh(shape, m);
  const auto v = potential_on_mesh(mesh, p.alpha);
  const double lhs = boundary_moment(mesh, v);
  const double rhs = (2.0 - 0.5 * p.alpha) * riesz_on_mesh(mesh, p.alpha);
  return {lhs, rhs, relative_residual(lhs, rhs)};
}

IdentityResult minkowski_star(const StarShape2D& shape, const Params& p, std::size_t m) {
  const auto mesh = centered_mesh(shape, m);
  const auto k = curvature_on_mesh(mesh, p.s);
  const double lhs = boundary_moment(mesh, k);
  const double rhs = (2.0 - p.s) * perimeter_on_mesh(mesh, p.s) / p.c_var;
  return {lhs, rhs, relative_residual(lhs, rhs)};
}

IdentityResult lal_star(const StarShape2D& shape, const Params& p, const IdentityOptions& opts) {
  const double area = volume(shape);
  const double vb = ball_center_potential(2, p.alpha, std::sqrt(area / kPi));
  const OffBoundaryEvaluator eval(shape, opts.resolution);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> probes(opts.probes);
  for (auto& x : probes) {
    const double theta = 2.0 * kPi * unit(rng);
    // Area-uniform radius, kept a little inside the boundary.
    const double frac = 0.999 * std::sqrt(unit(rng));
    x = shape.center() + frac * shape.radius(theta) * Vec2{std::cos(theta), std::sin(theta)};
  }
  std::vector<double> values(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) { values[i] = eval.potential(probes[i], p.alpha); });
  const double vmax = *std::max_element(values.begin(), values.end());
  return {vmax, vb, std::max(0.0, vmax - vb) / vb};
}

IdentityResult tangential_ball(const StarShape2D& shape, const Params& p, std::size_t m) {
  if (!(p.alpha < 1.0)) throw InvalidArgument("TangentialBall needs alpha < n - 1");
  const double g_full = tangential_sup(shape, p.alpha, m);
  const double mu_full = ball_map_mu(shape);
  if (mu_full == 0.0) return {g_full, 0.0, g_full};
  const auto half = half_deviation_shape(shape);
  const double ratio_g = tangential_sup(half, p.alpha, m) / g_full;
  const double ratio_mu = ball_map_mu(half) / mu_full;
  return {ratio_g, ratio_mu, std::abs(ratio_g / ratio_mu - 1.0)};
}

// ---------------------------------------------------------------- rho

struct AnnulusObjective {
  std::vector<Vec2> points;
  double diam = 1.0;

  double operator()(Vec2 p) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& x : points) {
      const double d = norm(x - p);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return (hi - lo) / diam;
  }
};

double rho_star(const StarShape2D& shape, std::size_t samples) {
  const auto dense = shape.resampled(std::max(samples, shape.resolution()));
  const auto r = dense.samples();
  const auto [mn, mx] = std::minmax_element(r.begin(), r.end());
  AnnulusObjective obj;
  obj.diam = diameter(SetGeometry(dense));
  if (*mx == *mn) return 0.0;
  obj.points.reserve(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) obj.points.push_back(dense.boundary_point(dense.node_angle(j)));

  const Vec2 c = shape.center();
  const double scale = 0.5 * (*mx + *mn);
  const double at_center = (*mx - *mn) / obj.diam;
  double best = at_center;
  const Vec2 starts[] = {c, c + Vec2{0.05 * scale, 0.0}, c + Vec2{0.0, 0.05 * scale}};
  for (const Vec2 start : starts) {
    Vec2 p = start;
    double f = p == c ? at_center : obj(p);
    double h = 0.05 * scale;
    while (h > 1e-13 * scale) {
      bool moved = false;
      for (const Vec2 dir : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}}) {
        const Vec2 q = p + h * dir;
        const double fq = obj(q);
        if (fq < f) {
          p = q;
          f = fq;
          moved = true;
          break;
        }
      }
      if (!moved) h *= 0.5;
    }
    best = std::min(best, f);
  }
  return best;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- public

double lipschitz_defect(const BoundaryMesh& mesh, std::span<const double> values) {
  if (mesh.size() < 2) throw InvalidArgument("lipschitz defect needs at least two nodes");
  if (values.size() != mesh.size()) throw InvalidArgument("values do not match the mesh");
  std::vector<double> rows(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    double sup = 0.0;
    for (std::size_t j = i + 1; j < mesh.size(); ++j) {
      const double dist = norm(mesh.points[i] - mesh.points[j]);
      if (dist > 0.0) sup = std::max(sup, std::abs(values[i] - values[j]) / dist);
    }
    rows[i] = sup;
  });
  return *std::max_element(rows.begin(), rows.end());
}

DeltaResult lipschitz_defect_delta(const BoundaryFields& fields, const Params& p) {
  DeltaResult d;
  d.from_curvature = lipschitz_defect(fields.mesh, fields.kappa);
  d.from_potential = p.c_coupling * p.eps * lipschitz_defect(fields.mesh, fields.potential);
  return d;
}

double eta(double diameter, int n, double s, double delta) {
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
  if (!(diameter > 0.0)) throw InvalidArgument("diameter must be positive");
  return std::pow(diameter, diameter_power(n, s)) * delta;
}

double annulus_deficit_rho(const SetGeometry& set, std::size_t samples) {
  if (const auto* b = std::get_if<Ball>(&set)) {
    if (b->dim() == 1) throw InvalidArgument("rho is not defined for 1D sets");
    return 0.0;
  }
  if (std::holds_alternative<IntervalSet>(set)) throw InvalidArgument("rho is not defined for 1D sets");
  return rho_star(std::get<StarShape2D>(set), samples);
}

LambdaResult lambda_hat_and_residual(const SetGeometry& set, const BoundaryFields& fields, const Params& p,
                                     std::size_t resolution) {
  LambdaResult out;
  out.lambda_hat = weighted_mean(fields.mesh, fields.zeta);
  for (double z : fields.zeta) out.residual = std::max(out.residual, std::abs(z - out.lambda_hat));
  const int n = dimension(set);
  const double per = frac_perimeter(set, p.s, resolution);
  const double riesz = p.eps == 0.0 ? 0.0 : riesz_energy(set, p.alpha, resolution);
  out.lambda_cross = ((n - p.s) * per / p.c_var + p.c_coupling * p.eps * (n - 0.5 * p.alpha) * riesz) /
                     (n * volume(set));
  return out;
}

std::string to_string(IdentityKind kind) {
  switch (kind) {
    case IdentityKind::Au1:
      return "Au1";
    case IdentityKind::Au2:
      return "Au2";
    case IdentityKind::Lal:
      return "Lal";
    case IdentityKind::Minkowski:
      return "Minkowski";
    case IdentityKind::TangentialBall:
      return "TangentialBall";
  }
  return "?";
}

IdentityKind identity_kind_from_string(const std::string& name) {
  for (auto k : kAllIdentities) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown identity: " + name);
}

IdentityResult identity_check(const SetGeometry& set, const Params& p, IdentityKind kind,
                              const IdentityOptions& opts) {
  const auto c = concretize(set, opts.resolution, "identity_check");
  if (c.line) {
    switch (kind) {
      case IdentityKind::Au1:
        return au1_line(*c.line, p);
      case IdentityKind::Au2:
        return au2_line(*c.line, p);
      case IdentityKind::Minkowski:
        return minkowski_line(*c.line, p);
      case IdentityKind::Lal:
        return lal_line(*c.line, p, opts);
      case IdentityKind::TangentialBall:
        throw InvalidArgument("TangentialBall needs a 2D set (1D has no tangents)");
    }
  }
  const std::size_t m = opts.resolution;
  switch (kind) {
    case IdentityKind::Au1:
      return au1_star(*c.star, p, m);
    case IdentityKind::Au2:
      return au2_star(*c.star, p, m);
    case IdentityKind::Minkowski:
      return minkowski_star(*c.star, p, m);
    case IdentityKind::Lal:
      return lal_star(*c.star, p, opts);
    case IdentityKind::TangentialBall:
      return tangential_ball(*c.star, p, m);
  }
  throw InvalidArgument("unknown identity kind");
}

double calibrate_variation_constant(double s, int n, double radius, std::size_t resolution) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (n == 1) {
    const IntervalSet iv({{-radius, radius}});
    const double per = frac_perimeter(iv, s);
    const double lhs = pv_pair_integral(iv, -radius, s) * radius + pv_pair_integral(iv, radius, s) * radius;
    return (1.0 - s) * per / lhs;
  }
  if (n == 2) {
    const auto mesh = centered_mesh(as_star(Ball({0.0, 0.0}, radius), resolution), resolution);
    const auto k = curvature_on_mesh(mesh, s);
    return (2.0 - s) * perimeter_on_mesh(mesh, s) / boundary_moment(mesh, k);
  }
  if (n < 1) throw InvalidArgument("dimension must be positive");
  const double sphere = unit_sphere_area(n - 1) * std::pow(radius, n - 1);
  return (n - s) * ball_perimeter(n, s, radius) / (ball_curvature(n, s, radius) * radius * sphere);
}

double ball_map_mu(const StarShape2D& shape) {
  const auto dense = shape.resampled(std::max<std::size_t>(1024, shape.resolution()));
  const double rb = std::sqrt(volume(SetGeometry(shape)) / kPi);
  const auto r = dense.samples();
  const auto dr = dense.node_derivative(1);
  double dev = 0.0;
  double slope = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    dev = std::max(dev, std::abs(r[j] - rb));
    slope = std::max(slope, std::abs(dr[j]));
  }
  return dev + slope;
}

StarShape2D half_deviation_shape(const StarShape2D& shape) {
  const double area = volume(SetGeometry(shape));
  const double rb = std::sqrt(area / kPi);
  std::vector<double> half(shape.samples().begin(), shape.samples().end());
  for (double& r : half) r = rb + 0.5 * (r - rb);
  const StarShape2D raw(shape.center(), std::move(half));
  const double k = std::sqrt(area / volume(SetGeometry(raw)));
  return raw.translated(Vec2{} - shape.center()).scaled(k).translated(shape.center());
}

std::string DiagnosticsReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["params"] = {{"s", params.s},     {"alpha", params.alpha},          {"eps", params.eps},
                 {"c_coupling", params.c_coupling}, {"c_var", params.c_var}};
  j["mesh_resolution"] = mesh_resolution;
  j["volume"] = volume;
  j["diameter"] = diameter;
  j["delta_s"] = delta_s;
  j["delta_s_potential"] = delta_s_potential;
  j["eta_s"] = eta_s;
  j["implied_C"] = implied_C;
  j["rho"] = rho;
  j["iso_ratio"] = iso_ratio;
  j["lambda_hat"] = lambda_hat;
  j["lambda_cross"] = lambda_cross;
  j["el_residual"] = el_residual;
  j["tangential_grad_sup"] = tangential_grad_sup;
  j["mu"] = mu;
  j["perimeter"] = perimeter;
  j["riesz"] = riesz;
  j["identity_residuals"] = identity_residuals;
  j["error_estimates"] = error_estimates;
  return j.dump(2);
}

std::string DiagnosticsReport::csv_header() {
  return "n,s,alpha,eps,resolution,volume,diameter,delta_s,delta_s_potential,eta_s,implied_C,rho,iso_ratio,"
         "lambda_hat,lambda_cross,el_residual,tangential_grad_sup,mu,perimeter,riesz";
}

std::string DiagnosticsReport::csv_row() const {
  const double values[] = {params.s,   params.alpha,  params.eps, static_cast<double>(mesh_resolution),
                           volume,     diameter,      delta_s,    delta_s_potential,
                           eta_s,      implied_C,     rho,        iso_ratio,
                           lambda_hat, lambda_cross,  el_residual, tangential_grad_sup,
                           mu,         perimeter,     riesz};
  std::string row = std::to_string(n);
  for (double v : values) row += "," + format_double(v);
  return row;
}

DiagnosticsReport diagnose(const SetGeometry& set, const Params& p, std::size_t resolution,
                           const DiagnoseOptions& opts) {
  p.validate();
  const int n = dimension(set);
  if (p.n != n) throw InvalidArgument("params.n does not match the set dimension");
  const auto c = concretize(set, resolution, "diagnose");
  const SetGeometry concrete = c.line ? SetGeometry(*c.line) : SetGeometry(*c.star);

  DiagnosticsReport r;
  r.n = n;
  r.params = p;
  r.mesh_resolution = c.line ? 0 : resolution;
  r.volume = volume(set);
  r.diameter = diameter(set);
  r.iso_ratio = isodiametric_ratio(set);

  const auto fields = boundary_fields(concrete, p, resolution, true);
  const auto delta = lipschitz_defect_delta(fields, p);
  r.delta_s = delta.from_curvature;
  r.delta_s_potential = delta.from_potential;
  r.eta_s = eta(r.diameter, n, p.s, r.delta_s);
  r.implied_C = p.eps > 0.0 ? r.delta_s / p.eps : kNaN;
  r.rho = c.line ? kNaN : annulus_deficit_rho(std::holds_alternative<Ball>(set) ? set : concrete);

  const auto lam = lambda_hat_and_residual(concrete, fields, p, resolution);
  r.lambda_hat = lam.lambda_hat;
  r.lambda_cross = lam.lambda_cross;
  r.el_residual = lam.residual;
  r.perimeter = frac_perimeter(concrete, p.s, resolution);
  r.riesz = riesz_energy(concrete, p.alpha, resolution);

  if (c.star) {
    r.mu = ball_map_mu(*c.star);
    r.tangential_grad_sup = kNaN;
    if (!fields.grad_tangential.empty()) {
      r.tangential_grad_sup = 0.0;
      for (double g : fields.grad_tangential) r.tangential_grad_sup = std::max(r.tangential_grad_sup, std::abs(g));
    }
  } else {
    r.mu = kNaN;
    r.tangential_grad_sup = kNaN;
  }

  IdentityOptions iopts = opts.identity;
  iopts.resolution = resolution;
  for (auto kind : opts.identities) {
    if (c.line && kind == IdentityKind::TangentialBall) continue;
    if (kind == IdentityKind::TangentialBall && !(p.alpha < 1.0)) continue;
    r.identity_residuals[to_string(kind)] = identity_check(concrete, p, kind, iopts).residual;
  }

  if (opts.error_estimates && c.star) {
    const std::size_t half = resolution / 2 + (resolution / 2) % 2;
    const auto coarse = boundary_fields(concrete, p, half, false);
    r.error_estimates["perimeter"] = std::abs(r.perimeter - frac_perimeter(concrete, p.s, half));
    r.error_estimates["riesz"] = std::abs(r.riesz - riesz_energy(concrete, p.alpha, half));
    r.error_estimates["lambda_hat"] = std::abs(r.lambda_hat - weighted_mean(coarse.mesh, coarse.zeta));
  } else {
    r.error_estimates["perimeter"] = 0.0;
    r.error_estimates["riesz"] = 0.0;
    r.error_estimates["lambda_hat"] = 0.0;
  }
  return r;
}

}  // namespace nlok
