#include "nlok/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nlok/error.hpp"
#include "nlok/numeric.hpp"
#include "nlok/parallel.hpp"
#include "nlok/periodic_rule.hpp"
#include "nlok/quad.hpp"

namespace nlok {

namespace {

constexpr double kPi = std::numbers::pi;

void require_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
}

void require_alpha(double alpha, int n) {
  if (!(alpha > 0.0 && alpha < n)) {
    throw InvalidArgument("alpha must lie in (0," + std::to_string(n) + ")");
  }
}

void require_even_resolution(std::size_t m) {
  if (m < 8 || m % 2 != 0) throw InvalidArgument("2D resolution must be even and >= 8");
}

// ---------------------------------------------------------------- 1D

// int int_{I x J} |x - y|^{-p} for disjoint I to the left of J.
double cross_term(const IntervalSet::Interval& left, const IntervalSet::Interval& right, double p) {
  const double g = right.first - left.second;
  const double l1 = left.second - left.first;
  const double l2 = right.second - right.first;
  return std::pow(g, 2.0 - p) * mixed_difference(2.0 - p, l1 / g, l2 / g) / ((1.0 - p) * (2.0 - p));
}

double perimeter_1d(const IntervalSet& set, double s) {
  const auto ivs = set.intervals();
  CompensatedSum acc;
  for (const auto& [a, b] : ivs) acc.add(2.0 * std::pow(b - a, 1.0 - s) / (s * (1.0 - s)));
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    for (std::size_t j = i + 1; j < ivs.size(); ++j) acc.add(-2.0 * cross_term(ivs[i], ivs[j], 1.0 + s));
  }
  return acc.value();
}

double riesz_1d(const IntervalSet& set, double alpha) {
  const auto ivs = set.intervals();
  CompensatedSum acc;
  for (const auto& [a, b] : ivs) {
    acc.add(2.0 * std::pow(b - a, 2.0 - alpha) / ((1.0 - alpha) * (2.0 - alpha)));
  }
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    for (std::size_t j = i + 1; j < ivs.size(); ++j) acc.add(2.0 * cross_term(ivs[i], ivs[j], alpha));
  }
  return acc.value();
}

// ---------------------------------------------------------------- 2D kernels

// |2 sin(pi l / M)| for l = 0..M-1.
std::vector<double> chord_table(std::size_t m) {
  std::vector<double> t(m);
  for (std::size_t l = 0; l < m; ++l) {
    t[l] = std::abs(2.0 * std::sin(kPi * static_cast<double>(l) / static_cast<double>(m)));
  }
  return t;
}

struct MeshView {
  const BoundaryMesh& mesh;
  std::vector<Vec2> big_n;  // nu * speed
  std::vector<double> chord;

  explicit MeshView(const BoundaryMesh& m) : mesh(m), chord(chord_table(m.size())) {
    if (m.dim != 2) throw InvalidArgument("expected a 2D boundary mesh");
    require_even_resolution(m.size());
    big_n.resize(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) big_n[j] = m.speed[j] * m.normals[j];
  }
  std::size_t size() const { return mesh.size(); }
  std::size_t lag(std::size_t i, std::size_t j) const { return (j + size() - i) % size(); }
  // |y_j - y_i| / |2 sin((t_j - t_i) / 2)|, smooth and positive.
  double rho(std::size_t i, std::size_t j, double dist) const { return dist / chord[lag(i, j)]; }
};

// (d . N_j) / |d|^2 * rho^{e} with the diagonal limit curvature * speed / 2 * speed^{e}.
double flux_row(const MeshView& v, const std::vector<double>& w, std::size_t i, double e) {
  const auto& pts = v.mesh.points;
  CompensatedSum acc;
  for (std::size_t j = 0; j < v.size(); ++j) {
    double g;
    if (j == i) {
      const double sp = v.mesh.speed[i];
      g = 0.5 * v.mesh.curvature[i] * sp * std::pow(sp, e);
    } else {
      const Vec2 d = pts[j] - pts[i];
      const double d2 = dot(d, d);
      g = dot(d, v.big_n[j]) / d2 * std::pow(v.rho(i, j, std::sqrt(d2)), e);
    }
    acc.add(w[v.lag(i, j)] * g);
  }
  return acc.value();
}

Vec2 grad_row(const MeshView& v, const std::vector<double>& w, std::size_t i, double alpha) {
  const auto& pts = v.mesh.points;
  CompensatedSum ax, ay;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double r = j == i ? v.mesh.speed[i] : v.rho(i, j, norm(pts[j] - pts[i]));
    const double k = w[v.lag(i, j)] * std::pow(r, -alpha);
    ax.add(k * v.big_n[j].x);
    ay.add(k * v.big_n[j].y);
  }
  return {-ax.value(), -ay.value()};
}

// sum_j R_{j-i} (N_i . N_j) rho^{e}, diagonal speed^{2+e}.
double pair_row(const MeshView& v, const std::vector<double>& w, std::size_t i, double e) {
  const auto& pts = v.mesh.points;
  CompensatedSum acc;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double r = j == i ? v.mesh.speed[i] : v.rho(i, j, norm(pts[j] - pts[i]));
    acc.add(w[v.lag(i, j)] * dot(v.big_n[i], v.big_n[j]) * std::pow(r, e));
  }
  return acc.value();
}

double double_integral(const MeshView& v, double q, double e) {
  const auto w = singular_periodic_weights(v.size(), q);
  std::vector<double> rows(v.size());
  parallel_for(v.size(), [&](std::size_t i) { rows[i] = pair_row(v, w, i, e); });
  return compensated_sum(rows) * 2.0 * kPi / static_cast<double>(v.size());
}

// ---------------------------------------------------------------- star points

struct StarPoint {
  double theta = 0.0;
  bool on_boundary = false;
};

StarPoint locate(const StarShape2D& shape, Vec2 x) {
  const Vec2 d = x - shape.center();
  const double rho = norm(d);
  if (rho == 0.0) return {0.0, false};
  const double theta = std::atan2(d.y, d.x);
  const double r = shape.radius(theta);
  return {theta, std::abs(rho - r) <= 1e-12 * std::max(1.0, r)};
}

Vec2 as_vec2(std::span<const double> x) {
  if (x.size() != 2) throw InvalidArgument("expected a point in the plane");
  return {x[0], x[1]};
}

double as_scalar(std::span<const double> x) {
  if (x.size() != 1) throw InvalidArgument("expected a point on the line");
  return x[0];
}

int ball_dim_check(const Ball& b, std::span<const double> x) {
  if (static_cast<int>(x.size()) != b.dim()) throw InvalidArgument("point dimension does not match the ball");
  return b.dim();
}

double distance_to_center(const Ball& b, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - b.center()[i]) * (x[i] - b.center()[i]);
  return std::sqrt(acc);
}

}  // namespace

// ---------------------------------------------------------------- mesh evaluators

std::vector<double> curvature_on_mesh(const BoundaryMesh& mesh, double s) {
  require_s(s);
  const MeshView v(mesh);
  const auto w = singular_periodic_weights(v.size(), s);
  std::vector<double> out(v.size());
  parallel_for(v.size(), [&](std::size_t i) { out[i] = (2.0 / s) * flux_row(v, w, i, -s); });
  return out;
}

std::vector<double> potential_on_mesh(const BoundaryMesh& mesh, double alpha) {
  require_alpha(alpha, 2);
  const MeshView v(mesh);
  const auto w = singular_periodic_weights(v.size(), alpha - 2.0);
  std::vector<double> out(v.size());
  parallel_for(v.size(), [&](std::size_t i) {
    out[i] = flux_row(v, w, i, 2.0 - alpha) / (2.0 - alpha);
  });
  return out;
}

std::vector<Vec2> grad_potential_on_mesh(const BoundaryMesh& mesh, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha >= n-1: the gradient of the potential diverges on the boundary");
  }
  const MeshView v(mesh);
  const auto w = singular_periodic_weights(v.size(), alpha);
  std::vector<Vec2> out(v.size());
  parallel_for(v.size(), [&](std::size_t i) { out[i] = grad_row(v, w, i, alpha); });
  return out;
}

double perimeter_on_mesh(const BoundaryMesh& mesh, double s) {
  require_s(s);
  const MeshView v(mesh);
  return double_integral(v, s, -s) / (s * s);
}

double riesz_on_mesh(const BoundaryMesh& mesh, double alpha) {
  require_alpha(alpha, 2);
  const MeshView v(mesh);
  return -double_integral(v, alpha - 2.0, 2.0 - alpha) / ((2.0 - alpha) * (2.0 - alpha));
}

OffBoundaryEvaluator::OffBoundaryEvaluator(const StarShape2D& shape, std::size_t resolution)
    : shape_(shape) {
  require_even_resolution(resolution);
  base_ = boundary_mesh(shape_, std::max<std::size_t>(resolution, 256));
  scale_ = base_.total_weight() / (2.0 * kPi);
  for (std::size_t q = resolution;; q *= 2) {
    sizes_.push_back(q);
    if (q >= (std::size_t{1} << 17)) break;
  }
  once_ = std::make_unique<std::once_flag[]>(sizes_.size());
  levels_ = std::make_unique<BoundaryMesh[]>(sizes_.size());
}

double OffBoundaryEvaluator::node_distance(Vec2 x) const {
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& p : base_.points) dist = std::min(dist, norm(p - x));
  return dist;
}

const BoundaryMesh& OffBoundaryEvaluator::mesh_for(Vec2 x) const {
  const double dist = node_distance(x);
  if (!(dist > 0.0) || locate(shape_, x).on_boundary) throw InvalidArgument("point lies on the boundary");
  // The trapezoid error decays like exp(-q dist / scale).
  const double wanted = 40.0 * scale_ / dist;
  std::size_t k = 0;
  while (k + 1 < sizes_.size() && static_cast<double>(sizes_[k]) < wanted) ++k;
  std::call_once(once_[k], [&] { levels_[k] = boundary_mesh(shape_, sizes_[k]); });
  return levels_[k];
}

double OffBoundaryEvaluator::potential(Vec2 x, double alpha) const {
  require_alpha(alpha, 2);
  const auto& mesh = mesh_for(x);
  const double h = 2.0 * kPi / static_cast<double>(mesh.size());
  CompensatedSum acc;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const Vec2 d = mesh.points[j] - x;
    acc.add(dot(d, mesh.normals[j]) * mesh.speed[j] * std::pow(dot(d, d), -0.5 * alpha));
  }
  return acc.value() * h / (2.0 - alpha);
}

Vec2 OffBoundaryEvaluator::grad_potential(Vec2 x, double alpha) const {
  require_alpha(alpha, 2);
  const auto& mesh = mesh_for(x);
  const double h = 2.0 * kPi / static_cast<double>(mesh.size());
  CompensatedSum ax, ay;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const Vec2 d = mesh.points[j] - x;
    const double k = mesh.speed[j] * std::pow(dot(d, d), -0.5 * alpha);
    ax.add(k * mesh.normals[j].x);
    ay.add(k * mesh.normals[j].y);
  }
  return {-ax.value() * h, -ay.value() * h};
}

double potential_off_boundary(const StarShape2D& shape, Vec2 x, double alpha, std::size_t resolution) {
  return OffBoundaryEvaluator(shape, resolution).potential(x, alpha);
}

Vec2 grad_potential_off_boundary(const StarShape2D& shape, Vec2 x, double alpha, std::size_t resolution) {
  return OffBoundaryEvaluator(shape, resolution).grad_potential(x, alpha);
}

// ---------------------------------------------------------------- balls

double ball_curvature(int n, double s, double r) {
  require_s(s);
  if (n < 1 || !(r > 0.0)) throw InvalidArgument("ball_curvature: need n >= 1 and r > 0");
  if (n == 1) return (2.0 / s) * std::pow(2.0 * r, -s);
  return (2.0 / s) * unit_sphere_area(n - 2) * std::pow(r, -s) * std::pow(2.0, -s - 1.0) *
         std::beta(0.5 * (1.0 - s), 0.5 * (n - 1));
}

double ball_perimeter(int n, double s, double r) {
  require_s(s);
  if (n < 1 || !(r > 0.0)) throw InvalidArgument("ball_perimeter: need n >= 1 and r > 0");
  if (n == 1) return 2.0 * std::pow(2.0 * r, 1.0 - s) / (s * (1.0 - s));
  const double nn = n;
  const double bracket = 0.5 * std::beta(0.5 * (1.0 - s), 0.5 * (nn - 1.0)) -
                         std::beta(0.5 * (3.0 - s), 0.5 * (nn - 1.0));
  return -1.0 / (s * (2.0 - nn - s)) * unit_sphere_area(n - 1) * std::pow(r, nn - 1.0) *
         unit_sphere_area(n - 2) * std::pow(r, nn - 1.0) * std::pow(2.0 * r, 2.0 - nn - s) *
         std::pow(2.0, nn - 1.0) * bracket;
}

double ball_center_potential(int n, double alpha, double r) {
  require_alpha(alpha, n);
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  return unit_sphere_area(n - 1) * std::pow(r, n - alpha) / (n - alpha);
}

// ---------------------------------------------------------------- 1D closed forms

double potential(const IntervalSet& set, double x, double alpha) {
  require_alpha(alpha, 1);
  CompensatedSum acc;
  for (const auto& [a, b] : set.intervals()) {
    if (a < x && x < b) {
      acc.add(kernel_primitive(a, x, x, alpha));
      acc.add(kernel_primitive(x, b, x, alpha));
    } else {
      acc.add(kernel_primitive(a, b, x, alpha));
    }
  }
  return acc.value();
}

double grad_potential(const IntervalSet& set, double x, double alpha) {
  require_alpha(alpha, 1);
  if (set.is_endpoint(x)) {
    throw DomainError("alpha >= n-1: the gradient of the potential diverges at endpoints in 1D");
  }
  CompensatedSum acc;
  for (const auto& [a, b] : set.intervals()) {
    acc.add(std::pow(std::abs(x - a), -alpha));
    acc.add(-std::pow(std::abs(x - b), -alpha));
  }
  return acc.value();
}

double frac_curvature(const IntervalSet& set, double x, double s) {
  if (!set.is_endpoint(x)) throw InvalidArgument("x is not on the boundary");
  return pv_pair_integral(set, x, s);
}

// ---------------------------------------------------------------- dispatch

double frac_perimeter(const SetGeometry& set, double s, std::size_t resolution) {
  require_s(s);
  if (const auto* iv = std::get_if<IntervalSet>(&set)) return perimeter_1d(*iv, s);
  if (const auto* b = std::get_if<Ball>(&set)) {
    if (b->dim() != 2) return ball_perimeter(b->dim(), s, b->radius());
  }
  require_even_resolution(resolution);
  return perimeter_on_mesh(boundary_mesh(set, resolution), s);
}

double riesz_energy(const SetGeometry& set, double alpha, std::size_t resolution) {
  const int n = dimension(set);
  require_alpha(alpha, n);
  if (const auto* iv = std::get_if<IntervalSet>(&set)) return riesz_1d(*iv, alpha);
  if (const auto* b = std::get_if<Ball>(&set)) {
    if (b->dim() == 1) return riesz_1d(as_intervals(*b), alpha);
    if (b->dim() != 2) throw InvalidArgument("riesz_energy: balls are supported for n <= 2");
  }
  require_even_resolution(resolution);
  return riesz_on_mesh(boundary_mesh(set, resolution), alpha);
}

Estimate frac_perimeter_estimate(const SetGeometry& set, double s, std::size_t resolution) {
  const double v = frac_perimeter(set, s, resolution);
  if (dimension(set) != 2) return {v, 0.0};
  return {v, std::abs(v - frac_perimeter(set, s, resolution / 2 + (resolution / 2) % 2))};
}

Estimate riesz_energy_estimate(const SetGeometry& set, double alpha, std::size_t resolution) {
  const double v = riesz_energy(set, alpha, resolution);
  if (dimension(set) != 2) return {v, 0.0};
  return {v, std::abs(v - riesz_energy(set, alpha, resolution / 2 + (resolution / 2) % 2))};
}

EnergyBreakdown energy(const SetGeometry& set, const Params& p, std::size_t resolution) {
  p.validate();
  EnergyBreakdown e;
  e.perimeter_term = frac_perimeter(set, p.s, resolution);
  e.riesz_term = riesz_energy(set, p.alpha, resolution);
  e.total_F = e.perimeter_term + e.riesz_term;
  e.eps_used = p.eps;
  e.total_F_eps = e.perimeter_term + p.eps * e.riesz_term;
  return e;
}

double potential(const SetGeometry& set, std::span<const double> x, double alpha, std::size_t resolution) {
  if (const auto* iv = std::get_if<IntervalSet>(&set)) return potential(*iv, as_scalar(x), alpha);
  if (const auto* b = std::get_if<Ball>(&set)) {
    const int n = ball_dim_check(*b, x);
    if (n == 1) return potential(as_intervals(*b), x[0], alpha);
    if (n != 2) {
      if (distance_to_center(*b, x) == 0.0) return ball_center_potential(n, alpha, b->radius());
      throw InvalidArgument("potential: balls with n >= 3 are supported at the center only");
    }
    require_even_resolution(resolution);
    return potential(SetGeometry(as_star(*b, resolution)), x, alpha, resolution);
  }
  const auto& star = std::get<StarShape2D>(set);
  require_alpha(alpha, 2);
  require_even_resolution(resolution);
  const Vec2 p = as_vec2(x);
  const auto loc = locate(star, p);
  if (loc.on_boundary) {
    const auto mesh = boundary_mesh(star, resolution, loc.theta);
    const MeshView v(mesh);
    const auto w = singular_periodic_weights(v.size(), alpha - 2.0);
    return flux_row(v, w, 0, 2.0 - alpha) / (2.0 - alpha);
  }
  return potential_off_boundary(star, p, alpha, resolution);
}

std::vector<double> grad_potential(const SetGeometry& set, std::span<const double> x, double alpha,
                                   std::size_t resolution) {
  if (const auto* iv = std::get_if<IntervalSet>(&set)) return {grad_potential(*iv, as_scalar(x), alpha)};
  if (const auto* b = std::get_if<Ball>(&set)) {
    const int n = ball_dim_check(*b, x);
    if (n == 1) return {grad_potential(as_intervals(*b), x[0], alpha)};
    if (n != 2) {
      if (distance_to_center(*b, x) == 0.0) return std::vector<double>(n, 0.0);
      throw InvalidArgument("grad_potential: balls with n >= 3 are supported at the center only");
    }
    require_even_resolution(resolution);
    return grad_potential(SetGeometry(as_star(*b, resolution)), x, alpha, resolution);
  }
  const auto& star = std::get<StarShape2D>(set);
  require_alpha(alpha, 2);
  require_even_resolution(resolution);
  const Vec2 p = as_vec2(x);
  const auto loc = locate(star, p);
  if (loc.on_boundary) {
    if (!(alpha < 1.0)) {
      throw DomainError("alpha >= n-1: the gradient of the potential diverges on the boundary");
    }
    const auto mesh = boundary_mesh(star, resolution, loc.theta);
    const MeshView v(mesh);
    const auto w = singular_periodic_weights(v.size(), alpha);
    const Vec2 g = grad_row(v, w, 0, alpha);
    return {g.x, g.y};
  }
  const Vec2 g = grad_potential_off_boundary(star, p, alpha, resolution);
  return {g.x, g.y};
}

double tangential_grad_potential(const SetGeometry& set, std::size_t node, double alpha,
                                 std::size_t resolution) {
  if (dimension(set) != 2) throw InvalidArgument("tangential gradient needs a 2D set (1D has no tangents)");
  require_even_resolution(resolution);
  const auto mesh = boundary_mesh(set, resolution);
  if (node >= mesh.size()) throw InvalidArgument("mesh node index out of range");
  const MeshView v(mesh);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha >= n-1: the gradient of the potential diverges on the boundary");
  }
  const auto w = singular_periodic_weights(v.size(), alpha);
  return dot(grad_row(v, w, node, alpha), mesh.tangents[node]);
}

double frac_curvature(const SetGeometry& set, std::span<const double> x, double s, std::size_t resolution) {
  require_s(s);
  if (const auto* iv = std::get_if<IntervalSet>(&set)) return frac_curvature(*iv, as_scalar(x), s);
  if (const auto* b = std::get_if<Ball>(&set)) {
    const int n = ball_dim_check(*b, x);
    const double dist = distance_to_center(*b, x);
    if (std::abs(dist - b->radius()) > 1e-12 * b->radius()) throw InvalidArgument("x is not on the boundary");
    if (n != 2) return ball_curvature(n, s, b->radius());
    require_even_resolution(resolution);
    return frac_curvature(SetGeometry(as_star(*b, resolution)), x, s, resolution);
  }
  const auto& star = std::get<StarShape2D>(set);
  require_even_resolution(resolution);
  const auto loc = locate(star, as_vec2(x));
  if (!loc.on_boundary) throw InvalidArgument("x is not on the boundary");
  const auto mesh = boundary_mesh(star, resolution, loc.theta);
  const MeshView v(mesh);
  const auto w = singular_periodic_weights(v.size(), s);
  return (2.0 / s) * flux_row(v, w, 0, -s);
}

double zeta(const SetGeometry& set, std::span<const double> x, const Params& p, std::size_t resolution) {
  const double k = frac_curvature(set, x, p.s, resolution);
  if (p.eps == 0.0) return k;
  return k + p.c_coupling * p.eps * potential(set, x, p.alpha, resolution);
}

BoundaryFields boundary_fields(const SetGeometry& set, const Params& p, std::size_t resolution,
                               bool with_gradient) {
  const int n = dimension(set);
  require_s(p.s);
  require_alpha(p.alpha, n);
  BoundaryFields f;
  if (n == 1) {
    const IntervalSet iv =
        std::holds_alternative<IntervalSet>(set) ? std::get<IntervalSet>(set) : as_intervals(std::get<Ball>(set));
    f.mesh = boundary_mesh(iv);
    for (const auto& pt : f.mesh.points) {
      const double k = pv_pair_integral(iv, pt.x, p.s);
      const double v = potential(iv, pt.x, p.alpha);
      f.kappa.push_back(k);
      f.potential.push_back(v);
      f.zeta.push_back(k + p.c_coupling * p.eps * v);
    }
    return f;
  }
  if (n != 2) throw InvalidArgument("boundary fields are available for n <= 2");
  require_even_resolution(resolution);
  f.mesh = boundary_mesh(set, resolution);
  f.kappa = curvature_on_mesh(f.mesh, p.s);
  f.potential = potential_on_mesh(f.mesh, p.alpha);
  if (with_gradient && p.alpha < 1.0) {
    f.grad = grad_potential_on_mesh(f.mesh, p.alpha);
    f.grad_tangential.resize(f.mesh.size());
    for (std::size_t j = 0; j < f.mesh.size(); ++j) f.grad_tangential[j] = dot(f.grad[j], f.mesh.tangents[j]);
  }
  f.zeta.resize(f.mesh.size());
  for (std::size_t j = 0; j < f.mesh.size(); ++j) {
    f.zeta[j] = f.kappa[j] + p.c_coupling * p.eps * f.potential[j];
  }
  return f;
}

}  // namespace nlok
