#include "nlok/sets.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "nlok/error.hpp"
#include "nlok/numeric.hpp"

namespace nlok {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// cos/sin of 2 pi m / q for m = 0..q-1; indexing by (k * j) mod q keeps node
// evaluations exactly periodic.
struct AngleTable {
  explicit AngleTable(std::size_t q) : cos_(q), sin_(q) {
    for (std::size_t m = 0; m < q; ++m) {
      const double t = kTwoPi * static_cast<double>(m) / static_cast<double>(q);
      cos_[m] = std::cos(t);
      sin_[m] = std::sin(t);
    }
  }
  std::vector<double> cos_;
  std::vector<double> sin_;
};

FourierCoefficients coefficients_from_samples(std::span<const double> samples) {
  const std::size_t m = samples.size();
  const AngleTable table(m);
  FourierCoefficients c;
  c.r0 = compensated_sum(samples) / static_cast<double>(m);
  const std::size_t top = m / 2;  // highest representable mode
  c.a.assign(top, 0.0);
  c.b.assign(top, 0.0);
  for (std::size_t k = 1; k <= top; ++k) {
    CompensatedSum ca, sb;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t idx = (k * j) % m;
      ca.add(samples[j] * table.cos_[idx]);
      sb.add(samples[j] * table.sin_[idx]);
    }
    const bool nyquist = (m % 2 == 0) && k == top;
    const double scale = nyquist ? 1.0 / static_cast<double>(m) : 2.0 / static_cast<double>(m);
    c.a[k - 1] = scale * ca.value();
    c.b[k - 1] = nyquist ? 0.0 : scale * sb.value();
  }
  return c;
}

// Derivative `order` of the series at q uniform nodes.
std::vector<double> evaluate_on_nodes(const FourierCoefficients& c, std::size_t q, int order) {
  const AngleTable table(q);
  std::vector<double> out(q, 0.0);
  const std::size_t modes = c.modes();
  for (std::size_t j = 0; j < q; ++j) {
    CompensatedSum acc;
    if (order == 0) acc.add(c.r0);
    for (std::size_t k = 1; k <= modes; ++k) {
      const std::size_t idx = (k * j) % q;
      const double ck = table.cos_[idx];
      const double sk = table.sin_[idx];
      const double ak = c.cos_coeff(k);
      const double bk = c.sin_coeff(k);
      const double kk = static_cast<double>(k);
      switch (order) {
        case 0:
          acc.add(ak * ck + bk * sk);
          break;
        case 1:
          acc.add(kk * (-ak * sk + bk * ck));
          break;
        case 2:
          acc.add(-kk * kk * (ak * ck + bk * sk));
          break;
        default:
          throw InvalidArgument("derivative order must be 0, 1 or 2");
      }
    }
    out[j] = acc.value();
  }
  return out;
}

double evaluate_series(const FourierCoefficients& c, double theta, int order) {
  const std::size_t modes = c.modes();
  double acc = order == 0 ? c.r0 : 0.0;
  for (std::size_t k = 1; k <= modes; ++k) {
    const double kk = static_cast<double>(k);
    const double ck = std::cos(kk * theta);
    const double sk = std::sin(kk * theta);
    const double ak = c.cos_coeff(k);
    const double bk = c.sin_coeff(k);
    switch (order) {
      case 0:
        acc += ak * ck + bk * sk;
        break;
      case 1:
        acc += kk * (-ak * sk + bk * ck);
        break;
      case 2:
        acc += -kk * kk * (ak * ck + bk * sk);
        break;
      default:
        throw InvalidArgument("derivative order must be 0, 1 or 2");
    }
  }
  return acc;
}

FourierCoefficients truncate_modes(const FourierCoefficients& c, std::size_t keep) {
  FourierCoefficients out;
  out.r0 = c.r0;
  out.a.assign(c.a.begin(), c.a.begin() + static_cast<std::ptrdiff_t>(std::min(keep, c.a.size())));
  out.b.assign(c.b.begin(), c.b.begin() + static_cast<std::ptrdiff_t>(std::min(keep, c.b.size())));
  return out;
}

void require_positive_radius(const FourierCoefficients& c, std::size_t resolution) {
  const std::size_t probe = std::max<std::size_t>(4 * resolution, 64);
  const auto dense = evaluate_on_nodes(c, probe, 0);
  const double lo = *std::min_element(dense.begin(), dense.end());
  if (!(lo > 0.0)) {
    throw InvalidArgument("star shape radius must be strictly positive (min " + std::to_string(lo) +
                          ")");
  }
}

void require_positive_samples(std::span<const double> samples) {
  for (double r : samples) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw InvalidArgument("star shape radius samples must be positive and finite");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- IntervalSet

IntervalSet::IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const auto& [a, b] : intervals_) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw InvalidArgument("interval endpoints must be finite");
    }
    if (!(a < b)) throw InvalidArgument("interval must satisfy a < b");
  }
  std::sort(intervals_.begin(), intervals_.end());
  for (std::size_t i = 1; i < intervals_.size(); ++i) {
    if (!(intervals_[i - 1].second < intervals_[i].first)) {
      throw InvalidArgument("intervals overlap or touch; merge them before constructing the set");
    }
  }
}

std::vector<double> IntervalSet::endpoints() const {
  std::vector<double> pts;
  pts.reserve(2 * intervals_.size());
  for (const auto& [a, b] : intervals_) {
    pts.push_back(a);
    pts.push_back(b);
  }
  return pts;
}

bool IntervalSet::contains(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x](const Interval& iv) { return iv.first < x && x < iv.second; });
}

bool IntervalSet::is_endpoint(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x](const Interval& iv) { return iv.first == x || iv.second == x; });
}

IntervalSet IntervalSet::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  std::vector<Interval> out;
  out.reserve(intervals_.size());
  for (const auto& [a, b] : intervals_) out.emplace_back(factor * a, factor * b);
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::translated(double offset) const {
  std::vector<Interval> out;
  out.reserve(intervals_.size());
  for (const auto& [a, b] : intervals_) out.emplace_back(a + offset, b + offset);
  return IntervalSet(std::move(out));
}

// ---------------------------------------------------------------- StarShape2D

StarShape2D::StarShape2D(Vec2 center, std::vector<double> samples)
    : center_(center), samples_(std::move(samples)) {
  if (samples_.size() < 4) throw InvalidArgument("star shape needs at least 4 radius samples");
  for (double r : samples_) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw InvalidArgument("star shape radius samples must be positive and finite");
    }
  }
  coeffs_ = coefficients_from_samples(samples_);
  require_positive_radius(coeffs_, samples_.size());
}

StarShape2D::StarShape2D(Vec2 center, std::vector<double> samples, FourierCoefficients coeffs)
    : center_(center), samples_(std::move(samples)), coeffs_(std::move(coeffs)) {}

StarShape2D StarShape2D::from_coefficients(Vec2 center, const FourierCoefficients& coeffs,
                                           std::size_t resolution) {
  if (resolution < 4) throw InvalidArgument("star shape needs at least 4 radius samples");
  if (2 * coeffs.modes() >= resolution) {
    throw InvalidArgument("resolution must exceed twice the number of Fourier modes");
  }
  require_positive_radius(coeffs, resolution);
  auto samples = evaluate_on_nodes(coeffs, resolution, 0);
  auto exact = coefficients_from_samples(samples);
  return StarShape2D(center, std::move(samples), std::move(exact));
}

double StarShape2D::node_angle(std::size_t j) const {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(samples_.size());
}

double StarShape2D::radius(double theta) const { return evaluate_series(coeffs_, theta, 0); }

double StarShape2D::radius_derivative(double theta, int order) const {
  if (order != 1 && order != 2) throw InvalidArgument("derivative order must be 1 or 2");
  return evaluate_series(coeffs_, theta, order);
}

std::vector<double> StarShape2D::node_derivative(int order) const {
  if (order != 1 && order != 2) throw InvalidArgument("derivative order must be 1 or 2");
  return evaluate_on_nodes(coeffs_, samples_.size(), order);
}

double StarShape2D::min_radius() const {
  const auto dense = evaluate_on_nodes(coeffs_, 4 * samples_.size(), 0);
  return *std::min_element(dense.begin(), dense.end());
}

double StarShape2D::max_radius() const {
  const auto dense = evaluate_on_nodes(coeffs_, 4 * samples_.size(), 0);
  return *std::max_element(dense.begin(), dense.end());
}

Vec2 StarShape2D::boundary_point(double theta) const {
  const double r = radius(theta);
  return {center_.x + r * std::cos(theta), center_.y + r * std::sin(theta)};
}

bool StarShape2D::contains(Vec2 p) const {
  const Vec2 d = p - center_;
  const double rho = norm(d);
  if (rho == 0.0) return true;
  return rho < radius(std::atan2(d.y, d.x));
}

StarShape2D StarShape2D::resampled(std::size_t resolution) const {
  if (resolution < 4) throw InvalidArgument("star shape needs at least 4 radius samples");
  if (resolution == samples_.size()) return *this;
  const std::size_t keep = (resolution - 1) / 2;  // strictly below the new Nyquist mode
  auto coeffs = truncate_modes(coeffs_, keep);
  auto samples = evaluate_on_nodes(coeffs, resolution, 0);
  // Every kept mode is below the new Nyquist frequency, so the truncated
  // series is already the interpolant of the new samples.
  require_positive_samples(samples);
  return StarShape2D(center_, std::move(samples), std::move(coeffs));
}

StarShape2D StarShape2D::truncated(std::size_t max_mode) const {
  auto coeffs = truncate_modes(coeffs_, max_mode);
  auto samples = evaluate_on_nodes(coeffs, samples_.size(), 0);
  if (2 * max_mode < samples_.size()) {
    require_positive_samples(samples);
    require_positive_radius(coeffs, samples.size());
    return StarShape2D(center_, std::move(samples), std::move(coeffs));
  }
  return StarShape2D(center_, std::move(samples));
}

StarShape2D StarShape2D::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  std::vector<double> samples(samples_);
  for (double& r : samples) r *= factor;
  FourierCoefficients c = coeffs_;
  c.r0 *= factor;
  for (double& v : c.a) v *= factor;
  for (double& v : c.b) v *= factor;
  return StarShape2D(factor * center_, std::move(samples), std::move(c));
}

StarShape2D StarShape2D::translated(Vec2 offset) const {
  return StarShape2D(center_ + offset, samples_, coeffs_);
}

// ---------------------------------------------------------------- Ball

Ball::Ball(std::vector<double> center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (center_.empty()) throw InvalidArgument("ball center must have at least one coordinate");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw InvalidArgument("ball radius must be positive");
  }
}

// ---------------------------------------------------------------- measurements

int dimension(const SetGeometry& set) {
  return std::visit(Overloaded{[](const IntervalSet&) { return 1; },
                               [](const StarShape2D&) { return 2; },
                               [](const Ball& b) { return b.dim(); }},
                    set);
}

double volume(const SetGeometry& set) {
  return std::visit(
      Overloaded{
          [](const IntervalSet& s) {
            CompensatedSum acc;
            for (const auto& [a, b] : s.intervals()) acc.add(b - a);
            return acc.value();
          },
          [](const StarShape2D& s) {
            // Parseval on the interpolant: (1/2) int r^2 = pi r0^2 + (pi/2) sum(a_k^2 + b_k^2).
            const auto& c = s.coefficients();
            const std::size_t m = s.resolution();
            CompensatedSum acc;
            acc.add(std::numbers::pi * c.r0 * c.r0);
            for (std::size_t k = 1; k <= c.modes(); ++k) {
              const double ak = c.cos_coeff(k);
              const double bk = c.sin_coeff(k);
              const bool nyquist = (m % 2 == 0) && 2 * k == m;
              // cos^2(m t / 2) still averages to 1/2 over a period.
              acc.add(0.5 * std::numbers::pi * (ak * ak + (nyquist ? 0.0 : bk * bk)));
            }
            return acc.value();
          },
          [](const Ball& b) { return unit_ball_volume(b.dim()) * std::pow(b.radius(), b.dim()); }},
      set);
}

double diameter(const SetGeometry& set) {
  return std::visit(Overloaded{[](const IntervalSet& s) {
                                 if (s.empty()) return 0.0;
                                 return s.intervals().back().second - s.intervals().front().first;
                               },
                               [](const StarShape2D& s) {
                                 const std::size_t m = s.resolution();
                                 std::vector<Vec2> pts(m);
                                 for (std::size_t j = 0; j < m; ++j) {
                                   const double t = s.node_angle(j);
                                   const double r = s.samples()[j];
                                   pts[j] = {s.center().x + r * std::cos(t),
                                             s.center().y + r * std::sin(t)};
                                 }
                                 double best = 0.0;
                                 for (std::size_t i = 0; i < m; ++i) {
                                   for (std::size_t j = i + 1; j < m; ++j) {
                                     best = std::max(best, norm(pts[i] - pts[j]));
                                   }
                                 }
                                 return best;
                               },
                               [](const Ball& b) { return 2.0 * b.radius(); }},
                    set);
}

double isodiametric_ratio(const SetGeometry& set) {
  const double vol = volume(set);
  const double diam = diameter(set);
  if (!(vol > 0.0) || !(diam > 0.0)) {
    throw InvalidArgument("isodiametric ratio needs positive volume and diameter");
  }
  return std::pow(vol, 1.0 / dimension(set)) / diam;
}

SetGeometry scaled(const SetGeometry& set, double factor) {
  return std::visit(Overloaded{[&](const IntervalSet& s) -> SetGeometry { return s.scaled(factor); },
                               [&](const StarShape2D& s) -> SetGeometry { return s.scaled(factor); },
                               [&](const Ball& b) -> SetGeometry {
                                 if (!(factor > 0.0)) {
                                   throw InvalidArgument("scale factor must be positive");
                                 }
                                 std::vector<double> c(b.center().begin(), b.center().end());
                                 for (double& v : c) v *= factor;
                                 return Ball(std::move(c), factor * b.radius());
                               }},
                    set);
}

SetGeometry translated(const SetGeometry& set, std::span<const double> offset) {
  if (static_cast<int>(offset.size()) != dimension(set)) {
    throw InvalidArgument("translation offset dimension does not match the set");
  }
  return std::visit(
      Overloaded{[&](const IntervalSet& s) -> SetGeometry { return s.translated(offset[0]); },
                 [&](const StarShape2D& s) -> SetGeometry {
                   return s.translated({offset[0], offset[1]});
                 },
                 [&](const Ball& b) -> SetGeometry {
                   std::vector<double> c(b.center().begin(), b.center().end());
                   for (std::size_t i = 0; i < c.size(); ++i) c[i] += offset[i];
                   return Ball(std::move(c), b.radius());
                 }},
      set);
}

IntervalSet as_intervals(const Ball& ball) {
  if (ball.dim() != 1) throw InvalidArgument("only one-dimensional balls are intervals");
  const double c = ball.center()[0];
  return IntervalSet({{c - ball.radius(), c + ball.radius()}});
}

StarShape2D as_star(const Ball& ball, std::size_t resolution) {
  if (ball.dim() != 2) throw InvalidArgument("only two-dimensional balls are star shapes");
  return StarShape2D({ball.center()[0], ball.center()[1]},
                     std::vector<double>(resolution, ball.radius()));
}

RescaledProblem unit_volume_rescale(const SetGeometry& set, const Params& params) {
  const int n = dimension(set);
  if (params.n != n) throw InvalidArgument("Params.n does not match the set dimension");
  const double m = volume(set);
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("cannot rescale a set of zero volume");
  RescaledProblem out{scaled(set, std::pow(m, -1.0 / n)), params.with_mass(m), m};
  return out;
}

DilationIdentity dilation_identity(const SetGeometry& set_star, const Params& params) {
  const auto rescaled = unit_volume_rescale(set_star, params);
  const double power = diameter_power(params.n, params.s);
  DilationIdentity id;
  id.lhs = rescaled.params.eps * std::pow(diameter(rescaled.set), power);
  id.rhs = std::pow(std::pow(rescaled.mass, beta_exponent(params)) / isodiametric_ratio(set_star),
                    power);
  id.relative_residual = std::abs(id.lhs - id.rhs) / std::max(std::abs(id.lhs), std::abs(id.rhs));
  return id;
}

// ---------------------------------------------------------------- meshes

double BoundaryMesh::total_weight() const { return compensated_sum(weights); }

BoundaryMesh boundary_mesh(const IntervalSet& set) {
  BoundaryMesh mesh;
  mesh.dim = 1;
  for (const auto& [a, b] : set.intervals()) {
    mesh.points.push_back({a, 0.0});
    mesh.normals.push_back({-1.0, 0.0});
    mesh.weights.push_back(1.0);
    mesh.points.push_back({b, 0.0});
    mesh.normals.push_back({1.0, 0.0});
    mesh.weights.push_back(1.0);
  }
  return mesh;
}

BoundaryMesh boundary_mesh(const StarShape2D& shape, std::size_t resolution) {
  if (resolution < 4) throw InvalidArgument("boundary mesh resolution must be at least 4");
  const StarShape2D s = shape.resampled(resolution);
  const std::size_t q = resolution;
  const auto r1 = s.node_derivative(1);
  const auto r2 = s.node_derivative(2);
  const AngleTable table(q);

  BoundaryMesh mesh;
  mesh.dim = 2;
  mesh.center = s.center();
  mesh.points.resize(q);
  mesh.normals.resize(q);
  mesh.tangents.resize(q);
  mesh.weights.resize(q);
  mesh.speed.resize(q);
  mesh.curvature.resize(q);
  const double h = kTwoPi / static_cast<double>(q);
  for (std::size_t j = 0; j < q; ++j) {
    const Vec2 e{table.cos_[j], table.sin_[j]};
    const Vec2 e_perp{-e.y, e.x};
    const double r = s.samples()[j];
    const Vec2 d1 = r1[j] * e + r * e_perp;
    const Vec2 d2 = (r2[j] - r) * e + 2.0 * r1[j] * e_perp;
    const double sp = norm(d1);
    const Vec2 tau = (1.0 / sp) * d1;
    mesh.points[j] = s.center() + r * e;
    mesh.tangents[j] = tau;
    mesh.normals[j] = {tau.y, -tau.x};
    mesh.speed[j] = sp;
    mesh.curvature[j] = cross(d1, d2) / (sp * sp * sp);
    mesh.weights[j] = sp * h;
  }
  return mesh;
}

BoundaryMesh boundary_mesh(const StarShape2D& shape, std::size_t resolution, double phase) {
  if (phase == 0.0) return boundary_mesh(shape, resolution);
  if (resolution < 4) throw InvalidArgument("boundary mesh resolution must be at least 4");
  const auto coeffs = resolution == shape.resolution()
                          ? shape.coefficients()
                          : truncate_modes(shape.coefficients(), (resolution - 1) / 2);
  const std::size_t q = resolution;
  BoundaryMesh mesh;
  mesh.dim = 2;
  mesh.center = shape.center();
  mesh.points.resize(q);
  mesh.normals.resize(q);
  mesh.tangents.resize(q);
  mesh.weights.resize(q);
  mesh.speed.resize(q);
  mesh.curvature.resize(q);
  const double h = kTwoPi / static_cast<double>(q);
  for (std::size_t j = 0; j < q; ++j) {
    const double t = phase + h * static_cast<double>(j);
    const Vec2 e{std::cos(t), std::sin(t)};
    const Vec2 e_perp{-e.y, e.x};
    const double r = evaluate_series(coeffs, t, 0);
    const double r1 = evaluate_series(coeffs, t, 1);
    const double r2 = evaluate_series(coeffs, t, 2);
    const Vec2 d1 = r1 * e + r * e_perp;
    const Vec2 d2 = (r2 - r) * e + 2.0 * r1 * e_perp;
    const double sp = norm(d1);
    const Vec2 tau = (1.0 / sp) * d1;
    mesh.points[j] = shape.center() + r * e;
    mesh.tangents[j] = tau;
    mesh.normals[j] = {tau.y, -tau.x};
    mesh.speed[j] = sp;
    mesh.curvature[j] = cross(d1, d2) / (sp * sp * sp);
    mesh.weights[j] = sp * h;
  }
  return mesh;
}

BoundaryMesh boundary_mesh(const SetGeometry& set, std::size_t resolution) {
  return std::visit(Overloaded{[](const IntervalSet& s) { return boundary_mesh(s); },
                               [&](const StarShape2D& s) { return boundary_mesh(s, resolution); },
                               [&](const Ball& b) {
                                 if (b.dim() == 1) return boundary_mesh(as_intervals(b));
                                 if (b.dim() == 2) {
                                   return boundary_mesh(as_star(b, resolution), resolution);
                                 }
                                 throw InvalidArgument("boundary meshes exist for n <= 2 only");
                               }},
                    set);
}

}  // namespace nlok
