#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "nlok/params.hpp"

namespace nlok {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Finite union of disjoint open intervals on the line, sorted left to right.
class IntervalSet {
 public:
  using Interval = std::pair<double, double>;

  IntervalSet() = default;
  /// Sorts the input; rejects empty, overlapping or touching intervals.
  explicit IntervalSet(std::vector<Interval> intervals);

  std::span<const Interval> intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }

  /// Sorted boundary points a_1 < b_1 < a_2 < ... < b_k.
  std::vector<double> endpoints() const;
  bool contains(double x) const;
  bool is_endpoint(double x) const;

  IntervalSet scaled(double factor) const;
  IntervalSet translated(double offset) const;

 private:
  std::vector<Interval> intervals_;
};

/// Truncated trigonometric series r(theta) = r0 + sum_k a_k cos(k theta) + b_k sin(k theta).
/// a[k-1], b[k-1] hold mode k.
struct FourierCoefficients {
  double r0 = 1.0;
  std::vector<double> a;
  std::vector<double> b;

  std::size_t modes() const { return std::max(a.size(), b.size()); }
  double cos_coeff(std::size_t k) const { return k - 1 < a.size() ? a[k - 1] : 0.0; }
  double sin_coeff(std::size_t k) const { return k - 1 < b.size() ? b[k - 1] : 0.0; }
};

/// Planar set {center + rho (cos t, sin t) : 0 <= rho < r(t)} with r sampled at
/// M uniform angles t_j = 2 pi j / M. Between nodes r is the trigonometric
/// interpolant of the samples, so samples and coefficients always agree at the
/// nodes.
class StarShape2D {
 public:
  StarShape2D(Vec2 center, std::vector<double> samples);
  /// Samples the series at `resolution` nodes; needs modes() < resolution / 2 and
  /// a strictly positive radius everywhere.
  static StarShape2D from_coefficients(Vec2 center, const FourierCoefficients& coeffs,
                                       std::size_t resolution);

  Vec2 center() const { return center_; }
  std::span<const double> samples() const { return samples_; }
  std::size_t resolution() const { return samples_.size(); }
  double node_angle(std::size_t j) const;
  /// Interpolant coefficients, including the Nyquist cosine for even M.
  const FourierCoefficients& coefficients() const { return coeffs_; }

  double radius(double theta) const;
  /// d^order r / d theta^order of the interpolant, order in {1, 2}.
  double radius_derivative(double theta, int order = 1) const;
  /// Derivatives of the interpolant at the sample nodes.
  std::vector<double> node_derivative(int order) const;
  double min_radius() const;
  double max_radius() const;

  Vec2 boundary_point(double theta) const;
  bool contains(Vec2 p) const;

  StarShape2D resampled(std::size_t resolution) const;
  /// Keeps modes k <= max_mode.
  StarShape2D truncated(std::size_t max_mode) const;
  StarShape2D scaled(double factor) const;
  StarShape2D translated(Vec2 offset) const;

 private:
  StarShape2D(Vec2 center, std::vector<double> samples, FourierCoefficients coeffs);

  Vec2 center_;
  std::vector<double> samples_;
  FourierCoefficients coeffs_;
};

/// Euclidean ball in R^n, n = center.size().
class Ball {
 public:
  Ball(std::vector<double> center, double radius);
  std::span<const double> center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return static_cast<int>(center_.size()); }

 private:
  std::vector<double> center_;
  double radius_;
};

using SetGeometry = std::variant<IntervalSet, StarShape2D, Ball>;

int dimension(const SetGeometry& set);
double volume(const SetGeometry& set);
/// Exact for intervals and balls; max over boundary node pairs for star shapes.
double diameter(const SetGeometry& set);
/// |E|^(1/n) / diam(E).
double isodiametric_ratio(const SetGeometry& set);

SetGeometry scaled(const SetGeometry& set, double factor);
/// `offset` must have dimension(set) entries.
SetGeometry translated(const SetGeometry& set, std::span<const double> offset);

/// Concrete representations used by the 1D and 2D evaluators.
IntervalSet as_intervals(const Ball& ball);
StarShape2D as_star(const Ball& ball, std::size_t resolution);

/// Result of the dilation E = m^(-1/n) E_star with eps = m^(1 - alpha/n + s/n).
struct RescaledProblem {
  SetGeometry set;
  Params params;
  double mass = 0.0;
};
RescaledProblem unit_volume_rescale(const SetGeometry& set, const Params& params);

/// Both sides of eps * diam(E)^(2n+s+1) = (m^beta / I(E_star))^(2n+s+1) evaluated
/// independently for E_star and its unit-volume rescaling.
struct DilationIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_residual = 0.0;
};
DilationIdentity dilation_identity(const SetGeometry& set_star, const Params& params);

/// Sampled boundary. For 1D sets the points sit on the x axis, normals are
/// (+-1, 0), tangents are empty and weights are 1. For 2D star shapes nodes are
/// uniform in the polar angle and the parameterization data (speed, curvature)
/// feeds the singular boundary quadrature.
struct BoundaryMesh {
  int dim = 1;
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<Vec2> tangents;
  std::vector<double> weights;
  /// |d point / d theta| at each node (2D only).
  std::vector<double> speed;
  /// Signed curvature of the boundary curve, positive where convex (2D only).
  std::vector<double> curvature;
  /// Origin of the polar parameterization (2D only).
  Vec2 center;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

/// 1D: resolution is ignored. 2D: resolution >= 4 boundary nodes.
BoundaryMesh boundary_mesh(const SetGeometry& set, std::size_t resolution);
BoundaryMesh boundary_mesh(const StarShape2D& shape, std::size_t resolution);
/// Nodes at phase + 2 pi j / resolution, so that any polar angle can be node 0.
BoundaryMesh boundary_mesh(const StarShape2D& shape, std::size_t resolution, double phase);
BoundaryMesh boundary_mesh(const IntervalSet& set);

}  // namespace nlok
