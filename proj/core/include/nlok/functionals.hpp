#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "nlok/params.hpp"
#include "nlok/sets.hpp"

namespace nlok {

inline constexpr std::size_t kDefaultResolution = 256;

struct EnergyBreakdown {
  double perimeter_term = 0.0;
  double riesz_term = 0.0;
  double total_F = 0.0;
  double total_F_eps = 0.0;
  double eps_used = 0.0;
};

/// A value together with a conservative error bar (difference to the result at
/// half the resolution; zero for closed forms).
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// All 2D quantities use the boundary mesh of the given (even) resolution.
// 1D quantities are closed forms and ignore it.

/// P_s(E), the double integral of |x-y|^{-n-s} over E x E^c.
double frac_perimeter(const SetGeometry& set, double s, std::size_t resolution = kDefaultResolution);
/// Double integral of |x-y|^{-alpha} over E x E.
double riesz_energy(const SetGeometry& set, double alpha, std::size_t resolution = kDefaultResolution);
Estimate frac_perimeter_estimate(const SetGeometry& set, double s,
                                 std::size_t resolution = kDefaultResolution);
Estimate riesz_energy_estimate(const SetGeometry& set, double alpha,
                               std::size_t resolution = kDefaultResolution);

/// F = P_s + Riesz and F_eps = P_s + eps Riesz.
EnergyBreakdown energy(const SetGeometry& set, const Params& p,
                       std::size_t resolution = kDefaultResolution);

/// V_E(x) at any point (boundary points included).
double potential(const SetGeometry& set, std::span<const double> x, double alpha,
                 std::size_t resolution = kDefaultResolution);
/// Gradient of V_E. At boundary points this needs alpha < n - 1, so it is
/// refused for n = 1 and for alpha >= 1 in the plane.
std::vector<double> grad_potential(const SetGeometry& set, std::span<const double> x, double alpha,
                                   std::size_t resolution = kDefaultResolution);
/// grad V . tau at mesh node `node` (2D only).
double tangential_grad_potential(const SetGeometry& set, std::size_t node, double alpha,
                                 std::size_t resolution = kDefaultResolution);
/// Principal-value fractional curvature at a boundary point, positive on convex sets.
double frac_curvature(const SetGeometry& set, std::span<const double> x, double s,
                      std::size_t resolution = kDefaultResolution);
/// kappa + c eps V at a boundary point.
double zeta(const SetGeometry& set, std::span<const double> x, const Params& p,
            std::size_t resolution = kDefaultResolution);

// One-dimensional closed forms.
double potential(const IntervalSet& set, double x, double alpha);
double grad_potential(const IntervalSet& set, double x, double alpha);
double frac_curvature(const IntervalSet& set, double x, double s);

/// Per-node fields on the boundary mesh. For 1D sets the nodes are the
/// endpoints and the gradient fields stay empty.
struct BoundaryFields {
  BoundaryMesh mesh;
  std::vector<double> kappa;
  std::vector<double> potential;
  std::vector<Vec2> grad;
  std::vector<double> grad_tangential;
  std::vector<double> zeta;
};
BoundaryFields boundary_fields(const SetGeometry& set, const Params& p,
                               std::size_t resolution = kDefaultResolution, bool with_gradient = true);

// Node evaluators on a 2D star mesh (singular product quadrature).
std::vector<double> curvature_on_mesh(const BoundaryMesh& mesh, double s);
std::vector<double> potential_on_mesh(const BoundaryMesh& mesh, double alpha);
std::vector<Vec2> grad_potential_on_mesh(const BoundaryMesh& mesh, double alpha);
double perimeter_on_mesh(const BoundaryMesh& mesh, double s);
double riesz_on_mesh(const BoundaryMesh& mesh, double alpha);

/// V_E and grad V_E at points off the boundary of a star shape by the
/// trapezoid rule on a boundary resampled finely enough for the point's
/// distance to the curve. Resampled meshes (resolution * 2^k, up to about
/// 2^17 nodes) are built on first use and shared between threads.
class OffBoundaryEvaluator {
 public:
  OffBoundaryEvaluator(const StarShape2D& shape, std::size_t resolution = kDefaultResolution);

  double potential(Vec2 x, double alpha) const;
  Vec2 grad_potential(Vec2 x, double alpha) const;
  /// Distance from x to the nearest node of the base mesh.
  double node_distance(Vec2 x) const;

 private:
  const BoundaryMesh& mesh_for(Vec2 x) const;

  StarShape2D shape_;
  double scale_ = 1.0;
  std::vector<std::size_t> sizes_;
  std::unique_ptr<std::once_flag[]> once_;
  std::unique_ptr<BoundaryMesh[]> levels_;
  BoundaryMesh base_;
};

double potential_off_boundary(const StarShape2D& shape, Vec2 x, double alpha,
                              std::size_t resolution = kDefaultResolution);
Vec2 grad_potential_off_boundary(const StarShape2D& shape, Vec2 x, double alpha,
                                 std::size_t resolution = kDefaultResolution);

// Balls in R^n.
double ball_curvature(int n, double s, double r);
double ball_perimeter(int n, double s, double r);
double ball_center_potential(int n, double alpha, double r);

}  // namespace nlok
