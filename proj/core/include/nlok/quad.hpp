#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlok/error.hpp"
#include "nlok/sets.hpp"

namespace nlok {

struct QuadTolerance {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_subdivisions = 4000;

  void validate() const;
};

/// Principal-value request: integrate outside a window of radius pairing_radius
/// around singular_point, and inside it either pair y with 2x - y
/// (cancellation = true) or integrate both sides separately.
struct PVSpec {
  std::vector<double> singular_point;
  double pairing_radius = 1.0;
  bool cancellation = true;
};

struct QuadResult {
  double estimate = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  long evaluations = 0;

  std::string to_json() const;
};

/// Tolerance not met within the subdivision budget. best() holds the estimate
/// and error bound reached so far.
class QuadratureError : public DomainError {
 public:
  QuadratureError(const std::string& what, QuadResult best);
  const QuadResult& best() const noexcept { return best_; }

 private:
  QuadResult best_;
};

/// int_a^b |x - y|^{-p} dy for x outside (a, b). Infinite endpoints are allowed
/// when p > 1. p = 1 is rejected, and for p > 1 x may not touch [a, b].
double kernel_primitive(double a, double b, double x, double p);

/// A partition of the line into alternating pieces, used for sets that are not
/// bounded (half-lines) as well as for finite interval unions.
struct LinePartition {
  /// Strictly increasing.
  std::vector<double> breakpoints;
  /// Whether (-inf, breakpoints[0]) belongs to the set.
  bool first_inside = false;

  static LinePartition from_intervals(const IntervalSet& set);
};

/// PV of int (chi_{E^c} - chi_E)(y) |x - y|^{-1-s} dy at an endpoint x of E. The
/// divergent one-sided contributions next to x cancel in closed form.
double pv_pair_integral(const LinePartition& set, double x, double s);
double pv_pair_integral(const IntervalSet& set, double x, double s);

/// Global adaptive Gauss-Kronrod (7/15) integration with a deterministic
/// bisection order. Infinite limits are mapped to (0, 1]; `decay` (> 1) is the
/// power of the integrand's decay at infinity and fixes the map's exponent.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadTolerance& tol, std::span<const double> breakpoints = {},
                     double decay = 2.0);

/// Integrand for the brute-force oracle. `breakpoints` lists known jumps
/// (1D only); `decay` as in integrate().
struct ScalarIntegrand {
  std::function<double(std::span<const double>)> f;
  std::vector<double> breakpoints;
  double decay = 2.0;
};

/// Axis-aligned box; 1D boxes may have infinite sides.
struct Box {
  std::vector<std::pair<double, double>> bounds;
};

using OracleRegion = std::variant<Box, IntervalSet, StarShape2D>;

/// Iterated adaptive quadrature of the integrand over the region. With `pv`
/// (1D only) the window around the singular point is integrated on shrinking
/// annuli and the limit is Richardson-extrapolated.
QuadResult brute_oracle(const ScalarIntegrand& integrand, const OracleRegion& region,
                        const QuadTolerance& tol, const std::optional<PVSpec>& pv = {});

/// Independent evaluations for star shapes. Each line through x is cut by the
/// boundary into pieces on which the radial integrals are exact; the remaining
/// integral over line directions is adaptive. `theta` is the polar angle of a
/// boundary point; a Vec2 point must lie off the boundary.
QuadResult oracle_curvature_star(const StarShape2D& shape, double theta, double s,
                                 const QuadTolerance& tol);
QuadResult oracle_potential_star(const StarShape2D& shape, double theta, double alpha,
                                 const QuadTolerance& tol);
QuadResult oracle_potential_star(const StarShape2D& shape, Vec2 x, double alpha,
                                 const QuadTolerance& tol);
std::array<QuadResult, 2> oracle_grad_potential_star(const StarShape2D& shape, double theta,
                                                     double alpha, const QuadTolerance& tol);

}  // namespace nlok
