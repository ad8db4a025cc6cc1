#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlok/functionals.hpp"
#include "nlok/params.hpp"
#include "nlok/sets.hpp"

namespace nlok {

/// sup over node pairs of |v_i - v_j| / |x_i - x_j|.
double lipschitz_defect(const BoundaryMesh& mesh, std::span<const double> values);

/// delta_s from the curvature and, through the Euler-Lagrange equation, from
/// c eps sup |Delta V| / |Delta x|. On critical sets the two agree.
struct DeltaResult {
  double from_curvature = 0.0;
  double from_potential = 0.0;
};
DeltaResult lipschitz_defect_delta(const BoundaryFields& fields, const Params& p);

/// diam^(2n+s+1) * delta.
double eta(double diameter, int n, double s, double delta);

/// inf over centers p of (R - r) / diam with B_r(p) in E in B_R(p), by
/// coordinate descent from the polar center with 3 restarts. Balls give 0.
/// Only local optimality is guaranteed. 1D sets are rejected.
double annulus_deficit_rho(const SetGeometry& set, std::size_t samples = 2048);

struct LambdaResult {
  /// Weighted boundary mean of zeta.
  double lambda_hat = 0.0;
  /// sup over nodes |zeta - lambda_hat|.
  double residual = 0.0;
  /// [(n-s) P_s / c_var + c eps (n - alpha/2) Riesz] / (n |E|).
  double lambda_cross = 0.0;
};
LambdaResult lambda_hat_and_residual(const SetGeometry& set, const BoundaryFields& fields, const Params& p,
                                     std::size_t resolution = kDefaultResolution);

enum class IdentityKind { Au1, Au2, Lal, Minkowski, TangentialBall };
std::string to_string(IdentityKind kind);
IdentityKind identity_kind_from_string(const std::string& name);
inline constexpr IdentityKind kAllIdentities[] = {IdentityKind::Au1, IdentityKind::Au2, IdentityKind::Lal,
                                                   IdentityKind::Minkowski, IdentityKind::TangentialBall};

struct IdentityOptions {
  std::size_t resolution = kDefaultResolution;
  /// Lal: number of seeded interior probe points.
  std::size_t probes = 50;
  std::uint64_t seed = 12345;
};

/// Both sides of an identity and |lhs - rhs| / max(|lhs|, |rhs|, floor).
/// Lal reports lhs = max V_E over the probes, rhs = V_B(0) and the positive
/// part of the relative excess. TangentialBall compares the ratio of
/// sup |grad V . tau| between S and its half-deviation shape with the ratio of
/// their mu values.
struct IdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};
IdentityResult identity_check(const SetGeometry& set, const Params& p, IdentityKind kind,
                              const IdentityOptions& opts = {});

/// c_var = (n - s) P_s(B) / (boundary integral of kappa_B x.nu) on a ball of
/// the given radius. n = 1 and n >= 3 use closed forms, n = 2 the mesh.
double calibrate_variation_constant(double s, int n, double radius = 1.0,
                                    std::size_t resolution = kDefaultResolution);

/// max |r - R_B| + max |r'| over dense samples, R_B the equal-area radius.
double ball_map_mu(const StarShape2D& shape);

/// The same shape with deviation r - R_B halved, rescaled to the original area.
StarShape2D half_deviation_shape(const StarShape2D& shape);

struct DiagnoseOptions {
  IdentityOptions identity;
  std::vector<IdentityKind> identities;
  /// Compare against resolution / 2 for error bars (2D only).
  bool error_estimates = true;
};

struct DiagnosticsReport {
  int n = 1;
  Params params;
  std::size_t mesh_resolution = 0;
  double volume = 0.0;
  double diameter = 0.0;
  double delta_s = 0.0;
  double delta_s_potential = 0.0;
  double eta_s = 0.0;
  /// delta_s / eps (the constant in delta_s <= C eps); NaN when eps = 0.
  double implied_C = 0.0;
  /// NaN for 1D sets.
  double rho = 0.0;
  double iso_ratio = 0.0;
  double lambda_hat = 0.0;
  double lambda_cross = 0.0;
  double el_residual = 0.0;
  /// sup |grad V . tau| (2D, alpha < 1), else NaN.
  double tangential_grad_sup = 0.0;
  /// NaN for 1D sets.
  double mu = 0.0;
  double perimeter = 0.0;
  double riesz = 0.0;
  std::map<std::string, double> identity_residuals;
  std::map<std::string, double> error_estimates;

  std::string to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

DiagnosticsReport diagnose(const SetGeometry& set, const Params& p, std::size_t resolution = kDefaultResolution,
                           const DiagnoseOptions& opts = {});

}  // namespace nlok
