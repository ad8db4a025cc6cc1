#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "nlok/diagnostics.hpp"
#include "nlok/error.hpp"
#include "nlok/params.hpp"
#include "nlok/sets.hpp"

namespace nlok {

/// r(theta) = r0 + sum a_k cos k theta + b_k sin k theta sampled at
/// `resolution` nodes; throws InvalidArgument if r is not positive.
StarShape2D fourier_shape(const FourierCoefficients& coeffs, std::size_t resolution = kDefaultResolution,
                          Vec2 center = {});

/// Uniform scaling about the polar center to unit area.
StarShape2D volume_project(const StarShape2D& shape);

struct OptimizerOptions {
  std::size_t resolution = kDefaultResolution;
  /// Modes above this are zeroed after every step.
  std::size_t max_modes = 16;
  double step_initial = 1e-3;
  double step_max = 0.5;
  double step_min = 1e-12;
  /// Target for sup |zeta - lambda_hat|.
  double tol = 1e-3;
  int max_iter = 500;
  /// Identities evaluated in the final report.
  std::vector<IdentityKind> identities;

  void validate() const;
};

struct OptimizerState {
  StarShape2D shape;
  double step_size = 1e-3;
  int iteration = 0;
  /// EL residual before each accepted step (and the last one after it).
  std::vector<double> residual_history;
  /// F_eps after each accepted step, starting with the initial value.
  std::vector<double> energy_history;
  double volume_drift = 0.0;
  /// Weighted boundary mean of the last applied normal velocity.
  double last_velocity_mean = 0.0;

  explicit OptimizerState(StarShape2D s, double step = 1e-3) : shape(std::move(s)), step_size(step) {}
};

/// Backtracking failed: no energy decrease down to the minimal step.
class StallError : public DomainError {
 public:
  StallError(const std::string& what, OptimizerState state) : DomainError(what), state_(std::move(state)) {}
  const OptimizerState& state() const noexcept { return state_; }

 private:
  OptimizerState state_;
};

/// F_eps = P_s + eps Riesz on the optimizer mesh.
double energy_eps(const StarShape2D& shape, const Params& p, std::size_t resolution);

/// One projected descent step with normal velocity v = -(zeta - lambda_hat):
/// r += tau v speed / r, modes above max_modes removed, area reset to 1.
/// Accepted when F_eps(new) <= F_eps(old) + D / 2, D the first-order change;
/// otherwise tau is halved. The next trial step is min(2 tau, step_max).
OptimizerState el_gradient_step(const OptimizerState& state, const Params& p, const OptimizerOptions& opts = {});

struct CriticalResult {
  StarShape2D shape;
  DiagnosticsReport report;
  OptimizerState state;
  bool converged = false;
};

/// Iterates el_gradient_step until the EL residual is at most opts.tol or
/// opts.max_iter steps were taken. `init` must have unit area. tol = inf
/// returns init unchanged.
CriticalResult find_critical_2d(const StarShape2D& init, const Params& p, const OptimizerOptions& opts = {});

}  // namespace nlok
