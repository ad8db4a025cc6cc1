#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlok/error.hpp"
#include "nlok/params.hpp"
#include "nlok/sets.hpp"

namespace nlok {

/// Two segments of length 1/2 separated by the gap (1/2, d).
struct TwoIntervalConfig {
  double d = 1.0;
  Params params;

  void validate() const;
};

/// No sign change of f was found; the coupling is probably above the
/// solvability threshold.
class NoRootError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// (0, 1/2) u (d, d + 1/2).
IntervalSet two_interval_set(const TwoIntervalConfig& cfg);

/// zeta = kappa + c eps V at 0, 1/2, d, d + 1/2. The last two are evaluated on
/// the reflected configuration x -> d + 1/2 - x, which maps E onto itself, so
/// zeta(0) = zeta(d + 1/2) and zeta(1/2) = zeta(d) hold bit for bit.
std::array<double, 4> zeta_endpoints(const TwoIntervalConfig& cfg);

/// kappa + c eps V at an endpoint of any interval union, evaluated directly.
double zeta_1d(const IntervalSet& set, double x, const Params& p);

/// f(d) = zeta(1/2) - zeta(0), with both brackets written as symmetric second
/// differences so that large d keeps full relative accuracy.
double f_closed_form(double d, const Params& p);

/// Leading two terms of the large-d expansion of f scaled by d^(1+alpha), and
/// the point d_eps where they balance.
struct LeadingOrder {
  std::function<double(double)> g;
  double d_eps = 0.0;
  double g_infinity = 0.0;
};
LeadingOrder g_and_d_eps(const Params& p);

struct RootOptions {
  /// Probes 2 d_eps, 4 d_eps, ... until f changes sign.
  int probe_budget = 64;
  /// Certification threshold on |f(d_star)|.
  double f_tol = 1e-10;
};

struct RootResult {
  double d_star = 0.0;
  double d_eps = 0.0;
  double f_at_root = 0.0;
  /// Final bracket [lo, hi] with f(lo) < 0 <= f(hi).
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int probes = 0;
  int bisections = 0;
};

/// Root of f on (d_eps, inf). Throws NoRootError when no bracket exists and
/// DomainError when the located root fails the |f| certificate.
RootResult solve_critical_d(const Params& p, const RootOptions& opts = {});

struct SweepRecord {
  double eps = 0.0;
  double d_star = 0.0;
  double d_eps = 0.0;
  double diameter = 0.0;
  double f_at_root = 0.0;
  /// max - min of zeta over the four endpoints.
  double residual = 0.0;
  bool ok = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  double slope = 0.0;
  double intercept = 0.0;
  double target_slope = 0.0;
  double rel_error = 0.0;
  /// min over successful rows of diam * eps^(1/(1+s-alpha)).
  double c_o_implied = 0.0;
  int successes = 0;
};

/// eps values 10^{-a}, 10^{-a-step}, ..., down to 10^{-b}.
std::vector<double> geometric_grid(double first, double last, std::size_t count);

/// Solves for every eps (in parallel, reported in grid order) and fits
/// log(diam) against log(1/eps). Needs at least 4 successful rows.
SweepResult epsilon_sweep(const Params& p0, std::span<const double> eps_grid, const RootOptions& opts = {});

/// Largest eps (to relative precision rel) at which solve_critical_d still
/// succeeds, searched by bisection in log eps between eps_lo (must succeed)
/// and eps_hi (must fail). Assumes solvability is monotone in eps.
double empirical_eps_bar(const Params& p, double eps_lo = 1e-6, double eps_hi = 10.0, double rel = 1e-6);

}  // namespace nlok
