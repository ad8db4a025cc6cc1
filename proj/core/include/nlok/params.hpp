#pragma once

#include <optional>
#include <string>

namespace nlok {

/// Problem constants for the rescaled energy P_s + eps * Riesz_alpha.
///
/// `eps` and `mass` are tied by eps = mass^(1 - alpha/n + s/n); set one and
/// derive the other with with_mass() / with_eps().
struct Params {
  int n = 1;
  double s = 0.5;
  double alpha = 0.5;
  double eps = 0.0;
  std::optional<double> mass;
  /// Coupling in kappa + c * eps * V = lambda. A symmetric double integral
  /// has first variation 2V, hence the default.
  double c_coupling = 2.0;
  /// Normalization between d/dt P_s and the boundary integral of kappa X.nu.
  double c_var = 1.0;

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;

  /// Copy with mass set and eps derived from it.
  Params with_mass(double m) const;
  /// Copy with eps set (mass cleared, since it is only defined through eps).
  Params with_eps(double e) const;
};

/// eps = m^(1 - alpha/n + s/n)
double eps_from_mass(int n, double s, double alpha, double mass);
/// Inverse of eps_from_mass.
double mass_from_eps(int n, double s, double alpha, double eps);

/// Volume/diameter scale exponent beta = (n + s - alpha) / ((2n + s + 1) n).
double beta_exponent(const Params& p);

/// 2n + s + 1, the power of the diameter appearing in the rigidity estimates.
double diameter_power(int n, double s);

std::string describe(const Params& p);

}  // namespace nlok
