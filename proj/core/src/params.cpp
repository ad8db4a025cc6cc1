#include "nlok/params.hpp"

#include <cmath>
#include <sstream>

#include "nlok/error.hpp"

namespace nlok {

void Params::validate() const {
  if (n < 1) throw InvalidArgument("n must be a positive integer");
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < n)) throw InvalidArgument("alpha must lie in (0,n)");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be a nonnegative real");
  if (mass && !(*mass > 0.0 && std::isfinite(*mass))) {
    throw InvalidArgument("mass must be a positive real");
  }
  if (!(c_coupling > 0.0)) throw InvalidArgument("c_coupling must be positive");
  if (!(c_var > 0.0)) throw InvalidArgument("c_var must be positive");
  if (mass) {
    const double expected = eps_from_mass(n, s, alpha, *mass);
    if (std::abs(expected - eps) > 1e-12 * std::max(1.0, expected)) {
      throw InvalidArgument("eps and mass are inconsistent: eps must equal mass^(1-alpha/n+s/n)");
    }
  }
}

Params Params::with_mass(double m) const {
  Params out = *this;
  out.mass = m;
  out.eps = eps_from_mass(n, s, alpha, m);
  return out;
}

Params Params::with_eps(double e) const {
  Params out = *this;
  out.mass.reset();
  out.eps = e;
  return out;
}

double eps_from_mass(int n, double s, double alpha, double mass) {
  if (!(mass > 0.0)) throw InvalidArgument("mass must be positive");
  return std::pow(mass, 1.0 - alpha / n + s / n);
}

double mass_from_eps(int n, double s, double alpha, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive to recover a mass");
  return std::pow(eps, 1.0 / (1.0 - alpha / n + s / n));
}

double beta_exponent(const Params& p) {
  return (p.n + p.s - p.alpha) / (diameter_power(p.n, p.s) * p.n);
}

double diameter_power(int n, double s) { return 2.0 * n + s + 1.0; }

std::string describe(const Params& p) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << p.n << " s=" << p.s << " alpha=" << p.alpha << " eps=" << p.eps;
  if (p.mass) os << " mass=" << *p.mass;
  os << " c_coupling=" << p.c_coupling << " c_var=" << p.c_var;
  return os.str();
}

}  // namespace nlok
