#include "nlok/periodic_rule.hpp"

#include <cmath>
#include <numbers>

#include "nlok/error.hpp"
#include "nlok/numeric.hpp"

namespace nlok {

std::vector<double> singular_weight_moments(double q, std::size_t kmax) {
  if (!(q < 1.0)) throw InvalidArgument("singular weight exponent must be < 1");
  std::vector<double> m(kmax + 1);
  const double g = std::tgamma(1.0 - 0.5 * q);
  m[0] = 2.0 * std::numbers::pi * std::tgamma(1.0 - q) / (g * g);
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double kk = static_cast<double>(k);
    m[k] = m[k - 1] * (kk - 1.0 + 0.5 * q) / (kk - 0.5 * q);
  }
  return m;
}

std::vector<double> singular_periodic_weights(std::size_t m, double q) {
  if (m < 4 || m % 2 != 0) throw InvalidArgument("periodic rule needs an even node count >= 4");
  const std::size_t half = m / 2;
  const auto mom = singular_weight_moments(q, half);
  std::vector<double> cos_table(m);
  for (std::size_t l = 0; l < m; ++l) {
    cos_table[l] = std::cos(2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(m));
  }
  std::vector<double> r(m);
  for (std::size_t l = 0; l < m; ++l) {
    CompensatedSum acc;
    acc.add(mom[0]);
    for (std::size_t k = 1; k < half; ++k) acc.add(2.0 * mom[k] * cos_table[(k * l) % m]);
    acc.add(l % 2 == 0 ? mom[half] : -mom[half]);
    r[l] = acc.value() / static_cast<double>(m);
  }
  return r;
}

}  // namespace nlok
