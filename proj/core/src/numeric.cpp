#include "nlok/numeric.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>

#include "nlok/error.hpp"

namespace nlok {

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double symmetric_second_difference(double b, double delta) {
  if (!(delta >= 0.0) || delta >= 1.0) {
    throw InvalidArgument("symmetric_second_difference: delta must lie in [0, 1)");
  }
  if (delta == 0.0) return 0.0;
  if (delta > 0.25) {
    return 2.0 - std::pow(1.0 - delta, b) - std::pow(1.0 + delta, b);
  }
  // 2 - (1-d)^b - (1+d)^b = -2 * sum_{k>=1} C(b, 2k) d^{2k}
  const double d2 = delta * delta;
  double binom = 1.0;  // C(b, j)
  double power = 1.0;  // d^{2k}
  CompensatedSum acc;
  for (int j = 1; j < 800; ++j) {
    binom *= (b - j + 1) / j;
    if (j % 2 == 1) continue;
    power *= d2;
    const double term = binom * power;
    acc.add(term);
    if (j > 4 && std::abs(term) <= 1e-19 * std::abs(acc.value())) break;
    if (binom == 0.0) break;
  }
  return -2.0 * acc.value();
}

double mixed_difference(double p, double x, double y) {
  if (x < 0.0 || y < 0.0) throw InvalidArgument("mixed_difference: x and y must be nonnegative");
  if (x == 0.0 || y == 0.0) return 0.0;
  if (x + y > 0.5) {
    // (1+y)^p[(1 + x/(1+y))^p - 1] - [(1+x)^p - 1]
    const double a = std::pow(1.0 + y, p) * pow1p_minus_one(p, x / (1.0 + y));
    const double b = pow1p_minus_one(p, x);
    return a - b;
  }
  // sum_{k>=2} C(p,k) [(x+y)^k - x^k - y^k]; each bracket is a positive sum.
  const double big = std::max(x, y);
  const double small = std::min(x, y);
  const double ratio = small / big;
  double binom = p;  // C(p, 1)
  double big_pow = big;
  double small_pow = small;
  CompensatedSum acc;
  for (int k = 2; k < 400; ++k) {
    binom *= (p - k + 1) / k;
    big_pow *= big;
    small_pow *= small;
    const double bracket = big_pow * std::expm1(k * std::log1p(ratio)) - small_pow;
    const double term = binom * bracket;
    acc.add(term);
    if (std::abs(term) <= 1e-19 * std::abs(acc.value())) break;
    if (binom == 0.0) break;
  }
  return acc.value();
}

double unit_sphere_area(int k) {
  if (k < 0) throw InvalidArgument("unit_sphere_area: dimension must be >= 0");
  const double m = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

double unit_ball_volume(int n) {
  if (n < 1) throw InvalidArgument("unit_ball_volume: dimension must be >= 1");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

GaussRule gauss_legendre_unit(std::size_t n) {
  if (n == 0) throw InvalidArgument("gauss_legendre_unit: need at least one node");
  const int order = static_cast<int>(n);
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  GaussRule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  auto weight_of = [order](double x) {
    const double dp = boost::math::legendre_p_prime(order, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  // zeros holds the nonnegative roots in increasing order; mirror them.
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(0.5 * (1.0 - *it));
    rule.weights.push_back(0.5 * weight_of(*it));
  }
  if (n % 2 == 1) {
    rule.nodes.push_back(0.5);
    rule.weights.push_back(0.5 * weight_of(0.0));
  }
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(0.5 * (1.0 + z));
    rule.weights.push_back(0.5 * weight_of(z));
  }
  return rule;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("fit_line: need at least two paired samples");
  }
  const double n = static_cast<double>(x.size());
  const double mx = compensated_sum(x) / n;
  const double my = compensated_sum(y) / n;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (sxx.value() == 0.0) throw InvalidArgument("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy.value() == 0.0 ? 1.0
                                     : (sxy.value() * sxy.value()) / (sxx.value() * syy.value());
  return fit;
}

}  // namespace nlok
