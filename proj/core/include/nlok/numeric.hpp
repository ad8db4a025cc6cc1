#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace nlok {

/// Neumaier-compensated accumulator. Summation order is the call order, so
/// results are reproducible whenever the caller's order is fixed.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// (1+z)^p - 1, accurate for small z.
inline double pow1p_minus_one(double p, double z) { return std::expm1(p * std::log1p(z)); }

/// 2 - (1-delta)^b - (1+delta)^b for 0 <= delta < 1, evaluated through the even
/// binomial series when delta is small so that no digits are lost to cancellation.
double symmetric_second_difference(double b, double delta);

/// (1+x+y)^p - (1+x)^p - (1+y)^p + 1 for x, y >= 0, cancellation-free.
double mixed_difference(double p, double x, double y);

/// Surface area of the unit sphere S^{k} in R^{k+1}; k = 0 gives 2 (two points).
double unit_sphere_area(int k);

/// Lebesgue measure of the unit ball in R^n.
double unit_ball_volume(int n);

/// Gauss-Legendre nodes and weights mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre_unit(std::size_t n);

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace nlok
