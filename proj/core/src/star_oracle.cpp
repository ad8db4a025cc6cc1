#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "nlok/quad.hpp"

namespace nlok {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

Vec2 to_vec(cd z) { return {z.real(), z.imag()}; }

// (e^{iz} - 1 - iz) / z^2 without cancellation near z = 0.
cd e2(double z) {
  if (std::abs(z) < 1.0) {
    cd term(-0.5, 0.0);
    cd sum = term;
    for (int n = 3; n < 40; ++n) {
      term *= cd(0.0, z) / static_cast<double>(n);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return {(std::cos(z) - 1.0) / (z * z), (std::sin(z) - z) / (z * z)};
}

// y(theta) - center = sum_j c_j exp(i m_j theta) for the interpolating series.
struct ComplexSeries {
  std::vector<int> freq;
  std::vector<cd> coef;
  Vec2 center;

  explicit ComplexSeries(const StarShape2D& shape) : center(shape.center()) {
    const auto& c = shape.coefficients();
    freq.push_back(1);
    coef.emplace_back(c.r0, 0.0);
    for (std::size_t k = 1; k <= c.modes(); ++k) {
      const double a = c.cos_coeff(k);
      const double b = c.sin_coeff(k);
      const int kk = static_cast<int>(k);
      freq.push_back(kk + 1);
      coef.emplace_back(0.5 * a, -0.5 * b);
      freq.push_back(1 - kk);
      coef.emplace_back(0.5 * a, 0.5 * b);
    }
  }

  Vec2 point(double theta) const {
    cd acc = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) acc += coef[j] * std::polar(1.0, freq[j] * theta);
    return center + to_vec(acc);
  }
};

// Crossings of the line x + t u with the boundary, split by the sign of t.
struct Crossings {
  std::vector<double> plus;
  std::vector<double> minus;
  int sigma_plus = 1;   // +1 outside, -1 inside just after t = 0
  int sigma_minus = 1;
};

double refine_root(const std::function<double(double)>& fn, double lo, double hi, double flo,
                   double fhi) {
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

void check_parity(const Crossings& c) {
  const bool plus_ok = (c.sigma_plus * ((c.plus.size() % 2 == 0) ? 1 : -1)) == 1;
  const bool minus_ok = (c.sigma_minus * ((c.minus.size() % 2 == 0) ? 1 : -1)) == 1;
  if (!plus_ok || !minus_ok) {
    throw QuadratureError("ray oracle: inconsistent boundary crossing count", QuadResult{});
  }
}

// Lines through the boundary point y(theta0). With delta = theta - theta0,
// y(theta) - x = delta (y' + delta Q(delta)) where Q is evaluated term by term,
// so crossings arbitrarily close to x keep full relative accuracy.
class BoundaryLines {
 public:
  BoundaryLines(const StarShape2D& shape, double theta0) : series_(shape) {
    for (std::size_t j = 0; j < series_.coef.size(); ++j) {
      phase_.push_back(series_.coef[j] * std::polar(1.0, series_.freq[j] * theta0));
    }
    cd d1 = 0.0;
    for (std::size_t j = 0; j < phase_.size(); ++j) d1 += phase_[j] * cd(0.0, series_.freq[j]);
    yp_ = to_vec(d1);
    speed_ = norm(yp_);
    tau_ = (1.0 / speed_) * yp_;
    inward_ = {-tau_.y, tau_.x};
    grid_ = std::max<std::size_t>(1024, 16 * series_.coef.size());
    if (grid_ % 2 != 0) ++grid_;
    for (std::size_t j = 0; j <= grid_; ++j) {
      const double d = -kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(grid_);
      delta_.push_back(j == grid_ / 2 ? 0.0 : d);
      q_.push_back(q(delta_.back()));
    }
  }

  Vec2 direction(double delta_angle) const {
    return std::cos(delta_angle) * tau_ + std::sin(delta_angle) * inward_;
  }

  Crossings cut(double delta_angle) const {
    const double sd = std::sin(delta_angle);
    const Vec2 u = direction(delta_angle);
    auto h_at = [&](double d, Vec2 qd) { return speed_ * sd + d * cross(qd, u); };
    auto h = [&](double d) { return h_at(d, q(d)); };
    Crossings out;
    out.sigma_plus = sd > 0.0 ? -1 : 1;
    out.sigma_minus = -out.sigma_plus;
    auto record = [&](double d) {
      const Vec2 w = yp_ + d * q(d);
      const double t = d * dot(w, u);
      if (t > 0.0) out.plus.push_back(t);
      if (t < 0.0) out.minus.push_back(-t);
    };
    std::vector<double> hv(delta_.size());
    for (std::size_t j = 0; j < delta_.size(); ++j) hv[j] = h_at(delta_[j], q_[j]);
    for (std::size_t j = 0; j + 1 < delta_.size(); ++j) {
      if (hv[j] == 0.0) {
        record(delta_[j]);
        continue;
      }
      if (hv[j] * hv[j + 1] < 0.0) record(refine_root(h, delta_[j], delta_[j + 1], hv[j], hv[j + 1]));
    }
    std::sort(out.plus.begin(), out.plus.end());
    std::sort(out.minus.begin(), out.minus.end());
    check_parity(out);
    return out;
  }

 private:
  Vec2 q(double d) const {
    cd acc = 0.0;
    for (std::size_t j = 0; j < phase_.size(); ++j) {
      const double m = series_.freq[j];
      acc += phase_[j] * (m * m) * e2(m * d);
    }
    return to_vec(acc);
  }

  ComplexSeries series_;
  std::vector<cd> phase_;
  Vec2 yp_, tau_, inward_;
  double speed_ = 0.0;
  std::size_t grid_ = 0;
  std::vector<double> delta_;
  std::vector<Vec2> q_;
};

// Lines through a point off the boundary.
class PointLines {
 public:
  PointLines(const StarShape2D& shape, Vec2 x) : series_(shape), x_(x), inside_(shape.contains(x)) {
    const Vec2 c = shape.center();
    const double rho = norm(x - c);
    if (rho > 0.0 && std::abs(rho - shape.radius(std::atan2(x.y - c.y, x.x - c.x))) <=
                         1e-12 * shape.max_radius()) {
      throw InvalidArgument("oracle point lies on the boundary: pass its polar angle instead");
    }
    grid_ = std::max<std::size_t>(1024, 16 * series_.coef.size());
    for (std::size_t j = 0; j < grid_; ++j) {
      theta_.push_back(2.0 * kPi * static_cast<double>(j) / static_cast<double>(grid_));
      y_.push_back(series_.point(theta_.back()) - x_);
    }
  }

  Crossings cut(double angle) const {
    const Vec2 u{std::cos(angle), std::sin(angle)};
    auto f = [&](double th) { return cross(series_.point(th) - x_, u); };
    Crossings out;
    out.sigma_plus = inside_ ? -1 : 1;
    out.sigma_minus = out.sigma_plus;
    auto record = [&](double th) {
      const double t = dot(series_.point(th) - x_, u);
      if (t > 0.0) out.plus.push_back(t);
      if (t < 0.0) out.minus.push_back(-t);
    };
    std::vector<double> fv(grid_);
    for (std::size_t j = 0; j < grid_; ++j) fv[j] = cross(y_[j], u);
    for (std::size_t j = 0; j < grid_; ++j) {
      const std::size_t n = (j + 1) % grid_;
      const double hi = n == 0 ? 2.0 * kPi : theta_[n];
      if (fv[j] == 0.0) {
        record(theta_[j]);
        continue;
      }
      if (fv[j] * fv[n] < 0.0) record(refine_root(f, theta_[j], hi, fv[j], fv[n]));
    }
    std::sort(out.plus.begin(), out.plus.end());
    std::sort(out.minus.begin(), out.minus.end());
    check_parity(out);
    return out;
  }

 private:
  ComplexSeries series_;
  Vec2 x_;
  bool inside_;
  std::size_t grid_ = 0;
  std::vector<double> theta_;
  std::vector<Vec2> y_;
};

// Sum over the inside pieces of one half-line of F(b) - F(a).
template <class F>
double inside_sum(const std::vector<double>& ts, int sigma0, F prim) {
  double acc = 0.0;
  double prev = 0.0;
  int sigma = sigma0;
  for (double t : ts) {
    if (sigma < 0) acc += prim(t) - prim(prev);
    sigma = -sigma;
    prev = t;
  }
  return acc;
}

// int_0^inf (sigma_+(t) + sigma_-(t)) t^{-1-s} dt; the sum vanishes near t = 0.
double paired_curvature_kernel(const Crossings& c, double s) {
  std::vector<std::pair<double, int>> events;
  for (double t : c.plus) events.emplace_back(t, 0);
  for (double t : c.minus) events.emplace_back(t, 1);
  std::sort(events.begin(), events.end());
  int sp = c.sigma_plus;
  int sm = c.sigma_minus;
  double prev = 0.0;
  double acc = 0.0;
  for (const auto& [t, side] : events) {
    if (prev > 0.0) acc += (sp + sm) * (std::pow(prev, -s) - std::pow(t, -s)) / s;
    if (side == 0) sp = -sp; else sm = -sm;
    prev = t;
  }
  acc += (sp + sm) * std::pow(prev, -s) / s;
  return acc;
}

// int over delta in (-pi/2, pi/2) with |delta| = (pi/2) v^p on each half.
QuadResult integrate_directions(const std::function<double(double)>& kernel, double p,
                                const QuadTolerance& tol) {
  auto half = [&](double sign) {
    auto g = [&, sign](double v) {
      const double d = 0.5 * kPi * std::pow(v, p);
      return kernel(sign * d) * 0.5 * kPi * p * std::pow(v, p - 1.0);
    };
    return integrate(g, 0.0, 1.0, tol);
  };
  auto a = half(1.0);
  const auto b = half(-1.0);
  a.estimate += b.estimate;
  a.error += b.error;
  a.subdivisions += b.subdivisions;
  a.evaluations += b.evaluations;
  return a;
}

void require_unit_open(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(std::string(what) + " must lie in (0,1)");
}

}  // namespace

QuadResult oracle_curvature_star(const StarShape2D& shape, double theta, double s,
                                 const QuadTolerance& tol) {
  require_unit_open(s, "s");
  const BoundaryLines lines(shape, theta);
  auto kernel = [&](double d) { return paired_curvature_kernel(lines.cut(d), s); };
  return integrate_directions(kernel, 1.0 / (1.0 - s), tol);
}

QuadResult oracle_potential_star(const StarShape2D& shape, double theta, double alpha,
                                 const QuadTolerance& tol) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidArgument("alpha must lie in (0,2)");
  const BoundaryLines lines(shape, theta);
  const double e = 2.0 - alpha;
  auto prim = [e](double t) { return std::pow(t, e) / e; };
  auto kernel = [&](double d) {
    const auto c = lines.cut(d);
    return inside_sum(c.plus, c.sigma_plus, prim) + inside_sum(c.minus, c.sigma_minus, prim);
  };
  return integrate_directions(kernel, 2.0, tol);
}

QuadResult oracle_potential_star(const StarShape2D& shape, Vec2 x, double alpha,
                                 const QuadTolerance& tol) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidArgument("alpha must lie in (0,2)");
  const PointLines lines(shape, x);
  const double e = 2.0 - alpha;
  auto prim = [e](double t) { return std::pow(t, e) / e; };
  auto kernel = [&](double angle) {
    const auto c = lines.cut(angle);
    return inside_sum(c.plus, c.sigma_plus, prim) + inside_sum(c.minus, c.sigma_minus, prim);
  };
  return integrate(kernel, 0.0, kPi, tol);
}

std::array<QuadResult, 2> oracle_grad_potential_star(const StarShape2D& shape, double theta,
                                                     double alpha, const QuadTolerance& tol) {
  require_unit_open(alpha, "alpha (boundary gradient)");
  const BoundaryLines lines(shape, theta);
  const double e = 1.0 - alpha;
  auto prim = [e](double t) { return std::pow(t, e) / e; };
  std::array<QuadResult, 2> out;
  for (int comp = 0; comp < 2; ++comp) {
    auto kernel = [&, comp](double d) {
      const auto c = lines.cut(d);
      const Vec2 u = lines.direction(d);
      const double uc = comp == 0 ? u.x : u.y;
      return alpha * uc *
             (inside_sum(c.plus, c.sigma_plus, prim) - inside_sum(c.minus, c.sigma_minus, prim));
    };
    out[comp] = integrate_directions(kernel, 1.0 / (1.0 - alpha), tol);
  }
  return out;
}

}  // namespace nlok
