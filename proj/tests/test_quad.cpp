#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "nlok/error.hpp"
#include "nlok/functionals.hpp"
#include "nlok/quad.hpp"

using namespace nlok;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QuadTolerance tight() {
  QuadTolerance t;
  t.rel_tol = 1e-12;
  t.abs_tol = 1e-12;
  return t;
}

// Signed kernel of the fractional curvature for the 1D oracle.
ScalarIntegrand curvature_kernel(const IntervalSet& set, double x, double s) {
  ScalarIntegrand k;
  k.f = [set, x, s](std::span<const double> y) {
    return (set.contains(y[0]) ? -1.0 : 1.0) * std::pow(std::abs(x - y[0]), -1.0 - s);
  };
  k.breakpoints = set.endpoints();
  k.decay = 1.0 + s;
  return k;
}

}  // namespace

TEST_CASE("kernel primitive") {
  CHECK(kernel_primitive(1.0, 2.0, 0.0, 1.5) == Approx(2.0 * (1.0 - 1.0 / std::sqrt(2.0))));
  CHECK(kernel_primitive(1.0, 1.0, 0.0, 1.5) == 0.0);
  CHECK(kernel_primitive(0.0, 0.5, 0.5, 0.5) == Approx(std::sqrt(2.0)));
  CHECK(kernel_primitive(2.0, kInf, 0.0, 1.5) == Approx(2.0 / std::sqrt(2.0)));
  CHECK_THROWS_WITH_AS(kernel_primitive(0.0, 2.0, 1.0, 0.5), doctest::Contains("singular interior point"),
                       InvalidArgument);
  CHECK_THROWS_AS(kernel_primitive(0.0, 1.0, 2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(kernel_primitive(0.0, 1.0, 1.0, 1.5), InvalidArgument);
  CHECK_THROWS_AS(kernel_primitive(0.0, kInf, -1.0, 0.5), InvalidArgument);
}

TEST_CASE("kernel primitive agrees with adaptive quadrature") {
  for (double p : {0.3, 0.8, 1.4}) {
    for (double x : {-1.0, 2.5}) {
      auto f = [x, p](double y) { return std::pow(std::abs(x - y), -p); };
      CHECK(kernel_primitive(0.0, 1.0, x, p) == Approx(integrate(f, 0.0, 1.0, tight()).estimate).epsilon(1e-11));
    }
  }
}

TEST_CASE("PV pair integral closed forms") {
  LinePartition half;
  half.breakpoints = {0.0};
  half.first_inside = false;
  CHECK(pv_pair_integral(half, 0.0, 0.5) == Approx(0.0).epsilon(1e-15));
  for (double s : {0.2, 0.5, 0.9}) {
    for (double len : {0.5, 1.0, 4.0}) {
      const IntervalSet iv({{0.0, len}});
      CHECK(pv_pair_integral(iv, 0.0, s) == Approx(2.0 / s * std::pow(len, -s)).epsilon(1e-13));
      CHECK(pv_pair_integral(iv, len, s) == Approx(pv_pair_integral(iv, 0.0, s)).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(pv_pair_integral(IntervalSet({{0.0, 1.0}}), 0.5, 0.5), InvalidArgument);
  CHECK_THROWS_AS(pv_pair_integral(IntervalSet({{0.0, 1.0}}), 0.0, 1.0), InvalidArgument);
}

TEST_CASE("PV pair integral matches the brute-force oracle on a union") {
  const IntervalSet set({{0.0, 0.5}, {1.3, 1.8}, {4.0, 6.0}});
  for (double s : {0.3, 0.7}) {
    for (double x : set.endpoints()) {
      PVSpec pv;
      pv.singular_point = {x};
      pv.pairing_radius = 0.2;
      const auto o = brute_oracle(curvature_kernel(set, x, s), Box{{{-kInf, kInf}}}, tight(), pv);
      CHECK(o.estimate == Approx(pv_pair_integral(set, x, s)).epsilon(1e-8));
    }
  }
}

TEST_CASE("adaptive integration examples") {
  const auto r = integrate([](double y) { return std::pow(y, -1.5); }, 1.0, 2.0, tight());
  CHECK(r.estimate == Approx(0.585786437626905).epsilon(1e-12));
  CHECK(r.error <= 1e-10);
  const auto tail = integrate([](double y) { return 1.0 / (1.0 + y * y); }, -kInf, kInf, tight());
  CHECK(tail.estimate == Approx(std::numbers::pi).epsilon(1e-10));
  const auto sing = integrate([](double y) { return std::pow(y, -0.5); }, 0.0, 1.0, tight());
  CHECK(sing.estimate == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("brute oracle on boxes") {
  ScalarIntegrand k;
  // The diagonal has measure zero; nodes of both rules can coincide on it.
  k.f = [](std::span<const double> p) { return p[0] == p[1] ? 0.0 : std::pow(std::abs(p[0] - p[1]), -0.5); };
  QuadTolerance tol;
  tol.rel_tol = 1e-6;
  tol.max_subdivisions = 20000;
  const auto r = brute_oracle(k, Box{{{0.0, 1.0}, {0.0, 1.0}}}, tol);
  CHECK(r.estimate == Approx(8.0 / 3.0).epsilon(1e-5));

  ScalarIntegrand half;
  half.f = [](std::span<const double> y) { return (y[0] > 0.0 ? -1.0 : 1.0) * std::pow(std::abs(y[0]), -1.5); };
  half.breakpoints = {0.0};
  half.decay = 1.5;
  PVSpec pv;
  pv.singular_point = {0.0};
  const auto h = brute_oracle(half, Box{{{-kInf, kInf}}}, tight(), pv);
  CHECK(std::abs(h.estimate) < 1e-6);
}

TEST_CASE("quadrature errors carry the best estimate") {
  QuadTolerance tol;
  tol.rel_tol = 1e-14;
  tol.abs_tol = 1e-300;
  tol.max_subdivisions = 3;
  try {
    integrate([](double y) { return std::sin(50.0 * y) * std::pow(y, -0.9); }, 0.0, 10.0, tol);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.best().estimate));
    CHECK(e.best().error > 0.0);
  }
  QuadTolerance bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0.0, 1.0, tight()), QuadratureError);
}

TEST_CASE("PV limit does not depend on the pairing radius") {
  const IntervalSet set({{0.0, 1.0}, {2.0, 3.0}});
  const auto kernel = curvature_kernel(set, 1.0, 0.5);
  double first = 0.0;
  for (double r : {0.1, 0.3, 0.9}) {
    PVSpec pv;
    pv.singular_point = {1.0};
    pv.pairing_radius = r;
    const double v = brute_oracle(kernel, Box{{{-kInf, kInf}}}, tight(), pv).estimate;
    if (r == 0.1) first = v;
    CHECK(v == Approx(first).epsilon(1e-9));
  }
}

TEST_CASE("star line oracles agree with the disk closed forms") {
  const double radius = 1.3;
  const auto disk = as_star(Ball({0.0, 0.0}, radius), 64);
  QuadTolerance tol;
  tol.rel_tol = 1e-9;
  for (double s : {0.3, 0.7}) {
    CHECK(oracle_curvature_star(disk, 0.4, s, tol).estimate == Approx(ball_curvature(2, s, radius)).epsilon(1e-5));
  }
  const double alpha = 0.5;
  CHECK(oracle_potential_star(disk, Vec2{0.0, 0.0}, alpha, tol).estimate ==
        Approx(ball_center_potential(2, alpha, radius)).epsilon(1e-5));
  CHECK_THROWS_AS(oracle_potential_star(disk, disk.boundary_point(0.2), alpha, tol), InvalidArgument);
}
