#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlok/error.hpp"
#include "nlok/functionals.hpp"
#include "nlok/quad.hpp"

using namespace nlok;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

StarShape2D star_fixture(std::size_t m = 256) {
  FourierCoefficients c;
  c.r0 = 1.0;
  c.a = {0.0, 0.2, 0.05};
  c.b = {0.1, 0.0, 0.03};
  return StarShape2D::from_coefficients({0.1, -0.2}, c, m);
}

QuadTolerance oracle_tol() {
  QuadTolerance t;
  t.rel_tol = 1e-10;
  return t;
}

std::vector<double> pt(Vec2 v) { return {v.x, v.y}; }

}  // namespace

TEST_CASE("1D perimeter closed forms") {
  CHECK(frac_perimeter(IntervalSet({{0.0, 1.0}}), 0.5) == Approx(8.0));
  const IntervalSet two({{0.0, 1.0}, {10.0, 11.0}});
  // Cross term: int_0^1 int_10^11 |x-y|^{-3/2}.
  ScalarIntegrand k;
  k.f = [](std::span<const double> p) { return std::pow(std::abs(p[0] - p[1]), -1.5); };
  QuadTolerance tol;
  tol.rel_tol = 1e-12;
  const double cross = brute_oracle(k, Box{{{0.0, 1.0}, {10.0, 11.0}}}, tol).estimate;
  CHECK(frac_perimeter(two, 0.5) == Approx(16.0 - 2.0 * cross).epsilon(1e-8));
  const IntervalSet a({{0.0, 0.3}, {1.0, 2.5}});
  CHECK(frac_perimeter(a.scaled(2.0), 0.5) == Approx(std::pow(2.0, 0.5) * frac_perimeter(a, 0.5)).epsilon(1e-12));
}

TEST_CASE("1D Riesz energy and energy breakdown") {
  CHECK(riesz_energy(IntervalSet({{0.0, 1.0}}), 0.5) == Approx(8.0 / 3.0));
  CHECK(riesz_energy(IntervalSet{}, 0.5) == 0.0);
  const IntervalSet a({{0.0, 0.3}, {1.0, 2.5}});
  CHECK(riesz_energy(a.scaled(3.0), 0.5) == Approx(std::pow(3.0, 1.5) * riesz_energy(a, 0.5)).epsilon(1e-10));

  Params p;
  p.eps = 1.0;
  const auto e = energy(IntervalSet({{0.0, 1.0}}), p);
  CHECK(e.total_F_eps == Approx(8.0 + 8.0 / 3.0));
  CHECK(e.total_F == Approx(8.0 + 8.0 / 3.0));
  p.eps = 0.0;
  const auto e0 = energy(a, p);
  CHECK(e0.total_F_eps == e0.perimeter_term);

  const auto big = energy(a.scaled(2.0), p);
  CHECK(big.perimeter_term == Approx(std::pow(2.0, 0.5) * e0.perimeter_term).epsilon(1e-10));
  CHECK(big.riesz_term == Approx(std::pow(2.0, 1.5) * e0.riesz_term).epsilon(1e-10));
}

TEST_CASE("1D potential and curvature") {
  const IntervalSet unit({{0.0, 1.0}});
  CHECK(potential(unit, 0.5, 0.5) == Approx(2.0 * std::sqrt(2.0)));
  CHECK(potential(unit, 0.0, 0.5) == potential(unit, 1.0, 0.5));
  CHECK(frac_curvature(unit, 0.0, 0.5) == Approx(4.0));
  for (double len : {0.5, 3.0}) {
    CHECK(frac_curvature(IntervalSet({{0.0, len}}), 0.0, 0.3) == Approx(2.0 / 0.3 * std::pow(len, -0.3)));
  }
  CHECK_THROWS_AS(frac_curvature(unit, 0.5, 0.5), InvalidArgument);
  // Finite-difference check of the gradient at an exterior point.
  const double h = 1e-5;
  const double fd = (potential(unit, 2.0 + h, 0.5) - potential(unit, 2.0 - h, 0.5)) / (2 * h);
  CHECK(grad_potential(unit, 2.0, 0.5) == Approx(fd).epsilon(1e-7));
  CHECK_THROWS_AS(grad_potential(SetGeometry(unit), std::vector<double>{0.0}, 0.5), DomainError);
}

TEST_CASE("zeta reduces to kappa without the Riesz term") {
  const SetGeometry set = IntervalSet({{0.0, 0.5}, {2.0, 2.5}});
  Params p;
  const std::vector<double> x{0.5};
  CHECK(zeta(set, x, p) == frac_curvature(set, x, p.s));
  p.eps = 0.1;
  CHECK(zeta(set, x, p) == Approx(frac_curvature(set, x, p.s) + 0.2 * potential(set, x, p.alpha)));
}

TEST_CASE("disk closed forms") {
  const double r = 1.3;
  const SetGeometry disk = Ball({0.0, 0.0}, r);
  const std::vector<double> x{r, 0.0};
  for (double s : {0.25, 0.5, 0.75}) {
    CHECK(frac_curvature(disk, x, s) == Approx(ball_curvature(2, s, r)).epsilon(1e-10));
    CHECK(frac_perimeter(disk, s) == Approx(ball_perimeter(2, s, r)).epsilon(1e-10));
  }
  const double m0 = 2 * kPi * std::tgamma(0.5) / std::pow(std::tgamma(0.75), 2);
  CHECK(ball_curvature(2, 0.5, r) == Approx(std::pow(r, -0.5) * m0 / 0.5));
  CHECK(ball_curvature(1, 0.5, 0.5) == Approx(4.0));
  CHECK(ball_perimeter(1, 0.5, 0.5) == Approx(8.0));
  const std::vector<double> c{0.0, 0.0};
  CHECK(potential(disk, c, 0.5) == Approx(ball_center_potential(2, 0.5, r)).epsilon(1e-8));
  const auto g = grad_potential(disk, c, 0.5);
  CHECK(std::abs(g[0]) < 1e-10);
  CHECK(std::abs(g[1]) < 1e-10);
  CHECK(ball_center_potential(2, 0.5, r) == Approx(2 * kPi * std::pow(r, 1.5) / 1.5));
}

TEST_CASE("star shape evaluators agree with the line oracles") {
  const auto star = star_fixture();
  const SetGeometry g = star;
  for (double theta : {0.3, 2.0, 4.5}) {
    const auto x = pt(star.boundary_point(theta));
    CHECK(frac_curvature(g, x, 0.5) == Approx(oracle_curvature_star(star, theta, 0.5, oracle_tol()).estimate).epsilon(1e-8));
    CHECK(potential(g, x, 0.5) == Approx(oracle_potential_star(star, theta, 0.5, oracle_tol()).estimate).epsilon(1e-8));
    const auto gv = grad_potential(g, x, 0.5);
    const auto go = oracle_grad_potential_star(star, theta, 0.5, oracle_tol());
    CHECK(gv[0] == Approx(go[0].estimate).epsilon(1e-7));
    CHECK(gv[1] == Approx(go[1].estimate).epsilon(1e-7));
  }
  const Vec2 inside{0.3, 0.1};
  CHECK(potential(g, pt(inside), 0.5) == Approx(oracle_potential_star(star, inside, 0.5, oracle_tol()).estimate).epsilon(1e-8));
  const Vec2 outside{1.6, 0.4};
  CHECK(potential(g, pt(outside), 0.5) ==
        Approx(oracle_potential_star(star, outside, 0.5, oracle_tol()).estimate).epsilon(1e-8));
}

TEST_CASE("off-boundary gradient matches finite differences") {
  const auto star = star_fixture();
  const OffBoundaryEvaluator eval(star);
  const double h = 1e-5;
  const Vec2 points[] = {{0.0, 0.0}, {0.3, 0.1}, {-0.5, 0.4}, {0.2, -0.9}, {0.9, 0.1},
                         {1.8, 0.0}, {-1.9, -0.3}, {0.0, 2.2}, {0.6, 0.6}, {-0.2, -0.2}};
  for (const Vec2 x : points) {
    const Vec2 g = eval.grad_potential(x, 0.5);
    const double fx = (eval.potential({x.x + h, x.y}, 0.5) - eval.potential({x.x - h, x.y}, 0.5)) / (2 * h);
    const double fy = (eval.potential({x.x, x.y + h}, 0.5) - eval.potential({x.x, x.y - h}, 0.5)) / (2 * h);
    CHECK(g.x == Approx(fx).epsilon(1e-6).scale(norm(g)));
    CHECK(g.y == Approx(fy).epsilon(1e-6).scale(norm(g)));
  }
}

TEST_CASE("tangential gradient") {
  const SetGeometry disk = Ball({0.0, 0.0}, 1.0);
  for (std::size_t j : {0u, 17u, 100u}) CHECK(std::abs(tangential_grad_potential(disk, j, 0.5)) < 1e-8);

  auto sup_tau = [](double a) {
    FourierCoefficients c;
    c.r0 = 1.0;
    c.a = {0.0, 0.0, a};
    const SetGeometry s = StarShape2D::from_coefficients({}, c, 256);
    double best = 0.0;
    for (std::size_t j = 0; j < 256; ++j) best = std::max(best, std::abs(tangential_grad_potential(s, j, 0.5)));
    return best;
  };
  const double ratio = sup_tau(0.02) / sup_tau(0.04);
  CHECK(ratio >= 0.35);
  CHECK(ratio <= 0.65);

  const auto star = star_fixture();
  Params p;
  p.n = 2;
  const auto fields = boundary_fields(star, p, 256);
  for (std::size_t j : {3u, 90u}) {
    const Vec2 gr = fields.grad[j];
    CHECK(fields.grad_tangential[j] == Approx(dot(gr, fields.mesh.tangents[j])).epsilon(1e-14));
    CHECK(tangential_grad_potential(star, j, 0.5) == Approx(fields.grad_tangential[j]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(grad_potential(SetGeometry(star), pt(star.boundary_point(0.1)), 1.2), DomainError);
}

TEST_CASE("2D scaling and translation") {
  const auto star = star_fixture();
  const SetGeometry g = star;
  const SetGeometry big = star.scaled(2.0);
  CHECK(frac_perimeter(big, 0.5) == Approx(std::pow(2.0, 1.5) * frac_perimeter(g, 0.5)).epsilon(1e-10));
  CHECK(riesz_energy(big, 0.5) == Approx(std::pow(2.0, 3.5) * riesz_energy(g, 0.5)).epsilon(1e-10));
  const SetGeometry moved = star.translated({5.0, -3.0});
  CHECK(frac_perimeter(moved, 0.5) == Approx(frac_perimeter(g, 0.5)).epsilon(1e-12));
  const auto est = frac_perimeter_estimate(g, 0.5);
  CHECK(est.error < 1e-6 * est.value);
  CHECK(riesz_energy_estimate(g, 0.5).error >= 0.0);
}

TEST_CASE("mesh resolution must be even and large enough") {
  const SetGeometry disk = Ball({0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(frac_perimeter(disk, 0.5, 7), InvalidArgument);
  CHECK_THROWS_AS(frac_perimeter(disk, 0.5, 4), InvalidArgument);
  CHECK_THROWS_AS(frac_perimeter(disk, 1.5), InvalidArgument);
}
