#include "nlok/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlok/functionals.hpp"
#include "nlok/numeric.hpp"
#include "nlok/parallel.hpp"
#include "nlok/quad.hpp"

namespace nlok {

namespace {

void require_onedim(const Params& p) {
  p.validate();
  if (p.n != 1) throw InvalidArgument("two-interval configuration needs n = 1");
}

double eps_exponent(const Params& p) { return 1.0 / (1.0 + p.s - p.alpha); }

}  // namespace

void TwoIntervalConfig::validate() const {
  require_onedim(params);
  if (!(d > 0.5) || !std::isfinite(d)) throw InvalidArgument("d must exceed 1/2");
}

IntervalSet two_interval_set(const TwoIntervalConfig& cfg) {
  cfg.validate();
  return IntervalSet({{0.0, 0.5}, {cfg.d, cfg.d + 0.5}});
}

double zeta_1d(const IntervalSet& set, double x, const Params& p) {
  const double k = frac_curvature(set, x, p.s);
  if (p.eps == 0.0) return k;
  return k + p.c_coupling * p.eps * potential(set, x, p.alpha);
}

std::array<double, 4> zeta_endpoints(const TwoIntervalConfig& cfg) {
  const IntervalSet e = two_interval_set(cfg);
  const double z0 = zeta_1d(e, 0.0, cfg.params);
  const double zh = zeta_1d(e, 0.5, cfg.params);
  return {z0, zh, zh, z0};
}

double f_closed_form(double d, const Params& p) {
  require_onedim(p);
  if (!(d > 0.5)) throw InvalidArgument("d must exceed 1/2");
  const double delta = 0.5 / d;
  const double attraction = (2.0 / p.s) * std::pow(d, -p.s) * symmetric_second_difference(-p.s, delta);
  if (p.eps == 0.0) return attraction;
  const double repulsion = p.c_coupling * p.eps * std::pow(d, 1.0 - p.alpha) / (1.0 - p.alpha) *
                           symmetric_second_difference(1.0 - p.alpha, delta);
  return attraction + repulsion;
}

LeadingOrder g_and_d_eps(const Params& p) {
  require_onedim(p);
  if (!(p.eps > 0.0)) throw InvalidArgument("g and d_eps need eps > 0");
  const double c_a_e = p.c_coupling * p.alpha * p.eps;
  const double s = p.s;
  const double a = p.alpha;
  LeadingOrder lo;
  lo.g_infinity = 0.25 * c_a_e;
  lo.d_eps = std::pow((1.0 + s) / c_a_e, eps_exponent(p));
  lo.g = [c_a_e, s, a](double d) { return 0.25 * c_a_e - 0.5 * (1.0 + s) * std::pow(d, -1.0 - s + a); };
  return lo;
}

RootResult solve_critical_d(const Params& p, const RootOptions& opts) {
  if (opts.probe_budget < 1) throw InvalidArgument("probe_budget must be at least 1");
  if (!(opts.f_tol > 0.0)) throw InvalidArgument("f_tol must be positive");
  const auto lead = g_and_d_eps(p);
  RootResult r;
  r.d_eps = lead.d_eps;
  const auto f = [&p](double d) { return f_closed_form(d, p); };
  if (!(lead.d_eps > 0.5) || !(f(lead.d_eps) < 0.0)) {
    throw NoRootError("no root located: eps may exceed eps_bar (f(d_eps) >= 0 or d_eps <= 1/2)");
  }
  double lo = lead.d_eps;
  double hi = lo;
  bool found = false;
  for (int k = 0; k < opts.probe_budget; ++k) {
    hi = 2.0 * lo;
    ++r.probes;
    if (!std::isfinite(hi)) break;
    if (f(hi) >= 0.0) {
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found) throw NoRootError("no root located: eps may exceed eps_bar (probe budget exhausted)");

  while (true) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    ++r.bisections;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double flo = f(lo);
  const double fhi = f(hi);
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.d_star = std::abs(flo) < std::abs(fhi) ? lo : hi;
  r.f_at_root = std::abs(flo) < std::abs(fhi) ? flo : fhi;
  if (!(std::abs(r.f_at_root) <= opts.f_tol)) {
    throw DomainError("root bracket closed but |f(d_star)| exceeds the certification tolerance");
  }
  return r;
}

std::vector<double> geometric_grid(double first, double last, std::size_t count) {
  if (count < 2 || !(first > 0.0) || !(last > 0.0)) {
    throw InvalidArgument("geometric grid needs two positive endpoints and count >= 2");
  }
  std::vector<double> g(count);
  const double l0 = std::log10(first);
  const double l1 = std::log10(last);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return g;
}

SweepResult epsilon_sweep(const Params& p0, std::span<const double> eps_grid, const RootOptions& opts) {
  require_onedim(p0);
  SweepResult out;
  out.records.resize(eps_grid.size());
  out.target_slope = eps_exponent(p0);
  parallel_for(eps_grid.size(), [&](std::size_t i) {
    SweepRecord& rec = out.records[i];
    rec.eps = eps_grid[i];
    try {
      const Params p = p0.with_eps(eps_grid[i]);
      const auto root = solve_critical_d(p, opts);
      rec.d_star = root.d_star;
      rec.d_eps = root.d_eps;
      rec.diameter = root.d_star + 0.5;
      rec.f_at_root = root.f_at_root;
      const auto z = zeta_endpoints({root.d_star, p});
      const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
      rec.residual = *mx - *mn;
      rec.ok = true;
    } catch (const Error& e) {
      rec.d_eps = std::numeric_limits<double>::quiet_NaN();
      rec.ok = false;
      rec.error = e.what();
    }
  });

  std::vector<double> xs, ys;
  double c_o = std::numeric_limits<double>::infinity();
  for (const auto& rec : out.records) {
    if (!rec.ok) continue;
    xs.push_back(std::log(1.0 / rec.eps));
    ys.push_back(std::log(rec.diameter));
    c_o = std::min(c_o, rec.diameter * std::pow(rec.eps, out.target_slope));
  }
  out.successes = static_cast<int>(xs.size());
  if (out.successes < 4) {
    throw DomainError("epsilon sweep needs at least 4 successful roots, got " + std::to_string(out.successes));
  }
  const auto fit = fit_line(xs, ys);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.rel_error = std::abs(fit.slope - out.target_slope) / out.target_slope;
  out.c_o_implied = c_o;
  return out;
}

double empirical_eps_bar(const Params& p, double eps_lo, double eps_hi, double rel) {
  require_onedim(p);
  const auto solvable = [&p](double e) {
    try {
      solve_critical_d(p.with_eps(e));
      return true;
    } catch (const DomainError&) {
      return false;
    }
  };
  if (!solvable(eps_lo)) throw NoRootError("no root located at the lower end of the eps search interval");
  if (solvable(eps_hi)) return eps_hi;
  double lo = std::log(eps_lo);
  double hi = std::log(eps_hi);
  while (hi - lo > rel) {
    const double mid = 0.5 * (lo + hi);
    if (solvable(std::exp(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(lo);
}

}  // namespace nlok
