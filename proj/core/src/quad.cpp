#include "nlok/quad.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include "json.hpp"
#include <queue>

#include "nlok/numeric.hpp"

namespace nlok {

void QuadTolerance::validate() const {
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  if (!(abs_tol > 0.0)) throw InvalidArgument("abs_tol must be positive");
  if (max_subdivisions < 1) throw InvalidArgument("max_subdivisions must be >= 1");
}

std::string QuadResult::to_json() const {
  nlohmann::json j{{"estimate", estimate},
                   {"error", error},
                   {"subdivisions", subdivisions},
                   {"evaluations", evaluations}};
  return j.dump();
}

QuadratureError::QuadratureError(const std::string& what, QuadResult best)
    : DomainError(what), best_(best) {}

// ---------------------------------------------------------------- primitives

double kernel_primitive(double a, double b, double x, double p) {
  if (p == 1.0) throw InvalidArgument("log case unsupported");
  if (!(p > 0.0)) throw InvalidArgument("kernel exponent p must be positive");
  if (std::isnan(a) || std::isnan(b) || !std::isfinite(x)) {
    throw InvalidArgument("kernel_primitive: endpoints and x must be numbers");
  }
  if (a > b) throw InvalidArgument("kernel_primitive: need a <= b");
  if (a == b) return 0.0;
  if (a < x && x < b) throw InvalidArgument("singular interior point: use PV path");
  const bool unbounded = std::isinf(a) || std::isinf(b);
  if (unbounded && p <= 1.0) {
    throw InvalidArgument("kernel_primitive: infinite interval diverges for p <= 1");
  }
  const double near = x <= a ? a - x : x - b;
  const double far = x <= a ? b - x : x - a;
  const double q = 1.0 - p;
  if (near == 0.0) {
    if (p > 1.0) throw InvalidArgument("kernel_primitive: endpoint singularity diverges for p > 1");
    return std::pow(far, q) / q;
  }
  if (std::isinf(far)) return std::pow(near, q) / (p - 1.0);
  // near^q [(1 + L/near)^q - 1] / q
  const double len = b - a;
  return std::pow(near, q) * std::expm1(q * std::log1p(len / near)) / q;
}

LinePartition LinePartition::from_intervals(const IntervalSet& set) {
  return LinePartition{set.endpoints(), false};
}

double pv_pair_integral(const LinePartition& set, double x, double s) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
  const auto& bp = set.breakpoints;
  for (std::size_t i = 1; i < bp.size(); ++i) {
    if (!(bp[i - 1] < bp[i])) throw InvalidArgument("partition breakpoints must increase");
  }
  const auto it = std::find(bp.begin(), bp.end(), x);
  if (it == bp.end()) {
    throw InvalidArgument("x is not an endpoint of the set: use plain primitives");
  }
  const std::size_t k = static_cast<std::size_t>(it - bp.begin());
  const double inf = std::numeric_limits<double>::infinity();
  CompensatedSum acc;
  for (std::size_t i = 0; i <= bp.size(); ++i) {
    const double lo = i == 0 ? -inf : bp[i - 1];
    const double hi = i == bp.size() ? inf : bp[i];
    const bool inside = set.first_inside != (i % 2 == 1);
    const double sigma = inside ? -1.0 : 1.0;
    if (i == k || i == k + 1) {
      // The eps^{-s}/s parts of the two adjacent pieces cancel; what remains
      // is -sigma * len^{-s} / s from each.
      const double len = hi - lo;
      if (std::isfinite(len)) acc.add(-sigma * std::pow(len, -s) / s);
    } else {
      acc.add(sigma * kernel_primitive(lo, hi, x, 1.0 + s));
    }
  }
  return acc.value();
}

double pv_pair_integral(const IntervalSet& set, double x, double s) {
  return pv_pair_integral(LinePartition::from_intervals(set), x, s);
}

// ---------------------------------------------------------------- adaptive GK

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Segment {
  double a = 0.0;
  double b = 0.0;
  double estimate = 0.0;
  double error = 0.0;
  std::size_t id = 0;
  std::size_t piece = 0;
};

using PieceFunction = std::function<double(std::size_t, double)>;

struct SegmentOrder {
  const std::vector<Segment>* segs;
  bool operator()(std::size_t lhs, std::size_t rhs) const {
    const auto& l = (*segs)[lhs];
    const auto& r = (*segs)[rhs];
    if (l.error != r.error) return l.error < r.error;
    return l.id > r.id;
  }
};

// One G7/K15 panel with the QUADPACK error heuristic.
void evaluate_panel(const PieceFunction& pf, Segment& seg, long& evals) {
  auto g = [&](double v) { return pf(seg.piece, v); };
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double c = 0.5 * (seg.a + seg.b);
  const double h = 0.5 * (seg.b - seg.a);
  std::array<double, 15> fv{};
  fv[0] = g(c);
  for (std::size_t i = 1; i < 8; ++i) {
    fv[2 * i - 1] = g(c - h * xk[i]);
    fv[2 * i] = g(c + h * xk[i]);
  }
  evals += 15;
  for (double v : fv) {
    if (!std::isfinite(v)) {
      throw QuadratureError("integrand returned a non-finite value", QuadResult{});
    }
  }
  double kr = wk[0] * fv[0];
  double ga = wg[0] * fv[0];
  double resabs = wk[0] * std::abs(fv[0]);
  for (std::size_t i = 1; i < 8; ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    kr += wk[i] * pair;
    if (i % 2 == 0) ga += wg[i / 2] * pair;
    resabs += wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
  }
  const double mean = 0.5 * kr;
  double resasc = wk[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < 8; ++i) {
    resasc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }
  const double ah = std::abs(h);
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((kr - ga) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  seg.estimate = kr * h;
  seg.error = err;
}

// Every piece starts as [0, 1] in its own local coordinate.
QuadResult adaptive(const PieceFunction& g, std::size_t pieces, const QuadTolerance& tol) {
  std::vector<Segment> segs;
  std::vector<std::size_t> frozen;
  segs.reserve(pieces + 2 * static_cast<std::size_t>(tol.max_subdivisions));
  long evals = 0;
  SegmentOrder order{&segs};
  std::priority_queue<std::size_t, std::vector<std::size_t>, SegmentOrder> heap(order);
  for (std::size_t p = 0; p < pieces; ++p) {
    Segment seg{0.0, 1.0, 0.0, 0.0, segs.size(), p};
    evaluate_panel(g, seg, evals);
    segs.push_back(seg);
    heap.push(seg.id);
  }
  // Leaves only: retired parents are marked with NaN bounds.
  auto totals = [&]() {
    CompensatedSum est, err;
    for (const auto& s : segs) {
      if (std::isnan(s.a)) continue;
      est.add(s.estimate);
      err.add(s.error);
    }
    return std::pair{est.value(), err.value()};
  };
  int subdivisions = 0;
  while (true) {
    const auto [est, err] = totals();
    QuadResult res{est, err, subdivisions, evals};
    if (err <= std::max(tol.abs_tol, tol.rel_tol * std::abs(est))) return res;
    if (heap.empty()) throw QuadratureError("quadrature tolerance not reachable (roundoff limit)", res);
    if (subdivisions >= tol.max_subdivisions) {
      throw QuadratureError("max_subdivisions exhausted before meeting tolerance", res);
    }
    const std::size_t worst = heap.top();
    heap.pop();
    const Segment parent = segs[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    if (!(mid > parent.a && mid < parent.b) ||
        (parent.b - parent.a) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(parent.a), std::abs(parent.b))) {
      frozen.push_back(worst);
      continue;
    }
    Segment left{parent.a, mid, 0.0, 0.0, segs.size(), parent.piece};
    Segment right{mid, parent.b, 0.0, 0.0, segs.size() + 1, parent.piece};
    evaluate_panel(g, left, evals);
    evaluate_panel(g, right, evals);
    segs[worst].a = std::numeric_limits<double>::quiet_NaN();
    segs.push_back(left);
    segs.push_back(right);
    heap.push(left.id);
    heap.push(right.id);
    ++subdivisions;
  }
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadTolerance& tol, std::span<const double> breakpoints, double decay) {
  tol.validate();
  if (std::isnan(a) || std::isnan(b)) throw InvalidArgument("integrate: limits must be numbers");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, tol, breakpoints, decay);
    r.estimate = -r.estimate;
    return r;
  }
  std::vector<double> pts;
  if (std::isfinite(a)) pts.push_back(a);
  for (double p : breakpoints) {
    if (std::isfinite(p) && p > a && p < b) pts.push_back(p);
  }
  if (std::isfinite(b)) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.empty()) pts.push_back(0.0);

  // Finite pieces are mapped affinely onto [0, 1]; tails use
  // y = p +- l (u^{-1/gamma} - 1), u in (0, 1].
  struct Piece {
    int kind;  // 0 finite, 1 right tail, 2 left tail
    double lo, hi;
  };
  std::vector<Piece> table;
  if (std::isinf(a)) table.push_back({2, pts.front(), pts.front()});
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) table.push_back({0, pts[i], pts[i + 1]});
  if (std::isinf(b)) table.push_back({1, pts.back(), pts.back()});

  const double gamma = decay > 1.0 ? decay - 1.0 : 1.0;
  auto g = [&](std::size_t idx, double v) {
    const Piece& pc = table[idx];
    if (pc.kind == 0) {
      return f(pc.lo + v * (pc.hi - pc.lo)) * (pc.hi - pc.lo);
    }
    const double ell = std::max(1.0, std::abs(pc.lo));
    const double w = std::pow(v, -1.0 / gamma);
    const double jac = (ell / gamma) * w / v;
    if (!std::isfinite(w) || !std::isfinite(jac)) return 0.0;
    const double y = pc.kind == 1 ? pc.lo + ell * (w - 1.0) : pc.lo - ell * (w - 1.0);
    if (!std::isfinite(y)) return 0.0;
    const double val = f(y) * jac;
    return std::isfinite(val) ? val : 0.0;
  };
  return adaptive(g, table.size(), tol);
}

// ---------------------------------------------------------------- oracle

namespace {

QuadResult add_results(QuadResult a, const QuadResult& b) {
  a.estimate += b.estimate;
  a.error += b.error;
  a.subdivisions += b.subdivisions;
  a.evaluations += b.evaluations;
  return a;
}

std::vector<std::pair<double, double>> line_pieces(const OracleRegion& region) {
  if (const auto* box = std::get_if<Box>(&region)) {
    if (box->bounds.size() != 1) return {};
    return {box->bounds.front()};
  }
  if (const auto* iv = std::get_if<IntervalSet>(&region)) {
    return {iv->intervals().begin(), iv->intervals().end()};
  }
  return {};
}

QuadResult oracle_line(const ScalarIntegrand& in, const std::vector<std::pair<double, double>>& pieces,
                       const QuadTolerance& tol) {
  auto f = [&](double y) { return in.f(std::span<const double>(&y, 1)); };
  QuadResult total;
  for (const auto& [lo, hi] : pieces) total = add_results(total, integrate(f, lo, hi, tol, in.breakpoints, in.decay));
  return total;
}

QuadResult oracle_line_pv(const ScalarIntegrand& in, const std::vector<std::pair<double, double>>& pieces,
                          const QuadTolerance& tol, const PVSpec& pv) {
  if (pv.singular_point.size() != 1) throw InvalidArgument("PV point dimension must match the region");
  if (!(pv.pairing_radius > 0.0)) throw InvalidArgument("pairing_radius must be positive");
  const double x = pv.singular_point.front();
  const double r = pv.pairing_radius;
  auto f = [&](double y) { return in.f(std::span<const double>(&y, 1)); };

  QuadResult total;
  for (const auto& [lo, hi] : pieces) {
    const double left_hi = std::min(hi, x - r);
    if (lo < left_hi) total = add_results(total, integrate(f, lo, left_hi, tol, in.breakpoints, in.decay));
    const double right_lo = std::max(lo, x + r);
    if (right_lo < hi) total = add_results(total, integrate(f, right_lo, hi, tol, in.breakpoints, in.decay));
  }

  auto inside = [&](double y) {
    return std::any_of(pieces.begin(), pieces.end(),
                       [y](const auto& pc) { return pc.first <= y && y <= pc.second; });
  };
  std::vector<double> near_breaks;
  auto note = [&](double e) {
    const double t = std::abs(e - x);
    if (t > 0.0 && t < r) near_breaks.push_back(t);
  };
  for (double e : in.breakpoints) note(e);
  for (const auto& [lo, hi] : pieces) {
    note(lo);
    note(hi);
  }
  auto plus = [&](double t) { return inside(x + t) ? f(x + t) : 0.0; };
  auto minus = [&](double t) { return inside(x - t) ? f(x - t) : 0.0; };
  auto paired = [&](double t) { return plus(t) + minus(t); };

  // I(eps_k) on eps_k = r 2^{-k}; Richardson on the trailing (at most 5) values
  // so that jumps at larger eps do not pollute the limit.
  constexpr int kMaxLevels = 60;
  constexpr int kDepth = 4;
  std::vector<std::vector<double>> table;
  double running = 0.0;
  double shell_err = 0.0;
  double prev_best = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= kMaxLevels; ++k) {
    const double outer = std::ldexp(r, -(k - 1));
    const double inner = std::ldexp(r, -k);
    QuadResult shell;
    if (pv.cancellation) {
      shell = integrate(paired, inner, outer, tol, near_breaks, 2.0);
    } else {
      shell = add_results(integrate(plus, inner, outer, tol, near_breaks, 2.0),
                          integrate(minus, inner, outer, tol, near_breaks, 2.0));
    }
    running += shell.estimate;
    shell_err += shell.error;
    total.subdivisions += shell.subdivisions;
    total.evaluations += shell.evaluations;
    std::vector<double> row{running};
    const int depth = std::min(k - 1, kDepth);
    for (int m = 1; m <= depth; ++m) {
      const double scale = std::ldexp(1.0, m) - 1.0;
      row.push_back(row[m - 1] + (row[m - 1] - table.back()[m - 1]) / scale);
    }
    table.push_back(row);
    const double best = row.back();
    if (k >= 3) {
      const double diff = std::abs(best - prev_best);
      const double scale = std::abs(total.estimate + best);
      if (diff <= std::max(tol.abs_tol, tol.rel_tol * scale)) {
        total.estimate += best;
        total.error += shell_err + diff;
        return total;
      }
    }
    prev_best = best;
  }
  QuadResult partial = total;
  partial.estimate += prev_best;
  partial.error += shell_err;
  throw QuadratureError("PV extrapolation did not settle", partial);
}

}  // namespace

QuadResult brute_oracle(const ScalarIntegrand& integrand, const OracleRegion& region,
                        const QuadTolerance& tol, const std::optional<PVSpec>& pv) {
  tol.validate();
  if (!integrand.f) throw InvalidArgument("brute_oracle: integrand is empty");
  const auto pieces = line_pieces(region);
  if (!pieces.empty()) {
    return pv ? oracle_line_pv(integrand, pieces, tol, *pv) : oracle_line(integrand, pieces, tol);
  }
  if (pv) throw InvalidArgument("brute_oracle: PV is one-dimensional here; use the star ray oracles");

  QuadTolerance inner_tol = tol;
  inner_tol.rel_tol = 0.1 * tol.rel_tol;
  inner_tol.abs_tol = 0.1 * tol.abs_tol;
  long inner_evals = 0;
  int inner_subdiv = 0;

  if (const auto* box = std::get_if<Box>(&region)) {
    if (box->bounds.size() != 2) throw InvalidArgument("brute_oracle: boxes must be 1D or 2D");
    const auto [lo0, hi0] = box->bounds[0];
    const auto [lo1, hi1] = box->bounds[1];
    if (!std::isfinite(lo0 + hi0 + lo1 + hi1)) {
      throw InvalidArgument("brute_oracle: 2D boxes must be bounded");
    }
    auto outer = [&](double x0) {
      auto inner = [&](double x1) {
        const std::array<double, 2> pt{x0, x1};
        return integrand.f(pt);
      };
      const auto r = integrate(inner, lo1, hi1, inner_tol);
      inner_evals += r.evaluations;
      inner_subdiv += r.subdivisions;
      return r.estimate;
    };
    auto res = integrate(outer, lo0, hi0, tol);
    res.evaluations += inner_evals;
    res.subdivisions += inner_subdiv;
    return res;
  }

  const auto& star = std::get<StarShape2D>(region);
  const Vec2 c = star.center();
  auto outer = [&](double theta) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    auto inner = [&](double rho) {
      const std::array<double, 2> pt{c.x + rho * ct, c.y + rho * st};
      return integrand.f(pt) * rho;
    };
    const auto r = integrate(inner, 0.0, star.radius(theta), inner_tol);
    inner_evals += r.evaluations;
    inner_subdiv += r.subdivisions;
    return r.estimate;
  };
  auto res = integrate(outer, 0.0, 2.0 * std::numbers::pi, tol);
  res.evaluations += inner_evals;
  res.subdivisions += inner_subdiv;
  return res;
}

}  // namespace nlok
