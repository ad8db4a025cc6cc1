#include "nlok/shapeopt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlok/functionals.hpp"
#include "nlok/numeric.hpp"

namespace nlok {

namespace {

constexpr double kPi = std::numbers::pi;

struct Evaluation {
  BoundaryMesh mesh;
  std::vector<double> zeta;
  double lambda_hat = 0.0;
  double residual = 0.0;
};

Evaluation evaluate(const StarShape2D& shape, const Params& p, std::size_t m) {
  auto fields = boundary_fields(SetGeometry(shape), p, m, false);
  Evaluation e;
  CompensatedSum num, den;
  for (std::size_t j = 0; j < fields.mesh.size(); ++j) {
    num.add(fields.mesh.weights[j] * fields.zeta[j]);
    den.add(fields.mesh.weights[j]);
  }
  e.lambda_hat = num.value() / den.value();
  for (double z : fields.zeta) e.residual = std::max(e.residual, std::abs(z - e.lambda_hat));
  e.mesh = std::move(fields.mesh);
  e.zeta = std::move(fields.zeta);
  return e;
}

void require_plane(const Params& p) {
  p.validate();
  if (p.n != 2) throw InvalidArgument("shape optimization needs n = 2");
}

OptimizerState step_with(const OptimizerState& state, const Evaluation& ev, const Params& p,
                         const OptimizerOptions& opts) {
  const std::size_t m = opts.resolution;
  const StarShape2D shape = state.shape.resampled(m);
  const auto r = shape.samples();
  const double h = 2.0 * kPi / static_cast<double>(m);

  // Normal velocity v = -(zeta - lambda_hat) mapped to a radial change.
  std::vector<double> excess(m);
  std::vector<double> radial(m);
  CompensatedSum vmean;
  for (std::size_t j = 0; j < m; ++j) {
    excess[j] = ev.zeta[j] - ev.lambda_hat;
    radial[j] = -excess[j] * ev.mesh.speed[j] / r[j];
    vmean.add(-excess[j] * ev.mesh.weights[j]);
  }
  const double f_old = energy_eps(shape, p, m);

  double tau = std::min(2.0 * state.step_size, opts.step_max);
  while (true) {
    if (tau < opts.step_min) {
      OptimizerState stalled = state;
      stalled.step_size = tau;
      throw StallError("stalled: no energy decrease at the minimal step size", std::move(stalled));
    }
    std::vector<double> trial(m);
    bool positive = true;
    for (std::size_t j = 0; j < m; ++j) {
      trial[j] = r[j] + tau * radial[j];
      positive = positive && trial[j] > 0.0;
    }
    if (positive) {
      try {
        StarShape2D cand = volume_project(StarShape2D(shape.center(), std::move(trial)).truncated(opts.max_modes));
        CompensatedSum predicted;
        for (std::size_t j = 0; j < m; ++j) {
          predicted.add(h * excess[j] * (cand.samples()[j] - r[j]) * r[j]);
        }
        const double f_new = energy_eps(cand, p, m);
        if (f_new <= f_old + 0.5 * predicted.value() + 1e-13 * std::abs(f_old)) {
          OptimizerState next = state;
          next.shape = std::move(cand);
          next.step_size = tau;
          next.iteration = state.iteration + 1;
          next.energy_history.push_back(f_new);
          next.volume_drift = std::abs(volume(SetGeometry(next.shape)) - 1.0);
          next.last_velocity_mean = vmean.value() / (2.0 * kPi);
          return next;
        }
      } catch (const InvalidArgument&) {
        // The trial radius lost positivity after truncation; shrink the step.
      }
    }
    tau *= 0.5;
  }
}

}  // namespace

void OptimizerOptions::validate() const {
  if (resolution < 8 || resolution % 2 != 0) throw InvalidArgument("resolution must be even and >= 8");
  if (max_modes < 1 || 2 * max_modes >= resolution) {
    throw InvalidArgument("modes must lie in [1, resolution/2)");
  }
  if (!(step_initial > 0.0) || !(step_max >= step_initial) || !(step_min > 0.0)) {
    throw InvalidArgument("step sizes must satisfy 0 < step_min, 0 < step_initial <= step_max");
  }
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_iter < 0) throw InvalidArgument("max_iter must be nonnegative");
}

StarShape2D fourier_shape(const FourierCoefficients& coeffs, std::size_t resolution, Vec2 center) {
  return StarShape2D::from_coefficients(center, coeffs, resolution);
}

StarShape2D volume_project(const StarShape2D& shape) {
  const double area = volume(SetGeometry(shape));
  const double k = 1.0 / std::sqrt(area);
  const Vec2 c = shape.center();
  return shape.translated(Vec2{} - c).scaled(k).translated(c);
}

double energy_eps(const StarShape2D& shape, const Params& p, std::size_t resolution) {
  const auto mesh = boundary_mesh(shape, resolution);
  const double per = perimeter_on_mesh(mesh, p.s);
  if (p.eps == 0.0) return per;
  return per + p.eps * riesz_on_mesh(mesh, p.alpha);
}

OptimizerState el_gradient_step(const OptimizerState& state, const Params& p, const OptimizerOptions& opts) {
  require_plane(p);
  opts.validate();
  const StarShape2D shape = state.shape.resampled(opts.resolution);
  const auto ev = evaluate(shape, p, opts.resolution);
  OptimizerState next = step_with(state, ev, p, opts);
  next.residual_history.push_back(ev.residual);
  return next;
}

CriticalResult find_critical_2d(const StarShape2D& init, const Params& p, const OptimizerOptions& opts) {
  require_plane(p);
  if (std::isinf(opts.tol) && opts.tol > 0.0) {
    OptimizerOptions o = opts;
    o.tol = 1.0;
    o.validate();
  } else {
    opts.validate();
  }
  if (std::abs(volume(SetGeometry(init)) - 1.0) > 1e-10) throw InvalidArgument("init must have unit area");

  DiagnoseOptions dopts;
  dopts.identities = opts.identities;
  dopts.error_estimates = false;

  OptimizerState state(init, opts.step_initial);
  if (std::isinf(opts.tol)) {
    return {init, diagnose(init, p, opts.resolution, dopts), state, true};
  }
  state.shape = init.resampled(opts.resolution);
  state.energy_history.push_back(energy_eps(state.shape, p, opts.resolution));
  bool converged = false;
  while (true) {
    const auto ev = evaluate(state.shape, p, opts.resolution);
    state.residual_history.push_back(ev.residual);
    if (ev.residual <= opts.tol) {
      converged = true;
      break;
    }
    if (state.iteration >= opts.max_iter) break;
    state = step_with(state, ev, p, opts);
  }
  auto report = diagnose(state.shape, p, opts.resolution, dopts);
  return {state.shape, std::move(report), std::move(state), converged};
}

}  // namespace nlok
