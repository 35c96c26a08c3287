#include "levylab/linear_solver.hpp"

#include <algorithm>
#include <cmath>

#include "levylab/errors.hpp"
#include "levylab/nonlocal_op.hpp"
#include "levylab/norms.hpp"
#include "levylab/spectral.hpp"

namespace levylab {
namespace {

// (e^z - 1) / z and (e^z - 1 - z) / z^2, by series near 0.
Complex phi1(Complex z) {
  if (std::abs(z) < 1e-2) return 1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z / 720.0))));
  return (std::exp(z) - 1.0) / z;
}

Complex phi2(Complex z) {
  if (std::abs(z) < 1e-2) return 1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z * (1.0 / 720 + z / 5040.0))));
  return (std::exp(z) - 1.0 - z) / (z * z);
}

int step_count(double horizon, double step) {
  return std::max(1, static_cast<int>(std::ceil(horizon / step * (1.0 - 1e-12))));
}

std::vector<Spectrum> to_spectra(const GridField& u) {
  std::vector<Spectrum> out;
  for (int c = 0; c < u.components(); ++c) out.push_back(forward(u.grid(), u.component(c)));
  return out;
}

GridField from_spectra(const Grid& grid, const std::vector<Spectrum>& spectra) {
  GridField u(grid, static_cast<int>(spectra.size()));
  for (std::size_t c = 0; c < spectra.size(); ++c) {
    const auto v = inverse_real(grid, spectra[c]);
    std::copy(v.begin(), v.end(), u.component(static_cast<int>(c)).begin());
  }
  return u;
}

GridField zero_like(const GridField& u) { return GridField(u.grid(), u.components()); }

// One pass of the exponential integrator with `steps` steps per output frame.
std::vector<GridField> etd_pass(const LinearProblem& pb, const DriftSchedule& drift, int frames, double frame_dt,
                                int steps) {
  const Grid& grid = pb.grid();
  const double h = frame_dt / steps;
  const Spectrum psi = symbol_table(pb.measure, grid);
  const int nc = pb.initial.components();

  auto forcing_hat = [&](double t) {
    if (!pb.forcing) return std::vector<Spectrum>(nc, Spectrum(grid.size(), 0.0));
    return to_spectra(pb.forcing->at_time(t));
  };

  std::vector<Spectrum> u = to_spectra(pb.initial);
  std::vector<GridField> out{pb.initial};
  Spectrum e(grid.size()), p1(grid.size()), p2(grid.size());
  std::vector<double> theta_cached;
  std::vector<double> xi(grid.dim());
  auto f0 = forcing_hat(0.0);
  for (int n = 0; n < frames * steps; ++n) {
    const double t0 = n * h, t1 = (n + 1) * h;
    auto theta = drift.cumulative(t1, t0);
    for (double& v : theta) v /= h;
    if (theta != theta_cached) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        grid.frequency(k, xi);
        double drift_phase = 0.0;
        for (int a = 0; a < grid.dim(); ++a) drift_phase += xi[a] * theta[a];
        const Complex z = -h * (psi[k] + pb.lambda + Complex(0.0, drift_phase));
        e[k] = std::exp(z);
        p1[k] = h * phi1(z);
        p2[k] = h * phi2(z);
      }
      make_real_preserving(grid, e);
      make_real_preserving(grid, p1);
      make_real_preserving(grid, p2);
      theta_cached = theta;
    }
    auto f1 = forcing_hat(t1);
    for (int c = 0; c < nc; ++c)
      for (std::size_t k = 0; k < grid.size(); ++k)
        u[c][k] = e[k] * u[c][k] + p1[k] * f0[c][k] + p2[k] * (f1[c][k] - f0[c][k]);
    f0 = std::move(f1);
    if ((n + 1) % steps == 0) out.push_back(from_spectra(grid, u));
  }
  return out;
}

// g = b . grad u + f, componentwise in u. With dealias, both factors and the
// product are truncated to |k| <= N/3 on every axis.
GridField drift_term(const GridField& b, const GridField& u, const GridField* f, bool dealias = false) {
  const Grid& grid = u.grid();
  GridField prod = zero_like(u);
  for (int a = 0; a < grid.dim(); ++a) {
    const auto du = dealias ? dealiased(partial(u, a)) : partial(u, a);
    const auto ba = b.component(a);
    for (int c = 0; c < u.components(); ++c) {
      auto pc = prod.component(c);
      const auto dc = du.component(c);
      for (std::size_t i = 0; i < grid.size(); ++i) pc[i] += ba[i] * dc[i];
    }
  }
  if (dealias) prod = dealiased(prod);
  if (f) prod += *f;
  return prod;
}

double time_integral_q(const std::vector<double>& norms, double dt, double q, bool periodic) {
  double s = 0.0;
  const std::size_t n = norms.size();
  for (std::size_t i = 0; i < n; ++i) {
    double w = dt;
    if (!periodic && (i == 0 || i + 1 == n)) w *= 0.5;
    if (periodic && i + 1 == n) w = 0.0;
    s += w * std::pow(norms[i], q);
  }
  return std::pow(s, 1.0 / q);
}

}  // namespace

VectorField VectorField::constant(std::vector<double> b) {
  VectorField v;
  v.dim = static_cast<int>(b.size());
  double n2 = 0.0;
  for (double x : b) n2 += x * x;
  v.bound = std::sqrt(n2);
  v.eval = [b](double, std::span<const double>, std::span<double> out) { std::copy(b.begin(), b.end(), out.begin()); };
  v.modulus = [](double) { return 0.0; };
  return v;
}

VectorField VectorField::from_schedule(const DriftSchedule& schedule) {
  VectorField v;
  v.dim = schedule.dim();
  v.bound = schedule.bound();
  v.eval = [schedule](double t, std::span<const double>, std::span<double> out) {
    const auto th = schedule.at(t);
    std::copy(th.begin(), th.end(), out.begin());
  };
  v.modulus = [](double) { return 0.0; };
  return v;
}

GridField VectorField::sample(const Grid& grid, double t) const {
  if (dim != grid.dim()) throw InvalidArgument("drift and grid dimensions differ");
  if (!eval) throw InvalidArgument("drift field has no evaluator");
  GridField b(grid, dim);
  std::vector<double> x(dim), v(dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    eval(t, x, v);
    double n2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      if (!std::isfinite(v[a])) throw DriftEvaluationFailure("drift is not finite", t, x);
      n2 += v[a] * v[a];
      b(a, i) = v[a];
    }
    if (std::sqrt(n2) > bound * (1.0 + 1e-12) + 1e-300)
      throw DriftEvaluationFailure("drift exceeds its declared bound", t, x);
  }
  return b;
}

void validate(const LinearProblem& pb) {
  const Grid& grid = pb.grid();
  if (pb.measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");
  if (!(pb.lambda >= 0.0) || !std::isfinite(pb.lambda)) throw InvalidArgument("lambda must be nonnegative");
  if (!(pb.horizon > 0.0) || !std::isfinite(pb.horizon)) throw InvalidArgument("horizon must be positive");
  if (!pb.initial.all_finite()) throw InvalidArgument("initial value is not finite");
  if (pb.forcing) {
    if (!(pb.forcing->grid() == grid) || pb.forcing->components() != pb.initial.components())
      throw InvalidArgument("forcing and initial value live on different grids");
  }
  if (const auto* s = std::get_if<DriftSchedule>(&pb.drift)) {
    if (s->dim() != grid.dim()) throw InvalidArgument("drift and grid dimensions differ");
    return;
  }
  const auto& b = std::get<VectorField>(pb.drift);
  if (!(b.bound >= 0.0) || !std::isfinite(b.bound)) throw InvalidArgument("drift bound must be finite");
  for (double t : {0.0, 0.5 * pb.horizon, pb.horizon}) {
    const auto field = b.sample(grid, t);
    if (!b.modulus) continue;
    double last = 0.0;
    for (double r = 1e-12; r <= 1.0; r *= 10.0) {
      const double w = b.modulus(r);
      if (!(w >= last)) throw InvalidArgument("drift modulus must be increasing");
      last = w;
    }
    if (b.modulus(1e-12) > 1e-3 * std::max(1.0, b.modulus(1.0)))
      throw InvalidArgument("drift modulus must vanish at 0+");
    const double bound = b.modulus(grid.spacing()) * (1.0 + 1e-9) + 1e-12;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto idx = grid.unravel(i);
      for (int a = 0; a < grid.dim(); ++a) {
        auto j = idx;
        j[a] = (j[a] + 1) % grid.points();
        const std::size_t nb = grid.ravel(j);
        // Points across the periodic seam are not spacing apart in the field's own coordinates.
        if (j[a] == 0) continue;
        double d2 = 0.0;
        for (int c = 0; c < b.dim; ++c) d2 += std::pow(field(c, nb) - field(c, i), 2);
        if (std::sqrt(d2) > bound) throw InvalidArgument("drift varies faster than its declared modulus");
      }
    }
  }
}

void validate(const SolverConfig& config, double horizon) {
  if (!(config.time_step > 0.0) || config.time_step > horizon * (1.0 + 1e-12))
    throw InvalidArgument("time step must lie in (0, horizon]");
  if (!(config.mollifier_width >= 0.0)) throw InvalidArgument("mollifier width must be nonnegative");
  if (!(config.picard_tol > 0.0)) throw InvalidArgument("picard tolerance must be positive");
  if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
}

SpaceTimeField duhamel_solve(const LinearProblem& pb, const SolverConfig& config) {
  validate(pb);
  validate(config, pb.horizon);
  const auto* drift = std::get_if<DriftSchedule>(&pb.drift);
  if (!drift) throw InvalidArgument("duhamel_solve needs an x-independent drift schedule");
  const int frames = step_count(pb.horizon, config.time_step);
  const double dt = pb.horizon / frames;

  auto coarse = etd_pass(pb, *drift, frames, dt, 1);
  std::vector<double> changes;
  for (int level = 1; level <= config.max_iterations; ++level) {
    auto fine = etd_pass(pb, *drift, frames, dt, 1 << level);
    double change = 0.0;
    for (int k = 0; k <= frames; ++k) change = std::max(change, lp_norm(fine[k] - coarse[k], 2.0));
    changes.push_back(change);
    coarse = std::move(fine);
    if (change < config.picard_tol) return SpaceTimeField(dt, std::move(coarse));
    if (level >= 16) break;
  }
  throw IterationFailure("duhamel step halving did not settle", changes);
}

SpaceTimeField drift_solve(const LinearProblem& pb, const SolverConfig& config) {
  validate(pb);
  validate(config, pb.horizon);
  const Grid& grid = pb.grid();
  const VectorField b = std::holds_alternative<VectorField>(pb.drift)
                            ? std::get<VectorField>(pb.drift)
                            : VectorField::from_schedule(std::get<DriftSchedule>(pb.drift));
  const double eps = config.mollifier_width;
  const int steps = step_count(pb.horizon, config.time_step);
  const double h = pb.horizon / steps;

  Spectrum e = symbol_table(pb.measure, grid);
  for (auto& v : e) v = std::exp(-h * (v + pb.lambda));
  auto propagate = [&](const GridField& u) { return apply_multiplier(u, e); };
  auto drift_at = [&](double t) {
    auto field = eps > 0.0 ? mollify(b.sample(grid, t), eps) : b.sample(grid, t);
    return config.dealias ? dealiased(field) : field;
  };
  auto forcing_at = [&](double t) -> std::optional<GridField> {
    if (!pb.forcing) return std::nullopt;
    auto f = pb.forcing->at_time(t);
    return eps > 0.0 ? mollify(f, eps) : f;
  };

  GridField u = eps > 0.0 ? mollify(pb.initial, eps) : pb.initial;
  std::vector<GridField> frames{u};
  auto f0 = forcing_at(0.0);
  auto b0 = drift_at(0.0);
  for (int n = 0; n < steps; ++n) {
    const double t1 = (n + 1) * h;
    const auto b1 = drift_at(t1);
    const auto f1 = forcing_at(t1);
    // Fixed part E u0 + h/2 E g0, then iterate on the implicit half.
    GridField g0 = drift_term(b0, u, f0 ? &*f0 : nullptr, config.dealias);
    GridField base = propagate(u);
    GridField pg0 = propagate(g0);
    base.axpy(0.5 * h, pg0);
    GridField next = base;
    next.axpy(0.5 * h, pg0);  // predictor: u1 = E (u0 + h g0)
    std::vector<double> residuals;
    bool converged = false;
    for (int it = 0; it < config.max_iterations; ++it) {
      GridField trial = base;
      trial.axpy(0.5 * h, drift_term(b1, next, f1 ? &*f1 : nullptr, config.dealias));
      const double r = lp_norm(trial - next, 2.0);
      residuals.push_back(r);
      next = std::move(trial);
      if (!next.all_finite()) break;
      if (r < config.picard_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw IterationFailure("drift fixed point did not converge at step " + std::to_string(n + 1), residuals);
    u = std::move(next);
    frames.push_back(u);
    b0 = b1;
    f0 = f1;
  }
  return SpaceTimeField(h, std::move(frames));
}

double regularity_ratio(const LevyMeasure& nu1, const LevyMeasure& nu2, double lambda, const SpaceTimeField& f,
                        double p, double q) {
  if (nu1.dim() != f.grid().dim() || nu2.dim() != f.grid().dim())
    throw InvalidArgument("measure and grid dimensions differ");
  if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidArgument("p and q must be at least 1");
  if (nondegeneracy_constant(nu1.lower_stable_bound(), nu1.alpha()) <= 0.0)
    throw PreconditionFailure("regularity ratio needs a nondegenerate nu1");
  if (f.size() < 2) throw InvalidArgument("forcing needs at least two frames");
  std::vector<double> fn;
  for (const auto& fr : f.frames()) fn.push_back(lp_norm(fr, p));
  const double rhs = time_integral_q(fn, f.time_step(), q, true);
  if (!(rhs > 0.0)) throw InvalidArgument("regularity ratio is undefined for zero forcing");

  const Grid& grid = f.grid();
  SolverConfig cfg;
  cfg.time_step = f.time_step();
  cfg.picard_tol = 1e-12 * std::max(1.0, rhs);
  LinearProblem pb{nu1, DriftSchedule::zero(grid.dim()), lambda, f, zero_like(f.frame(0)), f.horizon()};
  // Periodic state: u(0) = S / (1 - e^{-(psi + lambda) T}), S the response from zero data.
  const auto response = duhamel_solve(pb, cfg);
  const Spectrum psi = symbol_table(nu1, grid);
  auto s = to_spectra(response.back());
  for (auto& comp : s)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Complex denom = 1.0 - std::exp(-(psi[k] + lambda) * f.horizon());
      comp[k] = std::abs(denom) > 1e-13 ? comp[k] / denom : 0.0;
    }
  pb.initial = from_spectra(grid, s);
  const auto u = duhamel_solve(pb, cfg);
  std::vector<double> un;
  for (const auto& fr : u.frames()) un.push_back(lp_norm(apply(nu2, fr), p));
  return time_integral_q(un, u.time_step(), q, true) / rhs;
}

double comparison_ratio(const LevyMeasure& nu1, const LevyMeasure& nu2, double lambda1, double lambda2,
                        const GridField& u, double p) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw InvalidArgument("lambda1 and lambda2 must be positive");
  if (lp_norm(u, kInfinity) == 0.0) throw InvalidArgument("comparison ratio is undefined for u = 0");
  auto a2 = apply(nu2, u);
  a2.axpy(-lambda2, u);
  auto a1 = apply(nu1, u);
  a1.axpy(-lambda1, u);
  return lp_norm(a2, p) / ((1.0 + lambda2 / lambda1) * lp_norm(a1, p));
}

double riesz_ratio(const LevyMeasure& measure, const GridField& u) {
  if (u.components() != 1) throw InvalidArgument("riesz ratio needs a scalar field");
  const double g = gradient_lp_norm(u, 2.0);
  if (!(g > 0.0)) throw InvalidArgument("riesz ratio is undefined for constant u");
  return lp_norm(apply(measure, u), 2.0) / g;
}

}  // namespace levylab
