#include "levylab/quasilinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>

#include "levylab/errors.hpp"
#include "levylab/norms.hpp"
#include "levylab/spectral.hpp"

namespace levylab {
namespace {

constexpr double kConsistencyTolerance = 1e-3;

int step_count(double horizon, double step) {
  return std::max(1, static_cast<int>(std::ceil(horizon / step * (1.0 - 1e-12))));
}

// Drift read off frozen frames at grid nodes, linear in time between frames.
// Only meant for VectorField::sample, so x is snapped to the nearest node.
VectorField frozen_drift(SpaceTimeField frames) {
  auto shared = std::make_shared<const SpaceTimeField>(std::move(frames));
  const Grid& grid = shared->grid();
  VectorField v;
  v.dim = grid.dim();
  for (const auto& f : shared->frames())
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double n2 = 0.0;
      for (int a = 0; a < v.dim; ++a) n2 += f(a, i) * f(a, i);
      v.bound = std::max(v.bound, std::sqrt(n2));
    }
  v.eval = [shared](double t, std::span<const double> x, std::span<double> out) {
    const Grid& g = shared->grid();
    const double s = std::clamp(t / shared->time_step(), 0.0, static_cast<double>(shared->size() - 1));
    std::size_t k0 = static_cast<std::size_t>(std::floor(s + 1e-9));
    double w = std::max(0.0, s - static_cast<double>(k0));
    if (k0 + 1 >= shared->size()) {
      k0 = shared->size() - 1;
      w = 0.0;
    }
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
      const long j = std::lround(x[a] / g.spacing());
      idx[a] = static_cast<int>(((j % g.points()) + g.points()) % g.points());
    }
    const std::size_t flat = g.ravel(idx);
    const auto& f0 = shared->frame(k0);
    for (int a = 0; a < g.dim(); ++a) {
      double value = f0(a, flat);
      if (w > 1e-9) value = (1.0 - w) * value + w * shared->frame(k0 + 1)(a, flat);
      out[a] = value;
    }
  };
  return v;
}

// Evaluates coef(t_k, x_i, u(t_k, x_i)) on every frame.
SpaceTimeField evaluate_frames(const QuasilinearProblem::Coefficient& coef, int out_components,
                               const SpaceTimeField& u) {
  const Grid& grid = u.grid();
  const int m = u.components();
  std::vector<GridField> out;
  std::vector<double> x(grid.dim()), uv(m), value(out_components);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double t = static_cast<double>(k) * u.time_step();
    const auto& frame = u.frame(k);
    GridField g(grid, out_components);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.point(i, x);
      for (int c = 0; c < m; ++c) uv[c] = frame(c, i);
      std::fill(value.begin(), value.end(), 0.0);
      coef(t, x, uv, value);
      for (int c = 0; c < out_components; ++c) {
        if (!std::isfinite(value[c])) throw DriftEvaluationFailure("coefficient is not finite", t, x);
        g(c, i) = value[c];
      }
    }
    out.push_back(std::move(g));
  }
  return SpaceTimeField(u.time_step(), std::move(out));
}

GridField select(const GridField& u, const std::vector<int>& comps) {
  GridField out(u.grid(), static_cast<int>(comps.size()));
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto src = u.component(comps[j]);
    std::copy(src.begin(), src.end(), out.component(static_cast<int>(j)).begin());
  }
  return out;
}

SpaceTimeField select(const SpaceTimeField& u, const std::vector<int>& comps) {
  std::vector<GridField> frames;
  for (const auto& f : u.frames()) frames.push_back(select(f, comps));
  return SpaceTimeField(u.time_step(), std::move(frames));
}

void scatter(const SpaceTimeField& part, const std::vector<int>& comps, std::vector<GridField>& frames) {
  for (std::size_t k = 0; k < frames.size(); ++k)
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const auto src = part.frame(k).component(static_cast<int>(j));
      std::copy(src.begin(), src.end(), frames[k].component(comps[j]).begin());
    }
}

}  // namespace

void validate(const QuasilinearProblem& pb) {
  const Grid& grid = pb.grid();
  const int m = pb.components();
  if (pb.measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");
  if (pb.measure.alpha() != 1.0) throw InvalidArgument("the quasilinear solver needs an alpha = 1 measure");
  if (nondegeneracy_constant(pb.measure.lower_stable_bound(), pb.measure.alpha()) <= 0.0)
    throw PreconditionFailure("the quasilinear solver needs a nondegenerate measure");
  if (!(pb.horizon > 0.0) || pb.horizon > 1.0) throw InvalidArgument("horizon must lie in (0, 1]");
  if (!pb.initial.all_finite()) throw InvalidArgument("initial value is not finite");
  if (!pb.drift_components.empty() && static_cast<int>(pb.drift_components.size()) != m)
    throw InvalidArgument("drift component mask has the wrong length");
  if (!pb.growth_constant || !pb.forcing) return;

  const double cf = *pb.growth_constant;
  if (!(cf >= 0.0) || !std::isfinite(cf)) throw InvalidArgument("growth constant must be nonnegative");
  std::vector<double> x(grid.dim());
  auto offset = [&](std::span<const double> at) { return pb.growth_offset ? pb.growth_offset(at) : 0.0; };
  double h_sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    h_sup = std::max(h_sup, offset(x));
  }
  // The a-priori bound keeps |u| below e^{C_f} (|phi|_inf + |h|_inf); check twice that radius.
  const double radius = 2.0 * std::exp(cf) * (lp_norm(pb.initial, kInfinity) + h_sup) + 1.0;
  std::mt19937_64 gen(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(m), f(m);
  for (int s = 0; s < 256; ++s) {
    const double t = unit(gen) * pb.horizon;
    grid.point(static_cast<std::size_t>(unit(gen) * static_cast<double>(grid.size())) % grid.size(), x);
    double un = 0.0;
    for (auto& v : u) {
      v = radius * (2.0 * unit(gen) - 1.0);
      un += v * v;
    }
    std::fill(f.begin(), f.end(), 0.0);
    pb.forcing(t, x, u, f);
    double fn = 0.0;
    for (double v : f) fn += v * v;
    const double bound = cf * std::sqrt(un) + offset(x);
    if (std::sqrt(fn) > bound * (1.0 + 1e-9) + 1e-12)
      throw InvalidArgument("forcing exceeds its declared growth bound");
  }
}

SpaceTimeField picard_solve(const QuasilinearProblem& pb, const SolverConfig& config, PicardTrace* trace) {
  validate(pb);
  validate(config, pb.horizon);
  const Grid& grid = pb.grid();
  const int m = pb.components();
  const int steps = step_count(pb.horizon, config.time_step);
  const double h = pb.horizon / steps;

  std::vector<int> driven, free;
  for (int c = 0; c < m; ++c) (pb.drift_components.empty() || pb.drift_components[c] ? driven : free).push_back(c);

  SolverConfig inner = config;
  inner.time_step = h;
  inner.dealias = true;
  inner.picard_tol = 0.1 * config.picard_tol;

  auto solve_group = [&](const std::vector<int>& comps, const std::optional<SpaceTimeField>& forcing,
                         std::variant<DriftSchedule, VectorField> drift) {
    LinearProblem lp{pb.measure, std::move(drift), 0.0, std::nullopt, select(pb.initial, comps), pb.horizon};
    if (forcing) lp.forcing = select(*forcing, comps);
    return drift_solve(lp, inner);
  };

  SpaceTimeField previous(h, std::vector<GridField>(steps + 1, GridField(grid, m)));
  std::vector<double> residuals;
  for (int it = 0; it < config.max_iterations; ++it) {
    std::optional<SpaceTimeField> forcing;
    if (pb.forcing) forcing = evaluate_frames(pb.forcing, m, previous);
    std::variant<DriftSchedule, VectorField> drift = DriftSchedule::zero(grid.dim());
    if (pb.drift) drift = frozen_drift(evaluate_frames(pb.drift, grid.dim(), previous));

    std::vector<GridField> frames(steps + 1, GridField(grid, m));
    if (!driven.empty()) scatter(solve_group(driven, forcing, drift), driven, frames);
    if (!free.empty()) scatter(solve_group(free, forcing, DriftSchedule::zero(grid.dim())), free, frames);
    SpaceTimeField next(h, std::move(frames));

    double r = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) r = std::max(r, lp_norm(next.frame(k) - previous.frame(k), 2.0));
    residuals.push_back(r);
    if (trace) trace->residuals = residuals;
    if (!std::isfinite(r)) break;
    previous = std::move(next);
    if (r < config.picard_tol) return previous;
  }
  throw IterationFailure("picard iteration did not converge", residuals);
}

SpaceTimeField burgers_solve(const GridField& phi, const LevyMeasure& measure, double horizon,
                             const SolverConfig& config, PicardTrace* trace) {
  const int d = phi.grid().dim();
  if (phi.components() != d) throw InvalidArgument("burgers needs as many components as dimensions");
  QuasilinearProblem pb{measure, nullptr, nullptr, {}, std::nullopt, nullptr, phi, horizon};
  pb.drift = [d](double, std::span<const double>, std::span<const double> u, std::span<double> b) {
    for (int a = 0; a < d; ++a) b[a] = -u[a];
  };
  return picard_solve(pb, config, trace);
}

Hamiltonian make_hamiltonian(const std::string& name, int dim) {
  if (dim < 1 || dim > 3) throw InvalidArgument("hamiltonian dimension must be 1, 2 or 3");
  Hamiltonian H;
  H.name = name;
  if (name == "quadratic" || name == "anisotropic-quadratic") {
    std::vector<double> a(dim, 1.0);
    if (name == "anisotropic-quadratic")
      for (int i = 0; i < dim; ++i) a[i] = std::ldexp(1.0, -i);
    H.value = [a](double, std::span<const double>, double, std::span<const double> q) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * q[i] * q[i];
      return 0.5 * s;
    };
    H.grad_q = [a](double, std::span<const double>, double, std::span<const double> q, std::span<double> out) {
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * q[i];
    };
    return H;
  }
  if (name == "smooth-bounded") {
    auto q2 = [](std::span<const double> q) {
      double s = 0.0;
      for (double v : q) s += v * v;
      return s;
    };
    H.value = [q2](double, std::span<const double>, double, std::span<const double> q) {
      const double s = q2(q);
      return s / (1.0 + s);
    };
    H.grad_q = [q2](double, std::span<const double>, double, std::span<const double> q, std::span<double> out) {
      const double s = 1.0 + q2(q);
      for (std::size_t i = 0; i < q.size(); ++i) out[i] = 2.0 * q[i] / (s * s);
    };
    // The augmented forcing is (H, 0) with 0 <= H < 1.
    H.growth_constant = 0.0;
    H.growth_offset = 1.0;
    return H;
  }
  throw InvalidArgument("unknown hamiltonian '" + name + "'");
}

std::vector<std::string> hamiltonian_names() { return {"quadratic", "anisotropic-quadratic", "smooth-bounded"}; }

SpaceTimeField hamilton_jacobi_solve(const Hamiltonian& H, const GridField& phi, const LevyMeasure& measure,
                                     double horizon, const SolverConfig& config, HamiltonJacobiReport* report) {
  if (phi.components() != 1) throw InvalidArgument("hamilton-jacobi needs scalar initial data");
  if (!H.value) throw InvalidArgument("hamiltonian has no value function");
  const Grid& grid = phi.grid();
  const int d = grid.dim();

  GridField w0(grid, 1 + d);
  std::copy(phi.values().begin(), phi.values().end(), w0.component(0).begin());
  const auto g = gradient(phi);
  std::copy(g.values().begin(), g.values().end(), w0.values().begin() + static_cast<std::ptrdiff_t>(grid.size()));

  QuasilinearProblem pb{measure, nullptr, nullptr, {}, H.growth_constant, nullptr, w0, horizon};
  pb.drift_components.assign(1 + d, true);
  pb.drift_components[0] = false;
  if (H.growth_constant) {
    const double offset = H.growth_offset;
    pb.growth_offset = [offset](std::span<const double>) { return offset; };
  }
  if (H.grad_q)
    pb.drift = [&H, d](double t, std::span<const double> x, std::span<const double> w, std::span<double> b) {
      H.grad_q(t, x, w[0], w.subspan(1, d), b);
    };
  pb.forcing = [&H, d](double t, std::span<const double> x, std::span<const double> w, std::span<double> f) {
    const auto q = w.subspan(1, d);
    f[0] = H.value(t, x, w[0], q);
    const auto fq = f.subspan(1, d);
    if (H.grad_x) H.grad_x(t, x, w[0], q, fq);
    if (H.d_u) {
      const double hu = H.d_u(t, x, w[0], q);
      for (int a = 0; a < d; ++a) fq[a] += hu * q[a];
    }
  };

  PicardTrace trace;
  const auto w = picard_solve(pb, config, &trace);
  std::vector<GridField> u_frames, q_frames;
  std::vector<int> q_comps;
  for (int a = 0; a < d; ++a) q_comps.push_back(1 + a);
  for (const auto& f : w.frames()) {
    u_frames.push_back(f.extract(0));
    q_frames.push_back(select(f, q_comps));
  }
  const double defect = lp_norm(gradient(u_frames.back()) - q_frames.back(), 2.0);
  if (report) {
    report->gradient = SpaceTimeField(w.time_step(), std::move(q_frames));
    report->defect = defect;
    report->trace = trace;
  }
  if (!(defect < kConsistencyTolerance))
    throw GradientAugmentationInconsistency("grad u and q disagree at the final time", defect);
  return SpaceTimeField(w.time_step(), std::move(u_frames));
}

}  // namespace levylab
