#include "levylab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "levylab/errors.hpp"
#include "levylab/parallel.hpp"

namespace levylab {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr double kPi = std::numbers::pi;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One symmetric stable direction: theta * scale * S.
struct StableLine {
  std::vector<double> direction;
  double weight;  // weight of each of the two half-lines
};

struct IncrementLaw {
  int dim = 1;
  double alpha = 1.0;
  std::vector<StableLine> lines;
  double isotropic_mass = 0.0;  // > 0 selects subordination (d >= 2)
};

IncrementLaw law_of(const SphericalMeasure& sigma, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidArgument("alpha must lie in (0, 2)");
  IncrementLaw law;
  law.dim = sigma.dim();
  law.alpha = alpha;
  if (sigma.is_isotropic()) {
    if (sigma.dim() == 1) {
      law.lines.push_back({{1.0}, 0.5 * sigma.total_mass()});
    } else {
      law.isotropic_mass = sigma.total_mass();
    }
    return law;
  }
  if (!sigma.is_symmetric()) throw UnsupportedMeasure("path simulation needs a symmetric spherical measure");
  const auto& atoms = sigma.atoms();
  std::vector<bool> used(atoms.size(), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) continue;
    bool paired = false;
    for (std::size_t j = i + 1; j < atoms.size() && !paired; ++j) {
      if (used[j]) continue;
      double d2 = 0.0;
      for (int a = 0; a < sigma.dim(); ++a) d2 += std::pow(atoms[i].direction[a] + atoms[j].direction[a], 2);
      if (d2 < 1e-20 && std::abs(atoms[i].weight - atoms[j].weight) <= 1e-12 * atoms[i].weight) {
        used[i] = used[j] = true;
        paired = true;
      }
    }
    if (!paired) throw UnsupportedMeasure("atoms of the spherical measure do not pair up as +-theta");
    if (atoms[i].weight > 0.0) law.lines.push_back({atoms[i].direction, atoms[i].weight});
  }
  return law;
}

IncrementLaw law_of(const LevyMeasure& measure) {
  switch (measure.kind()) {
    case MeasureKind::StableSpectral:
      return law_of(measure.sigma(), measure.alpha());
    case MeasureKind::DirectSumAxes: {
      IncrementLaw law;
      law.dim = measure.dim();
      law.alpha = measure.alpha();
      const auto& w = measure.axis_weights();
      for (int i = 0; i < law.dim; ++i) {
        if (w[i] <= 0.0) continue;
        std::vector<double> e(law.dim, 0.0);
        e[i] = 1.0;
        law.lines.push_back({e, w[i]});
      }
      return law;
    }
    case MeasureKind::DensityKernel:
      break;
  }
  throw UnsupportedMeasure("path simulation supports stable and direct-sum measures only");
}

// Adds the increment over dt to x.
void add_increment(const IncrementLaw& law, double dt, CounterRng& rng, std::span<double> x) {
  const double ca = radial_constant(law.alpha);
  for (const auto& line : law.lines) {
    const double scale = std::pow(2.0 * line.weight * ca * dt, 1.0 / law.alpha);
    const double s = scale * standard_symmetric_stable(law.alpha, rng);
    for (int a = 0; a < law.dim; ++a) x[a] += line.direction[a] * s;
  }
  if (law.isotropic_mass > 0.0) {
    const double kappa =
        std::pow(dt * ca * law.isotropic_mass * isotropic_moment(law.dim, law.alpha), 1.0 / law.alpha);
    const double r = kappa * std::sqrt(2.0 * positive_stable(0.5 * law.alpha, rng));
    std::normal_distribution<double> normal;
    for (int a = 0; a < law.dim; ++a) x[a] += r * normal(rng);
  }
}

void eval_drift(const VectorField& b, double t, std::span<const double> x, std::span<double> out) {
  if (!b.eval) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  b.eval(t, x, out);
  for (double v : out)
    if (!std::isfinite(v)) throw DriftEvaluationFailure("drift is not finite", t, std::vector<double>(x.begin(), x.end()));
}

double wrap(double x, double side) {
  double r = std::fmod(x, side);
  return r < 0.0 ? r + side : r;
}

double space_time_value(const SpaceTimeField& f, double t, std::span<const double> x) {
  if (f.size() == 1 || t <= 0.0) return interpolate(f.frame(0), x);
  const double pos = t / f.time_step();
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= f.size()) return interpolate(f.back(), x);
  const double w = pos - static_cast<double>(k);
  const double a = interpolate(f.frame(k), x);
  return w == 0.0 ? a : (1.0 - w) * a + w * interpolate(f.frame(k + 1), x);
}

MonteCarloEstimate summarize(const std::vector<double>& values, const std::vector<char>& exited) {
  MonteCarloEstimate est;
  est.paths = values.size();
  const double n = static_cast<double>(values.size());
  est.estimate = pairwise_sum(values) / n;
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::pow(values[i] - est.estimate, 2);
  est.std_error = values.size() > 1 ? std::sqrt(pairwise_sum(dev) / (n - 1.0) / n) : 0.0;
  std::size_t out = 0;
  for (char e : exited) out += e ? 1 : 0;
  est.exit_fraction = static_cast<double>(out) / n;
  est.exit_warning = est.exit_fraction > 0.01;
  return est;
}

void check_config(const MonteCarloConfig& c) {
  if (c.paths < 1) throw InvalidArgument("need at least one path");
  if (c.steps < 1) throw InvalidArgument("need at least one time step");
  if (!(c.lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream + kGamma))) {}

CounterRng::result_type CounterRng::operator()() { return mix64(key_ + (++counter_) * kGamma); }

double CounterRng::uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

double standard_symmetric_stable(double alpha, CounterRng& rng) {
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = -std::log(rng.uniform());
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

double positive_stable(double beta, CounterRng& rng) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("positive stable index must lie in (0, 1)");
  const double u = kPi * rng.uniform();
  const double e = -std::log(rng.uniform());
  return std::pow(std::sin((1.0 - beta) * u) / e, (1.0 - beta) / beta) * std::sin(beta * u) /
         std::pow(std::sin(u), 1.0 / beta);
}

std::vector<double> sample_stable_increment(const SphericalMeasure& sigma, double alpha, double dt, CounterRng& rng) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const auto law = law_of(sigma, alpha);
  std::vector<double> x(law.dim, 0.0);
  add_increment(law, dt, rng, x);
  return x;
}

std::vector<double> sample_increment(const LevyMeasure& measure, double dt, CounterRng& rng) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const auto law = law_of(measure);
  std::vector<double> x(law.dim, 0.0);
  add_increment(law, dt, rng, x);
  return x;
}

Path euler_path(const VectorField& b, const LevyMeasure& measure, std::span<const double> x0,
                const std::vector<double>& time_grid, CounterRng& rng) {
  const auto law = law_of(measure);
  const int d = law.dim;
  if (static_cast<int>(x0.size()) != d) throw InvalidArgument("start point has the wrong dimension");
  if (b.eval && b.dim != d) throw InvalidArgument("drift and measure dimensions differ");
  if (time_grid.empty()) throw InvalidArgument("time grid is empty");
  for (std::size_t k = 1; k < time_grid.size(); ++k)
    if (!(time_grid[k] > time_grid[k - 1])) throw InvalidArgument("time grid must be increasing");
  Path path;
  path.dim = d;
  path.times = time_grid;
  path.states.assign(x0.begin(), x0.end());
  std::vector<double> x(x0.begin(), x0.end()), drift(d);
  for (std::size_t k = 0; k + 1 < time_grid.size(); ++k) {
    const double dt = time_grid[k + 1] - time_grid[k];
    eval_drift(b, time_grid[k], x, drift);
    for (int a = 0; a < d; ++a) x[a] += drift[a] * dt;
    add_increment(law, dt, rng, x);
    path.states.insert(path.states.end(), x.begin(), x.end());
  }
  return path;
}

std::span<const double> PathEnsemble::state(std::size_t path, std::size_t k) const {
  return std::span<const double>(states).subspan((path * time_grid.size() + k) * dim, dim);
}

PathEnsemble simulate_ensemble(const VectorField& b, const LevyMeasure& measure, std::span<const double> x0,
                               const std::vector<double>& time_grid, std::size_t n_paths, std::uint64_t seed) {
  PathEnsemble ens;
  ens.n_paths = n_paths;
  ens.dim = measure.dim();
  ens.time_grid = time_grid;
  ens.seed = seed;
  const std::size_t stride = time_grid.size() * ens.dim;
  ens.states.resize(n_paths * stride);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      const auto p = euler_path(b, measure, x0, time_grid, rng);
      std::copy(p.states.begin(), p.states.end(), ens.states.begin() + i * stride);
    }
  });
  return ens;
}

double interpolate(const GridField& field, std::span<const double> x, int component) {
  const Grid& g = field.grid();
  const int d = g.dim(), n = g.points();
  std::array<int, 3> lo{}, hi{};
  std::array<double, 3> w{};
  for (int a = 0; a < d; ++a) {
    const double u = wrap(x[a], g.side()) / g.spacing();
    const double f = std::floor(u);
    w[a] = u - f;
    lo[a] = static_cast<int>(f) % n;
    hi[a] = (lo[a] + 1) % n;
  }
  double s = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    std::array<int, 3> idx{};
    double weight = 1.0;
    for (int a = 0; a < d; ++a) {
      const bool up = corner & (1 << a);
      idx[a] = up ? hi[a] : lo[a];
      weight *= up ? w[a] : 1.0 - w[a];
    }
    if (weight != 0.0) s += weight * field(component, g.ravel(idx));
  }
  return s;
}

MonteCarloEstimate feynman_kac(const GridField& phi, const std::optional<SpaceTimeField>& f, const VectorField& b,
                               const LevyMeasure& measure, double t, std::span<const double> x,
                               const MonteCarloConfig& config) {
  check_config(config);
  if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
  const Grid& grid = phi.grid();
  const int d = grid.dim();
  if (measure.dim() != d || static_cast<int>(x.size()) != d) throw InvalidArgument("dimensions differ");
  if (f && !(f->grid() == grid)) throw InvalidArgument("forcing and initial value live on different grids");
  const auto law = law_of(measure);
  const double side = grid.side(), half = 0.5 * side;
  const int steps = t > 0.0 ? config.steps : 0;
  const double ds = steps > 0 ? t / steps : 0.0;

  std::vector<double> values(config.paths);
  std::vector<char> exited(config.paths, 0);
  parallel_for(config.paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> pos(d), wrapped(d), drift(d);
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(config.seed, i);
      std::copy(x.begin(), x.end(), pos.begin());
      double acc = 0.0;
      bool out = false;
      for (int k = 0; k < steps; ++k) {
        const double s = k * ds;
        for (int a = 0; a < d; ++a) wrapped[a] = wrap(pos[a], side);
        if (f) acc += std::exp(-config.lambda * s) * space_time_value(*f, t - s, wrapped) * ds;
        eval_drift(b, t - s, wrapped, drift);
        for (int a = 0; a < d; ++a) pos[a] += drift[a] * ds;
        add_increment(law, ds, rng, pos);
        for (int a = 0; a < d; ++a) out = out || std::abs(pos[a] - x[a]) >= half;
      }
      for (int a = 0; a < d; ++a) wrapped[a] = wrap(pos[a], side);
      values[i] = acc + std::exp(-config.lambda * t) * interpolate(phi, wrapped);
      exited[i] = out;
    }
  });
  return summarize(values, exited);
}

KrylovEstimate krylov_check(const VectorField& b, const LevyMeasure& measure, const SpaceTimeField& f, double p,
                            std::span<const double> x0, const MonteCarloConfig& config) {
  check_config(config);
  const Grid& grid = f.grid();
  const int d = grid.dim();
  if (!(p > d + 1)) throw InvalidArgument("Krylov estimate needs p > d + 1");
  if (measure.dim() != d || static_cast<int>(x0.size()) != d) throw InvalidArgument("dimensions differ");
  const auto law = law_of(measure);
  const double T = f.horizon();
  if (!(T > 0.0)) throw InvalidArgument("forcing needs a positive horizon");
  const double side = grid.side(), half = 0.5 * side;
  const double ds = T / config.steps;

  std::vector<double> values(config.paths);
  std::vector<char> exited(config.paths, 0);
  parallel_for(config.paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> pos(d), wrapped(d), drift(d);
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(config.seed, i);
      std::copy(x0.begin(), x0.end(), pos.begin());
      double acc = 0.0;
      bool out = false;
      for (int k = 0; k < config.steps; ++k) {
        const double s = k * ds;
        for (int a = 0; a < d; ++a) wrapped[a] = wrap(pos[a], side);
        acc += space_time_value(f, s, wrapped) * ds;
        eval_drift(b, s, wrapped, drift);
        for (int a = 0; a < d; ++a) pos[a] += drift[a] * ds;
        add_increment(law, ds, rng, pos);
        for (int a = 0; a < d; ++a) out = out || std::abs(pos[a] - x0[a]) >= half;
      }
      values[i] = acc;
      exited[i] = out;
    }
  });

  KrylovEstimate out;
  out.lhs = summarize(values, exited);
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    double frame = 0.0;
    for (double v : f.frame(k).values()) frame += std::pow(std::abs(v), p);
    const double w = (k == 0 || k + 1 == f.size()) ? 0.5 : 1.0;
    s += w * f.time_step() * frame * grid.cell_volume();
  }
  out.fnorm = std::pow(s, 1.0 / p);
  return out;
}

}  // namespace levylab
