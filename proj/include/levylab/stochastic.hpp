#ifndef LEVYLAB_STOCHASTIC_HPP
#define LEVYLAB_STOCHASTIC_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/levy.hpp"
#include "levylab/linear_solver.hpp"

namespace levylab {

/// Counter-based generator: the k-th output is the SplitMix64 finalizer of
/// key + k * 0x9e3779b97f4a7c15. Streams are keyed by (seed, path index), so
/// a path's draws do not depend on which thread runs it or in what order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard symmetric alpha-stable scalar, E e^(iuS) = e^(-|u|^alpha), by the
/// Chambers-Mallows-Stuck transform.
double standard_symmetric_stable(double alpha, CounterRng& rng);

/// Positive beta-stable scalar, E e^(-sA) = e^(-s^beta), 0 < beta < 1 (Kanter).
double positive_stable(double beta, CounterRng& rng);

/// Increment over dt of the process with Levy measure r^(-1-alpha) dr Sigma(dtheta).
///
/// Each pair of atoms +-theta of weight w contributes
/// theta (2 w C_alpha dt)^(1/alpha) S with S standard symmetric stable, since
/// the pair's exponent is 2 w C_alpha |xi.theta|^alpha. An isotropic Sigma of
/// mass M in d >= 2 gives kappa sqrt(2A) G, with G standard normal,
/// A positive (alpha/2)-stable and kappa^alpha = dt C_alpha M m_alpha(d); in
/// d = 1 it is the pair +-1 with weight M/2.
///
/// Throws UnsupportedMeasure unless Sigma is symmetric.
std::vector<double> sample_stable_increment(const SphericalMeasure& sigma, double alpha, double dt, CounterRng& rng);

/// Same for any symmetric measure that is StableSpectral or DirectSumAxes
/// (axis i behaves as the pair +-e_i of weight w_i).
std::vector<double> sample_increment(const LevyMeasure& measure, double dt, CounterRng& rng);

/// States x_k of one path on time_grid, stored as states[k * dim + a].
struct Path {
  int dim = 1;
  std::vector<double> times;
  std::vector<double> states;

  std::span<const double> state(std::size_t k) const { return std::span<const double>(states).subspan(k * dim, dim); }
};

/// Euler scheme X_{k+1} = X_k + b(t_k, X_k) dt_k + dL_k. Throws
/// DriftEvaluationFailure at the first non-finite drift value.
Path euler_path(const VectorField& b, const LevyMeasure& measure, std::span<const double> x0,
                const std::vector<double>& time_grid, CounterRng& rng);

/// n_paths Euler paths; path i draws from CounterRng(seed, i).
struct PathEnsemble {
  std::size_t n_paths = 0;
  int dim = 1;
  std::vector<double> time_grid;
  std::vector<double> states;  ///< states[(i * times + k) * dim + a]
  std::uint64_t seed = 0;

  std::span<const double> state(std::size_t path, std::size_t k) const;
};

PathEnsemble simulate_ensemble(const VectorField& b, const LevyMeasure& measure, std::span<const double> x0,
                               const std::vector<double>& time_grid, std::size_t n_paths, std::uint64_t seed);

struct MonteCarloConfig {
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  int steps = 100;       ///< Euler steps over the time interval
  double lambda = 0.0;   ///< discount rate
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double exit_fraction = 0.0;  ///< paths that left the window |X - x|_inf < L/2
  bool exit_warning = false;   ///< exit_fraction above 1%
  std::size_t paths = 0;
};

/// Multilinear interpolation of component c at x, periodic on the grid's torus.
double interpolate(const GridField& field, std::span<const double> x, int component = 0);

/// u(t, x) for d_t u = L u + b . grad u - lambda u + f, u(0) = phi, as
/// E[e^(-lambda t) phi(X_t) + sum_k e^(-lambda s_k) f(t - s_k, X_k) ds]
/// with X_0 = x, dX = b(t - s, X) ds + dL_s and the left-endpoint rule on
/// the Euler grid. Positions are wrapped onto the torus for evaluation.
MonteCarloEstimate feynman_kac(const GridField& phi, const std::optional<SpaceTimeField>& f, const VectorField& b,
                               const LevyMeasure& measure, double t, std::span<const double> x,
                               const MonteCarloConfig& config = {});

struct KrylovEstimate {
  MonteCarloEstimate lhs;  ///< E int_0^T f(s, X_s) ds, left-endpoint rule
  double fnorm = 0.0;      ///< (int_0^T int |f|^p dx ds)^(1/p), trapezoid in time
};

/// X_0 = x0, dX = b(s, X) ds + dL_s over [0, f.horizon()]. Requires p > d + 1.
KrylovEstimate krylov_check(const VectorField& b, const LevyMeasure& measure, const SpaceTimeField& f, double p,
                            std::span<const double> x0, const MonteCarloConfig& config = {});

}  // namespace levylab

#endif  // LEVYLAB_STOCHASTIC_HPP
