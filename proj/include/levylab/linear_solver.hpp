#ifndef LEVYLAB_LINEAR_SOLVER_HPP
#define LEVYLAB_LINEAR_SOLVER_HPP

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/heatkernel.hpp"
#include "levylab/levy.hpp"

namespace levylab {

/// Space-time drift b(t, x) with a declared sup bound and continuity modulus.
struct VectorField {
  int dim = 1;
  std::function<void(double t, std::span<const double> x, std::span<double> out)> eval;
  double bound = 0.0;                      ///< declared sup |b|
  std::function<double(double)> modulus;   ///< omega_b; empty if none is declared

  static VectorField constant(std::vector<double> b);
  /// The x-independent drift theta(t) of a schedule, as a field.
  static VectorField from_schedule(const DriftSchedule& schedule);

  /// b(t, .) on the grid as a dim-component field. Throws
  /// DriftEvaluationFailure on a non-finite value or one above the bound.
  GridField sample(const Grid& grid, double t) const;
};

/// d_t u = L u + (drift term) - lambda u + f, u(0) = initial, on [0, horizon].
///
/// The drift term is -theta . grad u for a DriftSchedule, the sign under which
/// the solution is int e^(-lambda (t-s)) T_{t,s} f(s) ds, and +b . grad u for a
/// VectorField, the sign of the integral equation
/// u(t) = P_t u(0) + int P_{t-s}(b . grad u + f)(s) ds.
struct LinearProblem {
  LevyMeasure measure;
  std::variant<DriftSchedule, VectorField> drift;
  double lambda = 0.0;
  std::optional<SpaceTimeField> forcing;  ///< absent means f = 0
  GridField initial;
  double horizon = 1.0;

  const Grid& grid() const noexcept { return initial.grid(); }
};

struct SolverConfig {
  double time_step = 1e-2;
  double mollifier_width = 0.0;  ///< epsilon; 0 disables mollification
  double picard_tol = 1e-10;     ///< L2 tolerance on successive iterates
  int max_iterations = 50;
  bool dealias = false;          ///< 2/3-rule truncation of the drift product in drift_solve
};

/// Checks dimensions, lambda >= 0, horizon > 0, the drift against its
/// declared bound on the grid and, when a modulus is declared, that it is
/// increasing, vanishes at 0+ and dominates sampled neighbour differences.
void validate(const LinearProblem& problem);
void validate(const SolverConfig& config, double horizon);

/// Per-mode exponential integration with a DriftSchedule. Each step solves
/// u' = -(psi + lambda + i xi . theta) u + f exactly for f linear in time on
/// the step and theta replaced by its step average. The step is halved until
/// the frames change by less than picard_tol in L2 (IterationFailure after
/// max_iterations halvings). Frames are returned every time_step.
SpaceTimeField duhamel_solve(const LinearProblem& problem, const SolverConfig& config = {});

/// Fixed-point stepping of the integral equation. Each step sets
/// u1 = P_h u0 + h/2 (P_h g(t0, u0) + g(t1, u1)), g = b . grad u + f, with the
/// lambda term folded into P_h, iterating on u1 until successive iterates
/// differ by less than picard_tol. With epsilon > 0 the drift, forcing and
/// initial value are mollified first. Throws IterationFailure carrying the
/// residual history when a step does not converge.
SpaceTimeField drift_solve(const LinearProblem& problem, const SolverConfig& config = {});

/// (int ||L^nu2 u||_p^q dt)^(1/q) / (int ||f||_p^q dt)^(1/q) where
/// u = int_{-inf}^t e^(-lambda (t-s)) P^nu1_{t-s} f(s) ds. The forcing is read
/// as one period of a time-periodic f, so u is the periodic solution and a
/// single mode e^(i(k.x + omega t)) gives |psi2(k)| / |psi1(k) + i omega + lambda|.
/// Throws PreconditionFailure if nu1 is degenerate and InvalidArgument for
/// zero forcing.
double regularity_ratio(const LevyMeasure& nu1, const LevyMeasure& nu2, double lambda, const SpaceTimeField& f,
                        double p, double q);

/// ||(L^nu2 - lambda2) u||_p / ((1 + lambda2/lambda1) ||(L^nu1 - lambda1) u||_p).
double comparison_ratio(const LevyMeasure& nu1, const LevyMeasure& nu2, double lambda1, double lambda2,
                        const GridField& u, double p = 2.0);

/// ||L u||_2 / ||grad u||_2 for a scalar field.
double riesz_ratio(const LevyMeasure& measure, const GridField& u);

}  // namespace levylab

#endif  // LEVYLAB_LINEAR_SOLVER_HPP
