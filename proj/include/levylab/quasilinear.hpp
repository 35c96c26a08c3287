#ifndef LEVYLAB_QUASILINEAR_HPP
#define LEVYLAB_QUASILINEAR_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/levy.hpp"
#include "levylab/linear_solver.hpp"

namespace levylab {

/// d_t u = L u + b(t, x, u) . grad u + f(t, x, u), u(0) = initial, on [0, horizon]
/// with m = initial.components() unknowns and an alpha = 1 measure.
struct QuasilinearProblem {
  using Coefficient = std::function<void(double t, std::span<const double> x, std::span<const double> u,
                                         std::span<double> out)>;

  LevyMeasure measure;
  Coefficient drift;    ///< d values; empty means b = 0
  Coefficient forcing;  ///< m values; empty means f = 0
  /// Components the drift acts on; empty means all of them.
  std::vector<bool> drift_components;
  /// Declared growth |f(t, x, u)| <= C_f |u| + h(x). When C_f is set it is
  /// spot-checked on the ball the a-priori bound confines the solution to.
  std::optional<double> growth_constant;
  std::function<double(std::span<const double> x)> growth_offset;  ///< h; empty means 0
  GridField initial;
  double horizon = 1.0;

  const Grid& grid() const noexcept { return initial.grid(); }
  int components() const noexcept { return initial.components(); }
};

/// Checks alpha = 1, nondegeneracy, 0 < horizon <= 1, dimensions and the
/// declared growth bound.
void validate(const QuasilinearProblem& problem);

/// Residual history of a Picard solve: entry n is sup_t ||u_(n+1) - u_n||_2.
struct PicardTrace {
  std::vector<double> residuals;
};

/// Picard iteration from u_0 = 0: iterate n solves the linear problem with b
/// and f evaluated at iterate n - 1, by drift_solve with the 2/3 rule on the
/// drift product. Stops once successive iterates differ by less than
/// picard_tol; IterationFailure with the residual history otherwise.
SpaceTimeField picard_solve(const QuasilinearProblem& problem, const SolverConfig& config = {},
                            PicardTrace* trace = nullptr);

/// d_t u + (-L) u + (u . grad) u = 0 with d components, that is b(u) = -u and
/// f = 0 in the form above.
SpaceTimeField burgers_solve(const GridField& phi, const LevyMeasure& measure, double horizon,
                             const SolverConfig& config = {}, PicardTrace* trace = nullptr);

/// Scalar H(t, x, u, q) with its partials; an empty partial is identically zero.
struct Hamiltonian {
  using Scalar = std::function<double(double t, std::span<const double> x, double u, std::span<const double> q)>;
  using Vector = std::function<void(double t, std::span<const double> x, double u, std::span<const double> q,
                                    std::span<double> out)>;

  std::string name;
  Scalar value;
  Vector grad_x;
  Scalar d_u;
  Vector grad_q;
  /// Growth of the augmented forcing (H, grad_x H + d_u H q), when it is linear.
  std::optional<double> growth_constant;
  double growth_offset = 0.0;
};

/// Built-in Hamiltonians of q alone: "quadratic" |q|^2 / 2, "anisotropic-quadratic"
/// sum_i a_i q_i^2 / 2 with a_i = 2^-i, and "smooth-bounded" |q|^2 / (1 + |q|^2).
Hamiltonian make_hamiltonian(const std::string& name, int dim);
std::vector<std::string> hamiltonian_names();

struct HamiltonJacobiReport {
  std::optional<SpaceTimeField> gradient;  ///< the q components of the augmented system
  double defect = 0.0;                     ///< ||grad u - q||_2 at the final time
  PicardTrace trace;
};

/// d_t u = L u + H(t, x, u, grad u) through the augmented unknown w = (u, q):
/// q is driven by grad_q H . grad q and forced by grad_x H + d_u H q, u is
/// forced by H. Returns u. Throws GradientAugmentationInconsistency when
/// ||grad u - q||_2 >= 1e-3 at the final time.
SpaceTimeField hamilton_jacobi_solve(const Hamiltonian& hamiltonian, const GridField& phi, const LevyMeasure& measure,
                                     double horizon, const SolverConfig& config = {},
                                     HamiltonJacobiReport* report = nullptr);

}  // namespace levylab

#endif  // LEVYLAB_QUASILINEAR_HPP
