#ifndef LEVYLAB_NONLOCAL_OP_HPP
#define LEVYLAB_NONLOCAL_OP_HPP

#include <cstddef>

#include "levylab/grid.hpp"
#include "levylab/levy.hpp"
#include "levylab/spectral.hpp"

namespace levylab {

/// How the operator is evaluated.
///
/// Multiplier: transform, multiply by -psi, transform back.
/// Quadrature: the defining jump integral summed over direction x radius
/// nodes, f(x + y) taken as the exact trigonometric interpolant. The region
/// r < inner_fraction * h is replaced by the Taylor series of f along each
/// ray, and |y| > truncation_radius by the tail integral of each line
/// evaluated per frequency.
struct OperatorRoute {
  enum class Variant { Multiplier, Quadrature };

  Variant variant = Variant::Multiplier;
  int radial_nodes = 16;           ///< Gauss-Legendre nodes per radial panel
  double truncation_radius = 0.0;  ///< 0 selects half the side length
  int directions = 0;              ///< sphere nodes for non-atomic measures; 0 selects 128 (d=2) or 16 (d=3)
  double inner_fraction = 0.5;     ///< inner Taylor radius in units of the grid spacing
  bool far_field = true;           ///< false drops |y| > R and reports a bound instead

  static OperatorRoute multiplier() { return {}; }
  static OperatorRoute quadrature(int radial_nodes = 16, double truncation_radius = 0.0);
};

struct QuadratureReport {
  std::size_t nodes = 0;            ///< direction x radius nodes in the near field
  double truncation_radius = 0.0;   ///< radius actually used
  double dropped_tail_bound = 0.0;  ///< nonzero only with far_field = false
};

/// psi(xi_k) on every grid mode, made real-preserving at the Nyquist modes.
Spectrum symbol_table(const LevyMeasure& measure, const Grid& grid);

/// Fourier multiplier of the operator on the grid for the given route (-psi
/// for Multiplier). Tables are memoized per measure digest, grid and route.
Spectrum operator_table(const LevyMeasure& measure, const Grid& grid, const OperatorRoute& route = {},
                        QuadratureReport* report = nullptr);

/// L f(x) = int (f(x+y) - f(x) - y^(alpha).grad f(x)) nu(dy), componentwise.
GridField apply(const LevyMeasure& measure, const GridField& field, const OperatorRoute& route = {},
                QuadratureReport* report = nullptr);

/// The adjoint, i.e. the operator of the reflected measure nu(-dy).
GridField adjoint_apply(const LevyMeasure& measure, const GridField& field, const OperatorRoute& route = {});

/// L(f zeta) - (L f) zeta - f (L zeta) computed by composing `apply`.
GridField commutator_composed(const LevyMeasure& measure, const GridField& f, const GridField& zeta);

/// The same defect from int [f(x+y)-f(x)][zeta(x+y)-zeta(x)] nu(dy) by
/// quadrature. Uses the quadrature parameters of `route` whatever its variant.
GridField commutator_direct(const LevyMeasure& measure, const GridField& f, const GridField& zeta,
                            const OperatorRoute& route);

/// Both commutator routes; throws ConsistencyFailure unless they agree to
/// 1e-6 in relative L2. The direct route multiplies interpolants of f and
/// zeta while the composed route interpolates the sampled product, so the
/// grid has to resolve f zeta for the two to agree.
///
/// The denominator of the comparison is floored at 1e-3 times the size of
/// the three composed terms, so a defect that cancels almost exactly is
/// compared against its parts. Returns the composed route.
GridField commutator_defect(const LevyMeasure& measure, const GridField& f, const GridField& zeta,
                            double* discrepancy = nullptr);

/// Quadrature route used by commutator_defect: inner radius h / 8, 20 radial
/// nodes per panel.
OperatorRoute commutator_route();

/// E(sigma) = int_1^inf exp(i sigma u) u^(-1-alpha) du.
Complex tail_exponential_integral(double alpha, double sigma);

}  // namespace levylab

#endif  // LEVYLAB_NONLOCAL_OP_HPP
