#ifndef LEVYLAB_HEATKERNEL_HPP
#define LEVYLAB_HEATKERNEL_HPP

#include <vector>

#include "levylab/grid.hpp"
#include "levylab/levy.hpp"

namespace levylab {

/// x-independent drift theta(t), piecewise constant: values[k] on
/// [k * step, (k + 1) * step), the last value holding beyond.
class DriftSchedule {
 public:
  static DriftSchedule zero(int dim);
  static DriftSchedule constant(std::vector<double> theta);
  /// Throws InvalidArgument if some |values[k]| exceeds declared_bound.
  static DriftSchedule piecewise(double step, std::vector<std::vector<double>> values, double declared_bound);

  int dim() const noexcept { return dim_; }
  double step() const noexcept { return step_; }
  double bound() const noexcept { return bound_; }
  const std::vector<std::vector<double>>& values() const noexcept { return values_; }

  std::vector<double> at(double t) const;
  /// Theta_{t,s} = int_s^t theta(r) dr, summed piece by piece (negative for t < s).
  std::vector<double> cumulative(double t, double s) const;

 private:
  DriftSchedule(int dim, double step, std::vector<std::vector<double>> values, double bound);
  int dim_;
  double step_;
  std::vector<std::vector<double>> values_;
  double bound_;
};

/// Transition density p_t of the process with generator L, periodized on the
/// torus. Value at grid point x is p_t at the minimum-image displacement x.
/// The samples are exact: each grid mode carries the sum of e^(-t psi(-xi))
/// over its aliases.
///
/// Throws PreconditionFailure if the lower stable bound is degenerate, and
/// ResolutionTooCoarse if the mass deviates from 1 by more than 1e-6 or the
/// minimum is below -1e-6.
GridField kernel(const LevyMeasure& measure, double t, const Grid& grid);

/// P_t f, the multiplier e^(-t psi(xi)). P_t f(x) = int f(x + y) p_t(y) dy.
GridField semigroup_apply(const LevyMeasure& measure, double t, const GridField& field);

/// T_{t,s} f(x) = P_{t-s} f(x - Theta_{t,s}).
GridField shifted_propagator(const LevyMeasure& measure, const DriftSchedule& drift, double t, double s,
                             const GridField& field);

}  // namespace levylab

#endif  // LEVYLAB_HEATKERNEL_HPP
