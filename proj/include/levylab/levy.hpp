#ifndef LEVYLAB_LEVY_HPP
#define LEVYLAB_LEVY_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace levylab {

using Complex = std::complex<double>;

struct Atom {
  std::vector<double> direction;  ///< unit vector
  double weight;
};

/// Finite measure on the unit sphere: either a multiple of the normalized
/// surface measure or a finite sum of weighted atoms.
class SphericalMeasure {
 public:
  static SphericalMeasure isotropic(int dim, double total_mass);
  static SphericalMeasure discrete(std::vector<Atom> atoms);
  /// Atoms +theta and -theta with weight w / 2 each.
  static SphericalMeasure symmetric_pair(std::vector<double> direction, double total_weight);

  int dim() const noexcept { return dim_; }
  bool is_isotropic() const noexcept { return isotropic_; }
  double total_mass() const noexcept { return total_mass_; }
  /// Empty for the isotropic variant.
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Invariance under theta -> -theta.
  bool is_symmetric() const;
  /// sum w theta (zero for isotropic).
  std::vector<double> first_moment() const;
  SphericalMeasure reflected() const;
  /// Integral of |theta0 . theta|^alpha against the measure.
  double alpha_moment(std::span<const double> theta0, double alpha) const;

 private:
  SphericalMeasure() = default;
  int dim_ = 1;
  bool isotropic_ = false;
  double total_mass_ = 0.0;
  std::vector<Atom> atoms_;
};

/// Named density family for a(y) in nu(dy) = a(y) dy / |y|^(d + alpha).
///
///   constant [c]                 a = c
///   angular  [mean, amp, m]      a = mean + amp cos(m phi(y)), phi the azimuth of (y0, y1)
///   radial   [mean, amp, scale]  a = mean + amp exp(-|y|^2 / scale^2)
///   skew     [mean, amp, scale]  a = mean + amp sqrt(e) (y0/scale) exp(-|y|^2 / (2 scale^2))
///
/// In d = 1 the azimuth is 0 for y > 0 and pi for y < 0.
struct DensitySpec {
  std::string family;
  std::vector<double> params;
};

/// a(y) = g(y/|y|) + A(y/|y|) q(|y|): a degree-zero angular part plus a
/// separable perturbation decaying in |y|.
class DensityFunction {
 public:
  DensityFunction(int dim, DensitySpec spec);

  int dim() const noexcept { return dim_; }
  const DensitySpec& spec() const noexcept { return spec_; }
  double operator()(std::span<const double> y) const;
  double angular(std::span<const double> theta) const;
  double perturbation_angle(std::span<const double> theta) const;
  double perturbation_radius(double r) const;
  bool has_perturbation() const noexcept;
  /// Radius beyond which the perturbation is below double precision.
  double perturbation_extent() const noexcept;
  double lower() const noexcept { return c1_; }
  double upper() const noexcept { return c2_; }
  bool is_symmetric() const noexcept { return symmetric_; }
  DensityFunction reflected() const;

 private:
  int dim_;
  DensitySpec spec_;
  double c1_ = 0.0;
  double c2_ = 0.0;
  bool symmetric_ = true;
};

enum class MeasureKind { StableSpectral, DensityKernel, DirectSumAxes };

const char* to_string(MeasureKind kind);

/// Levy measure of one of three families.
///
/// StableSpectral: nu(dy) = r^(-1-alpha) dr Sigma(dtheta).
/// DensityKernel:  nu(dy) = a(y) |y|^(-d-alpha) dy.
/// DirectSumAxes:  sum over axes i of w_i |r|^(-1-alpha) dr along the i-th
///                 coordinate line (density w_i on each half-line).
class LevyMeasure {
 public:
  static LevyMeasure stable(double alpha, SphericalMeasure sigma);
  static LevyMeasure density(int dim, double alpha, DensitySpec spec);
  static LevyMeasure direct_sum(double alpha, std::vector<double> axis_weights);

  MeasureKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  int dim() const noexcept { return dim_; }
  const SphericalMeasure& sigma() const;
  const DensityFunction& density_function() const;
  const std::vector<double>& axis_weights() const;

  bool is_symmetric() const;
  /// At alpha = 1: the odd part cancels on every annulus. Always true for alpha != 1.
  bool satisfies_cancellation() const;
  /// nu(-dy).
  LevyMeasure reflected() const;
  /// Spherical part of a stable measure bounding nu from below / above.
  SphericalMeasure lower_stable_bound() const;
  SphericalMeasure upper_stable_bound() const;

  /// Hex FNV-1a digest of the serialized document.
  std::string digest() const;

 private:
  LevyMeasure(MeasureKind kind, double alpha, int dim) : kind_(kind), alpha_(alpha), dim_(dim) {}
  MeasureKind kind_;
  double alpha_;
  int dim_;
  std::vector<SphericalMeasure> sigma_;
  std::vector<DensityFunction> density_;
  std::vector<double> axes_;
};

/// Surface area of S^(d-1): 2, 2 pi, 4 pi.
double sphere_area(int dim);
/// C_alpha = int_0^inf (1 - cos r) r^(-1-alpha) dr.
double radial_constant(double alpha);
/// Mean of |theta_1|^alpha under the normalized surface measure of S^(d-1).
double isotropic_moment(int dim, double alpha);
/// Symbol of the one-dimensional measure r^(-1-alpha) dr on (0, inf) with the
/// standard compensation, at s: int (1 + i s r c(r) - e^(i s r)) r^(-1-alpha) dr.
Complex half_line_symbol(double alpha, double s);

/// Levy-Khintchine exponent psi(xi) = int (1 + i xi.y^(alpha) - e^(i xi.y)) nu(dy).
Complex symbol(const LevyMeasure& measure, std::span<const double> xi);

/// nu(|y| > radius).
double tail_mass(const LevyMeasure& measure, double radius);

/// kappa1 = C_alpha min over unit theta0 of int |theta0.theta|^alpha Sigma(dtheta).
double nondegeneracy_constant(const SphericalMeasure& sigma, double alpha);

struct SymbolBounds {
  double kappa0;  ///< empirical, a lower estimate of the true upper constant
  double kappa1;
};

/// sup over the grid of |psi(xi)| / |xi|^alpha. Only a lower estimate of kappa0.
double symbol_upper_constant(const LevyMeasure& measure, double alpha,
                             const std::vector<std::vector<double>>& xi_grid);
SymbolBounds symbol_bounds(const LevyMeasure& measure, const std::vector<std::vector<double>>& xi_grid);

}  // namespace levylab

#endif  // LEVYLAB_LEVY_HPP
