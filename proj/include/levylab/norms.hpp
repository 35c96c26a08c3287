#ifndef LEVYLAB_NORMS_HPP
#define LEVYLAB_NORMS_HPP

#include <limits>

#include "levylab/grid.hpp"

namespace levylab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Riemann-sum L^p norm (h^d sum |u|^p)^(1/p); p = infinity gives max |u|.
/// Vector-valued fields use the Euclidean magnitude at each point.
double lp_norm(const GridField& field, double p);

/// || (I - Delta)^(alpha/2) u ||_p via the Fourier multiplier (1 + |xi|^2)^(alpha/2).
double bessel_norm(const GridField& field, double alpha, double p);

/// Double Riemann sum of |u(x)-u(y)|^p / |x-y|^(d + beta p) over pairs with
/// h <= |x-y| <= L/2 in the periodic metric, raised to 1/p.
double slobodeckij_seminorm(const GridField& field, double beta, double p);
/// lp_norm + slobodeckij_seminorm.
double slobodeckij_norm(const GridField& field, double beta, double p);

enum class PairSet {
  Periodic,     ///< minimum-image distance on the torus
  NonWrapping,  ///< only pairs joined without crossing the domain boundary
};

/// sup over pairs 0 < |x-y| <= 1 of |u(x)-u(y)| / |x-y|^beta.
double holder_seminorm(const GridField& field, double beta, PairSet pairs = PairSet::Periodic);
/// sup norm + holder_seminorm.
double holder_norm(const GridField& field, double beta, PairSet pairs = PairSet::Periodic);

/// L^2 inner product h^d sum u v over all components.
double inner_product(const GridField& a, const GridField& b);
/// ||a - b||_2 / ||b||_2 (absolute when b vanishes).
double relative_l2_error(const GridField& a, const GridField& b);
/// L^p norm of the gradient magnitude of a scalar field.
double gradient_lp_norm(const GridField& scalar, double p);

}  // namespace levylab

#endif  // LEVYLAB_NORMS_HPP
