// Quadrature rules shared by the symbol and operator code. Internal header.
#ifndef LEVYLAB_SRC_RULES_HPP
#define LEVYLAB_SRC_RULES_HPP

#include <array>
#include <vector>

namespace levylab::detail {

/// Compensation indicator c(r) of y^(alpha): 1 for alpha > 1, 1{r <= 1} at
/// alpha = 1, 0 below.
double compensation(double alpha, double r);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Direction rule on S^(d-1) with weights summing to the surface area:
/// d = 1 the two points, d = 2 n uniform angles, d = 3 Gauss-Legendre in the
/// polar cosine (n / 2 nodes) times n uniform azimuths.
void sphere_rule(int dim, int n, std::vector<std::array<double, 3>>& nodes, std::vector<double>& weights);

}  // namespace levylab::detail

#endif  // LEVYLAB_SRC_RULES_HPP
