#include "rules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levylab/errors.hpp"

namespace levylab::detail {

double compensation(double alpha, double r) {
  if (alpha > 1.0) return 1.0;
  if (alpha == 1.0) return r <= 1.0 ? 1.0 : 0.0;
  return 0.0;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton on P_n from the Tricomi initial guesses.
  for (int i = 0; i < n; ++i) {
    double u = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = u;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * u * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (u * p1 - p0) / (u * u - 1.0);
      const double du = p1 / dp;
      u -= du;
      if (std::abs(du) < 1e-16) break;
    }
    nodes[i] = u;
    weights[i] = 2.0 / ((1.0 - u * u) * dp * dp);
  }
}

void sphere_rule(int dim, int n, std::vector<std::array<double, 3>>& nodes, std::vector<double>& weights) {
  constexpr double kPi = std::numbers::pi;
  nodes.clear();
  weights.clear();
  if (dim == 1) {
    nodes.push_back({1.0, 0.0, 0.0});
    nodes.push_back({-1.0, 0.0, 0.0});
    weights.assign(2, 1.0);
    return;
  }
  if (dim == 2) {
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / n;
      nodes.push_back({std::cos(phi), std::sin(phi), 0.0});
      weights.push_back(2.0 * kPi / n);
    }
    return;
  }
  std::vector<double> us, wus;
  gauss_legendre(std::max(2, n / 2), us, wus);
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double u = us[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / n;
      nodes.push_back({s * std::cos(phi), s * std::sin(phi), u});
      weights.push_back(wus[i] * 2.0 * kPi / n);
    }
  }
}

}  // namespace levylab::detail
