#include "levylab/heatkernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/nonlocal_op.hpp"
#include "levylab/spectral.hpp"

namespace levylab {
namespace {

constexpr double kPi = std::numbers::pi;

std::mutex kernel_mutex;
std::map<std::string, GridField> kernel_cache;

void check_time(double t, const char* what) {
  if (!std::isfinite(t)) throw InvalidArgument(std::string(what) + " must be finite");
}

}  // namespace

DriftSchedule::DriftSchedule(int dim, double step, std::vector<std::vector<double>> values, double bound)
    : dim_(dim), step_(step), values_(std::move(values)), bound_(bound) {}

DriftSchedule DriftSchedule::zero(int dim) {
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  return DriftSchedule(dim, 1.0, {std::vector<double>(dim, 0.0)}, 0.0);
}

DriftSchedule DriftSchedule::constant(std::vector<double> theta) {
  const int dim = static_cast<int>(theta.size());
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  double n2 = 0.0;
  for (double v : theta) {
    if (!std::isfinite(v)) throw InvalidArgument("drift must be finite");
    n2 += v * v;
  }
  return DriftSchedule(dim, 1.0, {std::move(theta)}, std::sqrt(n2));
}

DriftSchedule DriftSchedule::piecewise(double step, std::vector<std::vector<double>> values, double declared_bound) {
  if (!(step > 0.0)) throw InvalidArgument("drift schedule step must be positive");
  if (values.empty()) throw InvalidArgument("drift schedule needs at least one piece");
  const int dim = static_cast<int>(values.front().size());
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  for (const auto& v : values) {
    if (static_cast<int>(v.size()) != dim) throw InvalidArgument("drift pieces differ in dimension");
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (!(std::sqrt(n2) <= declared_bound)) throw InvalidArgument("drift piece exceeds the declared bound");
  }
  return DriftSchedule(dim, step, std::move(values), declared_bound);
}

std::vector<double> DriftSchedule::at(double t) const {
  check_time(t, "time");
  if (t < 0.0) throw InvalidArgument("drift schedule starts at t = 0");
  const auto k = static_cast<std::size_t>(std::floor(t / step_));
  return values_[std::min(k, values_.size() - 1)];
}

std::vector<double> DriftSchedule::cumulative(double t, double s) const {
  check_time(t, "time");
  check_time(s, "time");
  if (t < s) {
    auto v = cumulative(s, t);
    for (double& x : v) x = -x;
    return v;
  }
  if (s < 0.0) throw InvalidArgument("drift schedule starts at t = 0");
  std::vector<double> sum(dim_, 0.0);
  const std::size_t last = values_.size() - 1;
  double a = s;
  while (a < t) {
    const auto k = std::min(static_cast<std::size_t>(std::floor(a / step_)), last);
    const double end = k == last ? t : std::min(t, (k + 1) * step_);
    // Guard against floor landing on the previous piece at an exact break.
    if (end <= a) {
      a = std::nextafter(a, t);
      continue;
    }
    for (int i = 0; i < dim_; ++i) sum[i] += values_[k][i] * (end - a);
    a = end;
  }
  return sum;
}

GridField kernel(const LevyMeasure& measure, double t, const Grid& grid) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("kernel time must be positive");
  if (measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");
  std::ostringstream key;
  key << measure.digest() << '|' << std::hexfloat << t << '|' << grid.dim() << ',' << grid.points() << ','
      << grid.side();
  {
    std::lock_guard lock(kernel_mutex);
    auto it = kernel_cache.find(key.str());
    if (it != kernel_cache.end()) return it->second;
  }

  const double alpha = measure.alpha();
  const auto lower = measure.lower_stable_bound();
  const double kappa = nondegeneracy_constant(lower, alpha);
  if (!(kappa > 1e-12 * std::max(1.0, lower.total_mass())))
    throw PreconditionFailure("heat kernel needs a nondegenerate measure (kappa1 = 0)");

  // Alias shells needed until e^(-t kappa |xi|^alpha) drops below 1e-17.
  const int d = grid.dim();
  const int n = grid.points();
  const double L = grid.side();
  const double xi_needed = std::pow(39.0 / (t * kappa), 1.0 / alpha);
  int shells = static_cast<int>(std::ceil((xi_needed * L / (2.0 * kPi) + 0.5 * n) / n));
  shells = std::max(shells, 0);
  // Keep the symbol evaluations within a fixed budget; a grid too coarse
  // for the remaining aliases fails the mass check below.
  auto evaluations = [&](int s) { return std::pow(2.0 * s + 1.0, d) * static_cast<double>(grid.size()); };
  while (shells > 0 && evaluations(shells) > 4e7) --shells;

  Spectrum folded(grid.size(), 0.0);
  std::vector<double> xi(d), mxi(d);
  const int width = 2 * shells + 1;
  std::size_t combos = 1;
  for (int a = 0; a < d; ++a) combos *= width;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const auto idx = grid.unravel(m);
    Complex sum = 0.0;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rest = c;
      for (int a = 0; a < d; ++a) {
        const int shift = static_cast<int>(rest % width) - shells;
        rest /= width;
        const double k = grid.signed_mode(idx[a]) + static_cast<double>(shift) * n;
        xi[a] = 2.0 * kPi * k / L;
        mxi[a] = -xi[a];
      }
      sum += std::exp(-t * symbol(measure, mxi));
    }
    folded[m] = sum;
  }
  double residue = 0.0;
  auto values = inverse_real(grid, folded, &residue);
  const double scale = std::pow(n / L, d);
  for (double& v : values) v *= scale;
  GridField p(grid, 1, std::move(values));

  double mass = 0.0, lowest = 0.0;
  for (double v : p.values()) {
    mass += v;
    lowest = std::min(lowest, v);
  }
  mass *= grid.cell_volume();
  if (std::abs(mass - 1.0) > 1e-6 || lowest < -1e-6 || !p.all_finite())
    throw ResolutionTooCoarse("heat kernel mass or positivity out of tolerance", 2 * n, L);

  std::lock_guard lock(kernel_mutex);
  if (kernel_cache.size() > 64) kernel_cache.clear();
  kernel_cache.emplace(key.str(), p);
  return p;
}

GridField semigroup_apply(const LevyMeasure& measure, double t, const GridField& field) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("semigroup time must be nonnegative");
  if (t == 0.0) return field;
  Spectrum table = symbol_table(measure, field.grid());
  for (auto& v : table) v = std::exp(-t * v);
  return apply_multiplier(field, table);
}

GridField shifted_propagator(const LevyMeasure& measure, const DriftSchedule& drift, double t, double s,
                             const GridField& field) {
  if (t < s) throw InvalidArgument("propagator needs t >= s");
  if (drift.dim() != field.grid().dim()) throw InvalidArgument("drift and grid dimensions differ");
  const Grid& grid = field.grid();
  const auto theta = drift.cumulative(t, s);
  Spectrum table = symbol_table(measure, grid);
  std::vector<double> xi(grid.dim());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.frequency(k, xi);
    double phase = 0.0;
    for (int a = 0; a < grid.dim(); ++a) phase += xi[a] * theta[a];
    table[k] = std::exp(-(t - s) * table[k] - Complex(0.0, phase));
  }
  make_real_preserving(grid, table);
  return apply_multiplier(field, table);
}

}  // namespace levylab
