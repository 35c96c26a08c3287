#include "levylab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "levylab/errors.hpp"

namespace levylab {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (dim, n, sign) and never destroyed.
class PlanCache {
 public:
  fftw_plan get(const Grid& grid, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(grid.dim(), grid.points(), sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<int> dims(grid.dim(), grid.points());
    auto* buf = fftw_alloc_complex(grid.size());
    fftw_plan plan = fftw_plan_dft(grid.dim(), dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (plan == nullptr) throw Error(ErrorKind::InvalidArgument, "FFTW could not create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute(const Grid& grid, int sign, std::vector<Complex>& data) {
  fftw_plan plan = plan_cache().get(grid, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

Spectrum forward(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw InvalidArgument("forward transform size mismatch");
  Spectrum data(values.begin(), values.end());
  execute(grid, FFTW_FORWARD, data);
  return data;
}

Spectrum forward(const Grid& grid, std::span<const Complex> values) {
  if (values.size() != grid.size()) throw InvalidArgument("forward transform size mismatch");
  Spectrum data(values.begin(), values.end());
  execute(grid, FFTW_FORWARD, data);
  return data;
}

std::vector<Complex> inverse(const Grid& grid, Spectrum spectrum) {
  if (spectrum.size() != grid.size()) throw InvalidArgument("inverse transform size mismatch");
  execute(grid, FFTW_BACKWARD, spectrum);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : spectrum) v *= scale;
  return spectrum;
}

std::vector<double> inverse_real(const Grid& grid, Spectrum spectrum, double* max_imag) {
  auto data = inverse(grid, std::move(spectrum));
  std::vector<double> out(data.size());
  double re_max = 0.0;
  double im_max = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = data[i].real();
    re_max = std::max(re_max, std::abs(data[i].real()));
    im_max = std::max(im_max, std::abs(data[i].imag()));
  }
  if (max_imag != nullptr) *max_imag = re_max > 0.0 ? im_max / re_max : im_max;
  return out;
}

Spectrum multiplier_table(const Grid& grid, const std::function<Complex(std::span<const double>)>& symbol) {
  Spectrum table(grid.size());
  std::array<double, 3> xi{};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.frequency(k, xi);
    table[k] = symbol(std::span<const double>(xi.data(), grid.dim()));
  }
  return table;
}

void make_real_preserving(const Grid& grid, Spectrum& table) {
  Spectrum sym(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) sym[k] = 0.5 * (table[k] + std::conj(table[grid.mirror(k)]));
  table = std::move(sym);
}

GridField apply_multiplier(const GridField& field, const Spectrum& table, double imag_tolerance) {
  const Grid& grid = field.grid();
  if (table.size() != grid.size()) throw InvalidArgument("multiplier table size mismatch");
  GridField out(grid, field.components());
  for (int c = 0; c < field.components(); ++c) {
    Spectrum s = forward(grid, field.component(c));
    for (std::size_t k = 0; k < s.size(); ++k) s[k] *= table[k];
    double residue = 0.0;
    auto values = inverse_real(grid, std::move(s), &residue);
    if (residue > imag_tolerance)
      throw ConsistencyFailure("multiplier produced an imaginary residue above tolerance", residue);
    std::copy(values.begin(), values.end(), out.component(c).begin());
  }
  return out;
}

GridField partial(const GridField& field, int axis) {
  const Grid& grid = field.grid();
  if (axis < 0 || axis >= grid.dim()) throw InvalidArgument("axis out of range");
  auto table = multiplier_table(grid, [axis](std::span<const double> xi) { return Complex(0.0, xi[axis]); });
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid.unravel(k)[axis] == grid.points() / 2) table[k] = 0.0;
  return apply_multiplier(field, table, 1e-6);
}

GridField gradient(const GridField& scalar) {
  if (scalar.components() != 1) throw InvalidArgument("gradient needs a scalar field");
  const Grid& grid = scalar.grid();
  GridField out(grid, grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    auto da = partial(scalar, a);
    std::copy(da.values().begin(), da.values().end(), out.component(a).begin());
  }
  return out;
}

GridField directional_derivative(const GridField& scalar, std::span<const double> theta, int order) {
  const Grid& grid = scalar.grid();
  auto table = multiplier_table(grid, [&](std::span<const double> xi) {
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += xi[a] * theta[a];
    return std::pow(Complex(0.0, s), order);
  });
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (order % 2 == 1 && grid.is_nyquist(k)) table[k] = 0.0;
  make_real_preserving(grid, table);
  return apply_multiplier(scalar, table, 1e-6);
}

GridField translate(const GridField& field, std::span<const double> shift) {
  const Grid& grid = field.grid();
  auto table = multiplier_table(grid, [&](std::span<const double> xi) {
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += xi[a] * shift[a];
    return std::polar(1.0, s);
  });
  make_real_preserving(grid, table);
  return apply_multiplier(field, table, 1e-6);
}

void dealias(const Grid& grid, Spectrum& spectrum) {
  const int cutoff = grid.points() / 3;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const auto idx = grid.unravel(k);
    for (int a = 0; a < grid.dim(); ++a) {
      if (std::abs(grid.signed_mode(idx[a])) > cutoff) {
        spectrum[k] = 0.0;
        break;
      }
    }
  }
}

GridField dealiased(const GridField& field) {
  const Grid& grid = field.grid();
  GridField out(grid, field.components());
  for (int c = 0; c < field.components(); ++c) {
    auto s = forward(grid, field.component(c));
    dealias(grid, s);
    auto v = inverse_real(grid, std::move(s));
    std::copy(v.begin(), v.end(), out.component(c).begin());
  }
  return out;
}

GridField convolve_normalized(const GridField& field, const GridField& kernel) {
  const Grid& grid = field.grid();
  if (!(kernel.grid() == grid) || kernel.components() != 1)
    throw InvalidArgument("convolution kernel must be a scalar field on the same grid");
  double mass = 0.0;
  for (double v : kernel.values()) mass += v;
  if (!(std::abs(mass) > 0.0)) throw InvalidArgument("convolution kernel has zero mass");
  auto table = forward(grid, kernel.values());
  for (auto& v : table) v /= mass;
  make_real_preserving(grid, table);
  return apply_multiplier(field, table, 1e-8);
}

GridField mollifier_kernel(const Grid& grid, double eps) {
  if (!(eps >= grid.spacing())) throw InvalidArgument("mollifier width below grid spacing");
  const double half = 0.5 * grid.side();
  return GridField::sample_scalar(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double xa : x) {
      const double d = xa > half ? xa - grid.side() : xa;
      r2 += d * d;
    }
    const double s = r2 / (eps * eps);
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
  });
}

GridField mollify(const GridField& field, double eps) {
  if (!(eps >= field.grid().spacing())) return field;
  return convolve_normalized(field, mollifier_kernel(field.grid(), eps));
}

}  // namespace levylab
