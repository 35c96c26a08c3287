#include "levylab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "levylab/errors.hpp"

namespace levylab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::ConsistencyFailure: return "consistency-failure";
    case ErrorKind::PreconditionFailure: return "precondition-failure";
    case ErrorKind::ResolutionTooCoarse: return "resolution-too-coarse";
    case ErrorKind::IterationFailure: return "iteration-failure";
    case ErrorKind::UnsupportedMeasure: return "unsupported-measure";
    case ErrorKind::DriftEvaluationFailure: return "drift-evaluation-failure";
    case ErrorKind::GradientAugmentationInconsistency: return "gradient-augmentation-inconsistency";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

Grid::Grid(int dim, int points_per_axis, double side_length)
    : dim_(dim), n_(points_per_axis), side_(side_length), size_(1) {
  if (dim < 1 || dim > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
  if (points_per_axis < 2 || (points_per_axis & (points_per_axis - 1)) != 0)
    throw InvalidArgument("points per axis must be a power of two >= 2");
  if (!(side_length > 0.0) || !std::isfinite(side_length))
    throw InvalidArgument("side length must be positive and finite");
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n_);
}

double Grid::volume() const noexcept { return std::pow(side_, dim_); }

double Grid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

std::array<int, 3> Grid::unravel(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t Grid::ravel(const std::array<int, 3>& idx) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * n_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

void Grid::point(std::size_t flat, std::span<double> x) const noexcept {
  const auto idx = unravel(flat);
  const double h = spacing();
  for (int a = 0; a < dim_; ++a) x[a] = idx[a] * h;
}

void Grid::frequency(std::size_t flat, std::span<double> xi) const noexcept {
  const auto idx = unravel(flat);
  const double scale = 2.0 * std::numbers::pi / side_;
  for (int a = 0; a < dim_; ++a) xi[a] = scale * signed_mode(idx[a]);
}

std::size_t Grid::mirror(std::size_t flat) const noexcept {
  auto idx = unravel(flat);
  for (int a = 0; a < dim_; ++a) idx[a] = (n_ - idx[a]) % n_;
  return ravel(idx);
}

bool Grid::is_nyquist(std::size_t flat) const noexcept {
  const auto idx = unravel(flat);
  for (int a = 0; a < dim_; ++a)
    if (idx[a] == n_ / 2) return true;
  return false;
}

GridField::GridField(Grid grid, int components)
    : grid_(grid), components_(components), values_(grid.size() * static_cast<std::size_t>(std::max(components, 0))) {
  if (components < 1) throw InvalidArgument("field needs at least one component");
}

GridField::GridField(Grid grid, int components, std::vector<double> values)
    : grid_(grid), components_(components), values_(std::move(values)) {
  if (components < 1) throw InvalidArgument("field needs at least one component");
  if (values_.size() != grid_.size() * static_cast<std::size_t>(components))
    throw InvalidArgument("field value count does not match grid size times components");
  if (!all_finite()) throw InvalidArgument("field values must be finite");
}

GridField GridField::sample(const Grid& grid, int components,
                            const std::function<void(std::span<const double>, std::span<double>)>& fn) {
  GridField out(grid, components);
  std::array<double, 3> x{};
  std::vector<double> buf(components);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    fn(std::span<const double>(x.data(), grid.dim()), buf);
    for (int c = 0; c < components; ++c) out(c, i) = buf[c];
  }
  if (!out.all_finite()) throw InvalidArgument("sampled field has non-finite values");
  return out;
}

GridField GridField::sample_scalar(const Grid& grid, const std::function<double(std::span<const double>)>& fn) {
  return sample(grid, 1, [&](std::span<const double> x, std::span<double> out) { out[0] = fn(x); });
}

GridField GridField::constant(const Grid& grid, int components, double value) {
  GridField out(grid, components);
  std::fill(out.values_.begin(), out.values_.end(), value);
  return out;
}

std::span<const double> GridField::component(int c) const noexcept {
  return std::span<const double>(values_).subspan(c * grid_.size(), grid_.size());
}

std::span<double> GridField::component(int c) noexcept {
  return std::span<double>(values_).subspan(c * grid_.size(), grid_.size());
}

GridField GridField::extract(int c) const {
  if (c < 0 || c >= components_) throw InvalidArgument("component index out of range");
  auto comp = component(c);
  return GridField(grid_, 1, std::vector<double>(comp.begin(), comp.end()));
}

bool GridField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void GridField::check_compatible(const GridField& other) const {
  if (!(grid_ == other.grid_) || components_ != other.components_)
    throw InvalidArgument("fields live on different grids or have different component counts");
}

GridField& GridField::operator+=(const GridField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

GridField& GridField::axpy(double s, const GridField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  return *this;
}

GridField pointwise_product(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid()) || a.components() != 1 || b.components() != 1)
    throw InvalidArgument("pointwise product needs two scalar fields on one grid");
  GridField out(a.grid(), 1);
  for (std::size_t i = 0; i < a.grid().size(); ++i) out(0, i) = a(0, i) * b(0, i);
  return out;
}

SpaceTimeField::SpaceTimeField(double time_step, std::vector<GridField> frames)
    : time_step_(time_step), frames_(std::move(frames)) {
  if (!(time_step > 0.0)) throw InvalidArgument("time step must be positive");
  if (frames_.empty()) throw InvalidArgument("space-time field needs at least one frame");
  for (const auto& f : frames_) {
    if (!(f.grid() == frames_.front().grid()) || f.components() != frames_.front().components())
      throw InvalidArgument("all frames must share grid and component count");
  }
}

GridField SpaceTimeField::at_time(double t) const {
  if (frames_.size() == 1 || t <= 0.0) return frames_.front();
  const double pos = t / time_step_;
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= frames_.size()) return frames_.back();
  const double w = pos - static_cast<double>(k);
  GridField out = frames_[k];
  out *= (1.0 - w);
  out.axpy(w, frames_[k + 1]);
  return out;
}

}  // namespace levylab
