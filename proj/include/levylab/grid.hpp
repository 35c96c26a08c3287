#ifndef LEVYLAB_GRID_HPP
#define LEVYLAB_GRID_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levylab {

/// Uniform periodic grid on the torus [0, L)^d with N points per axis.
///
/// Point j along an axis sits at x = j * h with h = L / N. Mode index j maps
/// to the signed wavenumber k = j for j < N/2 and k = j - N otherwise, with
/// angular frequency xi = 2 pi k / L. The flat index is row-major with axis 0
/// slowest.
class Grid {
 public:
  Grid(int dim, int points_per_axis, double side_length);

  int dim() const noexcept { return dim_; }
  int points() const noexcept { return n_; }
  double side() const noexcept { return side_; }
  double spacing() const noexcept { return side_ / n_; }
  std::size_t size() const noexcept { return size_; }
  double volume() const noexcept;
  double cell_volume() const noexcept;

  std::array<int, 3> unravel(std::size_t flat) const noexcept;
  std::size_t ravel(const std::array<int, 3>& idx) const noexcept;

  /// Coordinates of grid point `flat` written into x[0..dim).
  void point(std::size_t flat, std::span<double> x) const noexcept;
  /// Angular frequency vector of mode `flat` written into xi[0..dim).
  void frequency(std::size_t flat, std::span<double> xi) const noexcept;

  int signed_mode(int index) const noexcept { return index < n_ / 2 ? index : index - n_; }
  /// Flat index of the mode -k (mod N on every axis).
  std::size_t mirror(std::size_t flat) const noexcept;
  /// True if any axis index of `flat` is the Nyquist index N/2.
  bool is_nyquist(std::size_t flat) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.side_ == b.side_;
  }

 private:
  int dim_;
  int n_;
  double side_;
  std::size_t size_;
};

/// Real field with `components` values per grid point. Values are stored
/// component-major: values[c * grid.size() + flat].
class GridField {
 public:
  GridField(Grid grid, int components);
  GridField(Grid grid, int components, std::vector<double> values);

  /// Samples fn(x, out) at every grid point; `out` has `components` slots.
  static GridField sample(const Grid& grid, int components,
                          const std::function<void(std::span<const double>, std::span<double>)>& fn);
  static GridField sample_scalar(const Grid& grid, const std::function<double(std::span<const double>)>& fn);
  static GridField constant(const Grid& grid, int components, double value);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> component(int c) const noexcept;
  std::span<double> component(int c) noexcept;

  double operator()(int c, std::size_t flat) const noexcept { return values_[c * grid_.size() + flat]; }
  double& operator()(int c, std::size_t flat) noexcept { return values_[c * grid_.size() + flat]; }

  /// Extracts component c as a scalar field.
  GridField extract(int c) const;
  bool all_finite() const noexcept;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s) noexcept;
  /// this += s * other
  GridField& axpy(double s, const GridField& other);

  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(double s, GridField a) { return a *= s; }

 private:
  void check_compatible(const GridField& other) const;

  Grid grid_;
  int components_;
  std::vector<double> values_;
};

/// Pointwise product of two scalar fields on the same grid.
GridField pointwise_product(const GridField& a, const GridField& b);

/// Frames u(t_k), t_k = k * time_step, all on one grid with one component count.
class SpaceTimeField {
 public:
  SpaceTimeField(double time_step, std::vector<GridField> frames);

  double time_step() const noexcept { return time_step_; }
  std::size_t size() const noexcept { return frames_.size(); }
  double horizon() const noexcept { return time_step_ * static_cast<double>(frames_.size() - 1); }
  const Grid& grid() const noexcept { return frames_.front().grid(); }
  int components() const noexcept { return frames_.front().components(); }

  const GridField& frame(std::size_t k) const { return frames_.at(k); }
  const GridField& back() const noexcept { return frames_.back(); }
  const std::vector<GridField>& frames() const noexcept { return frames_; }

  /// Linear interpolation in time, clamped to [0, horizon].
  GridField at_time(double t) const;

 private:
  double time_step_;
  std::vector<GridField> frames_;
};

}  // namespace levylab

#endif  // LEVYLAB_GRID_HPP
