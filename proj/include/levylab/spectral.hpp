#ifndef LEVYLAB_SPECTRAL_HPP
#define LEVYLAB_SPECTRAL_HPP

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "levylab/grid.hpp"

namespace levylab {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

/// Unnormalized forward DFT, u_hat(k) = sum_x u(x) exp(-i xi_k . x).
Spectrum forward(const Grid& grid, std::span<const double> values);
Spectrum forward(const Grid& grid, std::span<const Complex> values);
/// Inverse DFT including the 1/N^d factor, u(x) = N^-d sum_k u_hat(k) exp(i xi_k . x).
std::vector<Complex> inverse(const Grid& grid, Spectrum spectrum);

/// Inverse DFT keeping the real part. The largest discarded imaginary part,
/// relative to the largest real magnitude, is written to `max_imag` if given.
std::vector<double> inverse_real(const Grid& grid, Spectrum spectrum, double* max_imag = nullptr);

/// Table m(xi_k) over every mode of the grid.
Spectrum multiplier_table(const Grid& grid, const std::function<Complex(std::span<const double>)>& symbol);

/// Replaces m(k) by (m(k) + conj(m(-k))) / 2 so that the multiplier maps real
/// fields to real fields; only Nyquist modes change for conjugate-symmetric symbols.
void make_real_preserving(const Grid& grid, Spectrum& table);

/// Applies a precomputed multiplier table to every component. Throws
/// ConsistencyFailure if the imaginary residue exceeds imag_tolerance.
GridField apply_multiplier(const GridField& field, const Spectrum& table, double imag_tolerance = 1e-8);

/// Spectral partial derivative along `axis` (Nyquist mode dropped).
GridField partial(const GridField& field, int axis);
/// Gradient of a scalar field as a dim-component field.
GridField gradient(const GridField& scalar);
/// Directional derivative of order `order` along unit vector `theta`, scalar field.
GridField directional_derivative(const GridField& scalar, std::span<const double> theta, int order);
/// Exact translation u(x + shift) for band-limited u.
GridField translate(const GridField& field, std::span<const double> shift);

/// Zeroes every mode with |k_a| > N/3 on some axis (2/3 rule).
void dealias(const Grid& grid, Spectrum& spectrum);
GridField dealiased(const GridField& field);

/// Periodic convolution with a sampled kernel normalized to unit discrete mass.
GridField convolve_normalized(const GridField& field, const GridField& kernel);

/// Standard bump mollifier rho_eps(x) ~ exp(-1 / (1 - |x/eps|^2)) sampled on
/// the grid around the origin with periodic wrap. Requires eps >= spacing.
GridField mollifier_kernel(const Grid& grid, double eps);
/// Convolution with rho_eps; the identity when eps is below the grid spacing.
GridField mollify(const GridField& field, double eps);

}  // namespace levylab

#endif  // LEVYLAB_SPECTRAL_HPP
