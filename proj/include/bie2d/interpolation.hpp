#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bie2d/errors.hpp"

namespace bie2d {

// Magnitudes of the last two spectral coefficients of an interpolant; the
// adaptive solver treats a set of samples as resolved when these are small
// relative to the sample magnitude.
struct SpectralTail {
  double last = 0;         // highest retained mode
  double second_last = 0;  // next-to-highest
  double max_abs() const { return last > second_last ? last : second_last; }
};

// Barycentric trigonometric interpolation through samples f_m taken at the
// uniform shifted nodes q_m = (m + shift)/M.  Uses csc weights for odd M and
// cot weights for even M; reproduces trigonometric polynomials of degree
// <= (M-1)/2 exactly when M is odd.
double trig_interpolate(std::span<const double> f, double shift, double q);

// Barycentric Lagrange interpolation on an arbitrary small node set (panels).
struct BarycentricLagrange {
  std::vector<double> nodes;
  std::vector<double> w;
  explicit BarycentricLagrange(std::vector<double> nodes_in);
  double eval(std::span<const double> f, double t) const;
};

// Discrete Fourier coefficients of samples on the shifted uniform grid.
// Entry k corresponds to frequency k for k <= M/2 and k - M above; the
// shift enters through an explicit phase factor exp(-2 pi i freq (shift/M)).
std::vector<std::complex<double>> fourier_coefficients(
    std::span<const double> f, double shift);

// |c_K| and |c_{K-1}| with K = floor((M-1)/2), computed directly (O(M) per
// coefficient) without forming the full spectrum.
SpectralTail fourier_tail(std::span<const double> f, double shift);

// Integral over the parameter interval [qa, qb] of the band-limited
// interpolant with the given spectrum (qb may exceed 1 for wrapped arcs).
double fourier_integral(const std::vector<std::complex<double>>& coeffs,
                        double qa, double qb);

// Legendre expansion of the degree n-1 interpolant through samples at the
// n-point Gauss-Legendre nodes; the Gauss projection is exact for it.
std::vector<double> legendre_coefficients(std::span<const double> f);
SpectralTail legendre_tail(std::span<const double> f);

// Integral over [t1, t2] within [-1, 1] of a Legendre series.
double legendre_partial_integral(const std::vector<double>& coeffs, double t1,
                                 double t2);

double legendre_P(int k, double t);

}  // namespace bie2d
