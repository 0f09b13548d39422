#include "bie2d/interpolation.hpp"

#include <cmath>
#include <numbers>

#include "bie2d/quadrature.hpp"

namespace bie2d {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double trig_interpolate(std::span<const double> f, double shift, double q) {
  int M = static_cast<int>(f.size());
  if (M < 2) throw OutOfRange("trig interpolation needs at least 2 samples");
  bool even = (M % 2 == 0);
  double num = 0, den = 0;
  for (int m = 0; m < M; ++m) {
    double qm = (m + shift) / M;
    double x = kPi * (q - qm);
    double s = std::sin(x);
    if (std::abs(s) < 1e-14) return f[m];  // query hit a node
    double F = even ? std::cos(x) / s : 1.0 / s;
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    num += sign * f[m] * F;
    den += sign * F;
  }
  return num / den;
}

BarycentricLagrange::BarycentricLagrange(std::vector<double> nodes_in)
    : nodes(std::move(nodes_in)) {
  int n = static_cast<int>(nodes.size());
  if (n < 1) throw OutOfRange("empty node set");
  w.assign(n, 1.0);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      if (k == m) continue;
      double d = nodes[m] - nodes[k];
      if (d == 0) throw CoincidentPoints("repeated interpolation node");
      w[m] /= d;
    }
  }
}

double BarycentricLagrange::eval(std::span<const double> f, double t) const {
  int n = static_cast<int>(nodes.size());
  if (static_cast<int>(f.size()) != n)
    throw IndexMismatch("sample count does not match node count");
  double num = 0, den = 0;
  for (int m = 0; m < n; ++m) {
    double d = t - nodes[m];
    if (std::abs(d) < 1e-15) return f[m];
    double c = w[m] / d;
    num += c * f[m];
    den += c;
  }
  return num / den;
}

std::vector<std::complex<double>> fourier_coefficients(
    std::span<const double> f, double shift) {
  int M = static_cast<int>(f.size());
  std::vector<std::complex<double>> c(M);
  for (int k = 0; k < M; ++k) {
    int freq = (k <= M / 2) ? k : k - M;
    std::complex<double> sum = 0;
    for (int m = 0; m < M; ++m) {
      double ang = -kTwoPi * freq * (m + shift) / M;
      sum += f[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    c[k] = sum / static_cast<double>(M);
  }
  return c;
}

SpectralTail fourier_tail(std::span<const double> f, double shift) {
  int M = static_cast<int>(f.size());
  if (M < 4) throw OutOfRange("tail estimate needs at least 4 samples");
  int K = (M - 1) / 2;
  auto coeff_mag = [&](int freq) {
    std::complex<double> sum = 0;
    for (int m = 0; m < M; ++m) {
      double ang = -kTwoPi * freq * (m + shift) / M;
      sum += f[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return std::abs(sum) / M;
  };
  SpectralTail tail;
  tail.last = coeff_mag(K);
  tail.second_last = coeff_mag(K - 1);
  return tail;
}

double fourier_integral(const std::vector<std::complex<double>>& coeffs,
                        double qa, double qb) {
  int M = static_cast<int>(coeffs.size());
  std::complex<double> total = 0;
  auto mode_integral = [&](double freq) {
    // integral of exp(2 pi i freq q) over [qa, qb]
    if (freq == 0) return std::complex<double>(qb - qa, 0);
    std::complex<double> iw(0, kTwoPi * freq);
    return (std::exp(iw * qb) - std::exp(iw * qa)) / iw;
  };
  for (int k = 0; k < M; ++k) {
    int freq = (k <= M / 2) ? k : k - M;
    if (M % 2 == 0 && k == M / 2) {
      // Nyquist mode of an even grid: split into conjugate half-modes so the
      // reconstructed integrand is real.
      total += 0.5 * coeffs[k] * mode_integral(freq);
      total += 0.5 * std::conj(coeffs[k]) * mode_integral(-freq);
    } else {
      total += coeffs[k] * mode_integral(freq);
    }
  }
  return total.real();
}

double legendre_P(int k, double t) {
  if (k == 0) return 1;
  double p0 = 1, p1 = t;
  for (int j = 2; j <= k; ++j) {
    double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

std::vector<double> legendre_coefficients(std::span<const double> f) {
  int n = static_cast<int>(f.size());
  const GaussRule& rule = gauss_legendre(n);
  std::vector<double> c(n, 0.0);
  // Run the three-term recurrence once per node, accumulating projections
  // against every degree at the same time.
  for (int m = 0; m < n; ++m) {
    double t = rule.x[m];
    double wf = rule.w[m] * f[m];
    double p0 = 1, p1 = t;
    c[0] += wf;
    if (n > 1) c[1] += wf * t;
    for (int k = 2; k < n; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      c[k] += wf * p2;
      p0 = p1;
      p1 = p2;
    }
  }
  for (int k = 0; k < n; ++k) c[k] *= (2.0 * k + 1.0) / 2.0;
  return c;
}

SpectralTail legendre_tail(std::span<const double> f) {
  int n = static_cast<int>(f.size());
  if (n < 4) throw OutOfRange("tail estimate needs at least 4 samples");
  std::vector<double> c = legendre_coefficients(f);
  SpectralTail tail;
  tail.last = std::abs(c[n - 1]);
  tail.second_last = std::abs(c[n - 2]);
  return tail;
}

double legendre_partial_integral(const std::vector<double>& coeffs, double t1,
                                 double t2) {
  // Antiderivative of P_k is (P_{k+1} - P_{k-1}) / (2k+1) for k >= 1.
  double total = 0;
  int n = static_cast<int>(coeffs.size());
  for (int k = 0; k < n; ++k) {
    double ik;
    if (k == 0) {
      ik = t2 - t1;
    } else {
      ik = (legendre_P(k + 1, t2) - legendre_P(k - 1, t2) -
            legendre_P(k + 1, t1) + legendre_P(k - 1, t1)) /
           (2.0 * k + 1.0);
    }
    total += coeffs[k] * ik;
  }
  return total;
}

}  // namespace bie2d
