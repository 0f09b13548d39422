#include "bie2d/reference.hpp"

#include <cmath>

#include "bie2d/errors.hpp"

namespace bie2d {

ConcentricSolution::ConcentricSolution(int m_in, double sigma_in,
                                       double alpha_in)
    : m(m_in), sigma(sigma_in), alpha(alpha_in) {
  if (m < 1) throw BadConfig("concentric solution: mode must be >= 1");
  if (!(sigma > 0.0)) throw BadSigma("concentric solution: sigma must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw OutOfRange("concentric solution: alpha must lie in (0, 1)");
  const double D = std::pow(alpha, 2 * m) * (sigma - 1.0) + sigma + 1.0;
  A = (2.0 / m) / D;
  B = A * (sigma + 1.0) / 2.0;
  C = B - 1.0 / m;
}

double ConcentricSolution::u(double r, double theta) const {
  if (r < 0.0 || r > 1.0 + 1e-12)
    throw OutOfDomain("concentric solution: r outside the unit disk");
  const double s = std::sin(m * theta);
  if (r <= alpha) return A * std::pow(r, m) * s;
  return (B * std::pow(r, m) + C * std::pow(r, -m)) * s;
}

double ConcentricSolution::inner_density(double theta) const {
  return exact_inner_density(m, sigma, alpha, theta);
}

std::complex<double> mobius(double alpha, std::complex<double> z) {
  return (z - alpha) / (1.0 - alpha * z);
}

std::complex<double> mobius_inverse(double alpha, std::complex<double> zt) {
  return (zt + alpha) / (1.0 + alpha * zt);
}

double alpha_from_a(double a) {
  if (!(a >= 0.0 && a < 1.0))
    throw OutOfRange("alpha_from_a: a must lie in [0, 1)");
  const double sp = std::sqrt(1.0 + a);
  const double sm = std::sqrt(1.0 - a);
  return (sp - sm) / (sp + sm);
}

double a_from_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw OutOfRange("a_from_alpha: alpha must lie in [0, 1)");
  return 2.0 * alpha / (1.0 + alpha * alpha);
}

double nonconcentric_b1(int m, double alpha, double theta) {
  if (m < 1) throw BadConfig("nonconcentric_b1: mode must be >= 1");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw OutOfRange("nonconcentric_b1: alpha must lie in [0, 1)");
  const std::complex<double> z(std::cos(theta), std::sin(theta));
  const std::complex<double> w = mobius(alpha, z);
  const double theta_t = std::atan2(w.imag(), w.real());
  const double jacobian = (1.0 - alpha * alpha) /
                          (1.0 - 2.0 * alpha * std::cos(theta) + alpha * alpha);
  return std::sin(m * theta_t) * jacobian;
}

double exact_inner_density(int m, double sigma, double alpha, double theta) {
  if (m < 1) throw BadConfig("exact_inner_density: mode must be >= 1");
  const double D = std::pow(alpha, 2 * m) * (sigma - 1.0) + sigma + 1.0;
  return std::sin(m * theta) * 2.0 * std::pow(alpha, m - 1) * (sigma - 1.0) / D;
}

}  // namespace bie2d
