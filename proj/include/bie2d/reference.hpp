#pragma once

#include <complex>

namespace bie2d {

// Separated-variables solution on the unit disk with one concentric circular
// interface of radius alpha: conductivity 1 outside it, sigma inside, and
// outer Neumann datum sin(m theta).
struct ConcentricSolution {
  int m = 1;
  double sigma = 1.0;
  double alpha = 0.5;
  double A = 0.0, B = 0.0, C = 0.0;  // branch coefficients

  ConcentricSolution(int m, double sigma, double alpha);

  // u at polar (r, theta); inner branch for r <= alpha.
  double u(double r, double theta) const;
  // Exact layer density on the interface r = alpha (the jump of du/dr).
  double inner_density(double theta) const;
};

// Disk automorphism mapping alpha to the origin, and its inverse.
std::complex<double> mobius(double alpha, std::complex<double> z);
std::complex<double> mobius_inverse(double alpha, std::complex<double> zt);

// Radius of the concentric image of the circle through (0,0) and (a,0).
double alpha_from_a(double a);
double a_from_alpha(double alpha);

// Outer Neumann datum for the non-concentric problem whose conformal image
// is the concentric one: the pullback of sin(m theta-tilde) times the
// boundary Jacobian of the map.
double nonconcentric_b1(int m, double alpha, double theta);

// Same closed form as ConcentricSolution::inner_density, exposed directly.
double exact_inner_density(int m, double sigma, double alpha, double theta);

}  // namespace bie2d
