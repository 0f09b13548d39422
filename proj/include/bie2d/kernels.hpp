#pragma once

#include <cmath>
#include <numbers>

#include "bie2d/errors.hpp"
#include "bie2d/geometry.hpp"

namespace bie2d {

// Free-space Green's function for the 2D Laplacian: G(x,y) = log|x-y| / 2pi.
inline double log_kernel(const Vec2& x, const Vec2& y) {
  double r2 = (x - y).squaredNorm();
  if (r2 <= 0) throw CoincidentPoints("log kernel evaluated at x == y");
  return 0.25 * std::log(r2) / std::numbers::pi;
}

// Normal derivative of G in its first argument:
//   K(x,y) = (x - y) . n(x) / (2 pi |x - y|^2),
// the kernel of the transpose double-layer operator.  On a smooth curve the
// x -> y limit exists and equals kappa(x) / (4 pi); use the _diag form there.
inline double normal_derivative_kernel(const Vec2& x, const Vec2& nx,
                                       const Vec2& y) {
  Vec2 d = x - y;
  double r2 = d.squaredNorm();
  if (r2 < 1e-28)
    throw CoincidentPoints("kernel requested at nearly coincident points");
  return d.dot(nx) / (2.0 * std::numbers::pi * r2);
}

inline double normal_derivative_kernel_diag(double curvature) {
  return curvature / (4.0 * std::numbers::pi);
}

}  // namespace bie2d
