#pragma once

#include <vector>

#include "bie2d/geometry.hpp"

namespace bie2d {

// Gauss-Legendre rule on [-1, 1].  Rules are computed on first use and cached.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

// One Gauss-Legendre panel covering the parameter interval [a, b) (b may
// exceed 1 for the panel that wraps around the periodic seam).
struct Panel {
  double a = 0, b = 0;
  int order = 0;
  int offset = 0;  // index of the panel's first node in the grid arrays
};

// Quadrature grid on one closed curve.  Either a uniform (shifted trapezoid)
// grid, whose weights are exact for smooth periodic integrands, or a
// composite Gauss-Legendre panel grid.  Weights include the speed factor, so
// sum(weight[m] * f(point[m])) approximates the arclength integral of f.
struct InterfaceGrid {
  enum class Scheme { Uniform, Paneled };

  Scheme scheme = Scheme::Uniform;
  int curve_index = -1;
  double shift = 0.5;        // uniform grids: q_m = (m + shift) / M
  std::vector<Panel> panels; // paneled grids only

  std::vector<double> q;         // parameter of each node
  std::vector<double> weight;    // quadrature weight (arclength measure)
  std::vector<double> speed;     // |x'(q_m)|
  std::vector<double> curvature; // signed curvature at nodes
  std::vector<double> spacing;   // local node spacing (arclength, see below)
  std::vector<double> arc;       // arclength coordinate of each node
  std::vector<Vec2> point;
  std::vector<Vec2> normal;

  int size() const { return static_cast<int>(q.size()); }
  bool uniform() const { return scheme == Scheme::Uniform; }
  // Panel containing node index m (paneled grids).
  int panel_of(int m) const;
};

// Uniform shifted grid with M nodes: q_m = (m + shift)/M, weight = speed/M.
InterfaceGrid make_uniform_grid(const Curve& curve, int M, double shift = 0.5);

// Composite Gauss-Legendre grid.  breaks lists the panel left endpoints in
// increasing order within [0, 1); panel k spans [breaks[k], breaks[k+1]) and
// the last panel wraps to breaks[0] + 1.  orders gives the node count per
// panel (one entry per panel, or a single entry shared by all).
// Throws EmptyPanel if a panel has zero parameter length.
InterfaceGrid make_paneled_grid(const Curve& curve,
                                const std::vector<double>& breaks,
                                const std::vector<int>& orders);
InterfaceGrid make_paneled_grid(const Curve& curve,
                                const std::vector<double>& breaks, int order);

}  // namespace bie2d
