#pragma once

#include <vector>

#include "bie2d/solve.hpp"

namespace bie2d {

// One rung of the grid-refinement ladder: the solve at M uniform nodes per
// interface compared against the next rung (normally 2M).  The last rung has
// nothing to compare against, so has_diff is false there.
struct RefineRow {
  int M = 0;
  double u_value = 0.0;    // u at the probe point (constant not fixed)
  double u_diff = 0.0;     // |u_M(x0) - u_next(x0)|
  double gamma_diff = 0.0; // max over common nodes of |gamma_M - gamma_next|
  bool has_diff = false;
};

// Solves the problem at every ladder size with a fixed uniform grid (no
// adaptivity) and reports successive differences of the potential at the
// probe point x0 and of the densities at the coarse nodes.
std::vector<RefineRow> refinement_study(const RegionTree& tree,
                                        const std::vector<BoundaryFn>& data,
                                        SolveSettings base,
                                        const std::vector<int>& ladder,
                                        const Vec2& x0);

// One row of the rescaling comparison: GMRES iterations with and without
// density rescaling, from a zero initial guess, at M uniform nodes per
// interface.
struct RescaleRow {
  double sigma = 0.0;
  int M = 0;
  int iters_rescaled = 0;
  int iters_unrescaled = 0;
};

// Alternates conductivities 1 and sigma down the nesting chain of the given
// curves (the root region gets 1) and measures GMRES iteration counts for
// both formulations at each sweep value and grid size.  sigma = 1 is
// rejected as a degenerate interface.
std::vector<RescaleRow> rescaling_study(const std::vector<Curve>& curves,
                                        const std::vector<double>& sweep,
                                        const std::vector<int>& grid_sizes,
                                        const BoundaryFn& outer_data,
                                        SolveSettings base);

}  // namespace bie2d
