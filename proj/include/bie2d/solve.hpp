#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bie2d/system.hpp"

namespace bie2d {

struct SolveSettings {
  // Linear solver.
  double gmres_tol = 1e-8;
  int gmres_max_iters = 600;
  int gmres_restart = 0;  // 0 = no restarting

  // Adaptive resolution of the densities.
  double adapt_tol = 1e-6;  // relative spectral tail target
  int max_rounds = 12;

  // Discretization.
  int initial_uniform_nodes = 32;  // per interface, also sets the panel rule
  double grid_shift = 0.5;         // uniform grids: nodes at (m + shift)/M
  int panel_nodes = 16;            // Gauss-Legendre nodes per panel
  int max_panel_nodes = 24;        // p-refinement ceiling before splitting
  int max_initial_panels = 64;     // cap on the clearance-based panel count
  int max_uniform_nodes = 16384;   // hard cap per interface
  double close_threshold = 5.0;    // "close" when gap < threshold * spacing

  // Formulation.
  bool rescaled = true;
  double compat_tol = 1e-8;

  // Summation backend for the operator.
  SumOptions sum;
};

struct RefinementRound {
  int gmres_iterations = 0;
  double gmres_residual = 0.0;       // final relative residual
  std::vector<int> nodes;            // per-interface node count
  std::vector<double> tail;          // per-interface relative tail measure
  std::vector<char> refined;         // per-interface: refined after round?
};

struct DensitySolution {
  const RegionTree* tree = nullptr;
  std::vector<InterfaceGrid> grids;
  IndexMap map;
  bool rescaled = true;

  Eigen::VectorXd phi;    // solver unknowns on the final grids
  Eigen::VectorXd gamma;  // physical layer densities (gamma = scale * phi)

  std::vector<double> charges;  // per-interface net charge of gamma
  double rhs_norm = 0.0;
  std::vector<RefinementRound> rounds;
  bool resolved = false;   // spectral tails met the target
  bool converged = false;  // final GMRES converged

  int total_nodes() const { return map.total(); }
};

// Interpolates a flattened solution vector from one set of grids onto
// another with the same interfaces: trigonometric interpolation on uniform
// grids, per-panel polynomial interpolation on paneled grids.  Grids that
// are unchanged are copied verbatim.
Eigen::VectorXd warm_start_interpolate(
    const std::vector<InterfaceGrid>& old_grids, const Eigen::VectorXd& old_x,
    const std::vector<InterfaceGrid>& new_grids);

// Solves the transmission problem on the given geometry with outer Neumann
// data b[0] and zero data on interior interfaces unless supplied.  Runs the
// refine/re-solve loop until every interface density is spectrally resolved
// or max_rounds is exhausted.
DensitySolution solve_adaptive(const RegionTree& tree,
                               const std::vector<BoundaryFn>& data,
                               const SolveSettings& settings);

}  // namespace bie2d
