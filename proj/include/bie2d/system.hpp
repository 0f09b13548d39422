#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bie2d/geometry.hpp"
#include "bie2d/quadrature.hpp"
#include "bie2d/summation.hpp"

namespace bie2d {

// Flat indexing of per-node values across all interfaces.
struct IndexMap {
  std::vector<int> offset;  // offset[i] = first flat index of interface i;
                            // offset.back() = total size

  int total() const { return offset.empty() ? 0 : offset.back(); }
  int count(int i) const { return offset[i + 1] - offset[i]; }
  int flat(int i, int m) const { return offset[i] + m; }
};

IndexMap make_index_map(const std::vector<InterfaceGrid>& grids);

// Boundary data sampled in the curve parameter; an empty function means
// "identically zero" on that interface.
using BoundaryFn = std::function<double(double q)>;

// Discretization of the second-kind boundary integral system for a
// piecewise-constant conductivity field.  Over each interface the potential
// is a single layer with density gamma_i; matching Neumann data on the outer
// boundary and flux jumps across inner interfaces yields, in operator form,
//
//   D_i x_i + R_i ( sum_j S_j Int K(.,y) x_j dl_y  -  [i == root] C_root ) = rhs_i
//
// where K is the normal-derivative kernel and C_root is the weighted charge
// of the root density (the rank-one term that removes the solvability
// degeneracy of the outer Neumann problem).  Two supported scalings:
//
// Every equation carries its natural normalization: the outer row is divided
// by sigma_root and each inner row by (sigma_parent - sigma_i), so R_i = 1,
// D_root = -1/2, and rhs_root = b_1/sigma_root, rhs_i = b_i/(sigma_parent -
// sigma_i).  Two supported scalings of the unknowns:
//
//  - rescaled (default): unknowns are phi_i = gamma_i / alpha_i with
//    alpha_i = 1 - sigma_parent/sigma_i (alpha_root = 1); S_j = alpha_j and
//    D_i = alpha_i (sigma_parent + sigma_i) / (2 (sigma_parent - sigma_i))
//          = -(sigma_parent + sigma_i) / (2 sigma_i),
//    which keeps all matrix entries uniformly bounded in the conductivity
//    contrast.
//  - unrescaled: unknowns are gamma directly; S_j = 1 and
//    D_i = (sigma_parent + sigma_i) / (2 (sigma_parent - sigma_i)), which
//    blows up as neighboring conductivities approach each other -- the
//    conditioning defect the rescaling removes.
//
// The two scalings solve column-equivalent systems (gamma_i = alpha_i phi_i
// node by node), so the physical densities agree to solver tolerance.
struct SystemContext {
  SystemContext(const RegionTree& tree, std::vector<InterfaceGrid> grids,
                bool rescaled, SumOptions sum_opts = {});

  const RegionTree* tree;
  std::vector<InterfaceGrid> grids;
  bool rescaled;
  SumOptions sum_opts;
  IndexMap map;

  std::vector<double> alpha;      // per-interface source scale S_j
  std::vector<double> row_coef;   // R_i
  std::vector<double> diag_coef;  // D_i
  std::vector<double> rhs_scale;  // rhs_i = b_i / rhs_scale[i]

  // Flattened node data (summation layout).
  std::vector<Vec2> points, normals;
  std::vector<double> weights, curvatures;

  int size() const { return map.total(); }
  // Multiply solver unknowns by this to get the physical density gamma_i.
  double gamma_scale(int i) const { return rescaled ? alpha[i] : 1.0; }
};

// Matrix-free application of the system operator.  Safe to call concurrently
// on the same context.
Eigen::VectorXd apply_system(const SystemContext& ctx,
                             const Eigen::VectorXd& x);

// Samples the boundary data at the grid nodes and applies the row scaling.
// Throws CompatibilityViolation if any supplied b_i carries net flux:
// |integral of b_i dl| > compat_tol * ||b_i||_L2.
Eigen::VectorXd assemble_rhs(const SystemContext& ctx,
                             const std::vector<BoundaryFn>& b,
                             double compat_tol = 1e-8);

}  // namespace bie2d
