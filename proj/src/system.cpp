#include "bie2d/system.hpp"

#include <cmath>

#include "bie2d/kernels.hpp"

namespace bie2d {

IndexMap make_index_map(const std::vector<InterfaceGrid>& grids) {
  IndexMap map;
  map.offset.resize(grids.size() + 1);
  map.offset[0] = 0;
  for (size_t i = 0; i < grids.size(); ++i)
    map.offset[i + 1] = map.offset[i] + grids[i].size();
  return map;
}

SystemContext::SystemContext(const RegionTree& tree_in,
                             std::vector<InterfaceGrid> grids_in, bool rescaled_in,
                             SumOptions sum_in)
    : tree(&tree_in),
      grids(std::move(grids_in)),
      rescaled(rescaled_in),
      sum_opts(sum_in) {
  int n = tree->size();
  if (static_cast<int>(grids.size()) != n)
    throw IndexMismatch("need one grid per interface");

  map.offset.resize(n + 1);
  map.offset[0] = 0;
  for (int i = 0; i < n; ++i) map.offset[i + 1] = map.offset[i] + grids[i].size();

  alpha.resize(n);
  row_coef.resize(n);
  diag_coef.resize(n);
  rhs_scale.resize(n);
  for (int i = 0; i < n; ++i) {
    double si = tree->sigma[i];
    row_coef[i] = 1.0;
    if (i == tree->root) {
      alpha[i] = 1.0;
      diag_coef[i] = -0.5;
      rhs_scale[i] = si;
      continue;
    }
    double sp = tree->sigma_outside(i);
    if (rescaled) {
      // Reduced forms: (si - sp) / si and -0.5 (sp + si) / si keep full
      // relative accuracy when sp and si are nearly equal, where the
      // textbook 0.5 alpha (sp + si) / (sp - si) cancels catastrophically.
      alpha[i] = (si - sp) / si;
      diag_coef[i] = -0.5 * (sp + si) / si;
    } else {
      alpha[i] = 1.0;
      diag_coef[i] = 0.5 * (sp + si) / (sp - si);
    }
    rhs_scale[i] = sp - si;
  }

  int total = map.total();
  points.reserve(total);
  normals.reserve(total);
  weights.reserve(total);
  curvatures.reserve(total);
  for (int i = 0; i < n; ++i) {
    const InterfaceGrid& g = grids[i];
    for (int m = 0; m < g.size(); ++m) {
      points.push_back(g.point[m]);
      normals.push_back(g.normal[m]);
      weights.push_back(g.weight[m]);
      curvatures.push_back(g.curvature[m]);
    }
  }
}

Eigen::VectorXd apply_system(const SystemContext& ctx,
                             const Eigen::VectorXd& x) {
  int total = ctx.size();
  if (x.size() != total) throw IndexMismatch("vector does not match grid");
  int n = ctx.tree->size();

  // Source charges alpha_j w_jn x_jn feed one global kernel sum.
  std::vector<double> charges(total);
  for (int i = 0; i < n; ++i) {
    for (int m = ctx.map.offset[i]; m < ctx.map.offset[i + 1]; ++m)
      charges[m] = ctx.alpha[i] * ctx.weights[m] * x[m];
  }

  SumProblem problem;
  problem.sources = ctx.points;
  problem.charges = charges;
  problem.targets = ctx.points;
  problem.target_normals = ctx.normals;
  std::vector<double> S =
      layer_potential_sum(problem, SumKernel::NormalDerivative, ctx.sum_opts);

  // Charge of the root density (its own weighted integral), subtracted from
  // every root row to fix the additive constant of the exterior problem.
  int root = ctx.tree->root;
  double c_root = 0;
  for (int m = ctx.map.offset[root]; m < ctx.map.offset[root + 1]; ++m)
    c_root += charges[m];

  Eigen::VectorXd out(total);
  for (int i = 0; i < n; ++i) {
    double correction = (i == root) ? c_root : 0.0;
    for (int m = ctx.map.offset[i]; m < ctx.map.offset[i + 1]; ++m) {
      // The summation skipped the coincident self pair; supply the smooth
      // diagonal limit K(x,x) = kappa/(4 pi) with this node's weight.
      double self = ctx.weights[m] * ctx.alpha[i] *
                    normal_derivative_kernel_diag(ctx.curvatures[m]) * x[m];
      out[m] = ctx.diag_coef[i] * x[m] +
               ctx.row_coef[i] * (S[m] + self - correction);
    }
  }
  return out;
}

Eigen::VectorXd assemble_rhs(const SystemContext& ctx,
                             const std::vector<BoundaryFn>& b,
                             double compat_tol) {
  int n = ctx.tree->size();
  if (static_cast<int>(b.size()) != n)
    throw IndexMismatch("need boundary data per interface (may be empty)");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ctx.size());
  for (int i = 0; i < n; ++i) {
    if (!b[i]) continue;
    const InterfaceGrid& g = ctx.grids[i];
    double integral = 0, norm2 = 0;
    for (int m = 0; m < g.size(); ++m) {
      double v = b[i](g.q[m]);
      integral += g.weight[m] * v;
      norm2 += g.weight[m] * v * v;
      rhs[ctx.map.flat(i, m)] = v / ctx.rhs_scale[i];
    }
    double norm = std::sqrt(norm2);
    if (norm > 0 && std::abs(integral) > compat_tol * norm)
      throw CompatibilityViolation(
          "boundary data on interface " + std::to_string(i + 1) +
          " carries net flux " + std::to_string(integral));
  }
  return rhs;
}

}  // namespace bie2d
