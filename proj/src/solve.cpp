#include "bie2d/solve.hpp"

#include <algorithm>
#include <cmath>

#include "bie2d/errors.hpp"
#include "bie2d/gmres.hpp"
#include "bie2d/interpolation.hpp"
#include "bie2d/log.hpp"

namespace bie2d {

namespace {

// Mutable description of one interface discretization between rounds.
struct InterfacePlan {
  InterfaceGrid::Scheme scheme = InterfaceGrid::Scheme::Uniform;
  int uniform_nodes = 0;
  double shift = 0.5;
  std::vector<double> breaks;  // paneled: ascending left endpoints
  std::vector<int> orders;     // paneled: per-panel node count
  int node_count() const {
    if (scheme == InterfaceGrid::Scheme::Uniform) return uniform_nodes;
    int n = 0;
    for (int p : orders) n += p;
    return n;
  }
};

// Parameter value where the accumulated arc length reaches `target`.
double param_at_arclength(const Curve& curve, double target) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (curve.arclength(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

InterfacePlan initial_plan(const Curve& curve, double clearance,
                           const SolveSettings& s) {
  InterfacePlan plan;
  const double length = curve.length();
  const double coarse_spacing = length / s.initial_uniform_nodes;
  if (clearance >= s.close_threshold * coarse_spacing) {
    plan.scheme = InterfaceGrid::Scheme::Uniform;
    plan.uniform_nodes = s.initial_uniform_nodes;
    plan.shift = s.grid_shift;
    return plan;
  }
  plan.scheme = InterfaceGrid::Scheme::Paneled;
  const double target_len = std::max(0.5 * clearance, 1e-12);
  int count = static_cast<int>(std::ceil(length / target_len));
  count = std::clamp(count, 4, s.max_initial_panels);
  plan.breaks.resize(static_cast<size_t>(count));
  plan.orders.assign(static_cast<size_t>(count), s.panel_nodes);
  for (int k = 0; k < count; ++k)
    plan.breaks[static_cast<size_t>(k)] =
        (k == 0) ? 0.0 : param_at_arclength(curve, length * k / count);
  return plan;
}

InterfaceGrid grid_from_plan(const Curve& curve, const InterfacePlan& plan) {
  if (plan.scheme == InterfaceGrid::Scheme::Uniform)
    return make_uniform_grid(curve, plan.uniform_nodes, plan.shift);
  return make_paneled_grid(curve, plan.breaks, plan.orders);
}

// Evaluates the interpolant of one interface block of a flattened solution
// at an arbitrary parameter value.
double eval_block(const InterfaceGrid& grid, const Eigen::VectorXd& x,
                  int offset, double q) {
  if (grid.uniform()) {
    std::vector<double> f(static_cast<size_t>(grid.size()));
    for (int m = 0; m < grid.size(); ++m)
      f[static_cast<size_t>(m)] = x(offset + m);
    return trig_interpolate(f, grid.shift, q);
  }
  const double base = grid.panels.front().a;
  const double u = base + std::fmod(q - base + 8.0, 1.0);
  for (const Panel& p : grid.panels) {
    if (u < p.a - 1e-15 || u > p.b + 1e-15) continue;
    const GaussRule& rule = gauss_legendre(p.order);
    std::vector<double> nodes(static_cast<size_t>(p.order));
    std::vector<double> vals(static_cast<size_t>(p.order));
    for (int j = 0; j < p.order; ++j) {
      nodes[static_cast<size_t>(j)] =
          p.a + 0.5 * (rule.x[static_cast<size_t>(j)] + 1.0) * (p.b - p.a);
      vals[static_cast<size_t>(j)] = x(offset + p.offset + j);
    }
    BarycentricLagrange interp(nodes);
    return interp.eval(vals, u);
  }
  throw OutOfRange("interface interpolation: parameter not in any panel");
}

}  // namespace

Eigen::VectorXd warm_start_interpolate(
    const std::vector<InterfaceGrid>& old_grids, const Eigen::VectorXd& old_x,
    const std::vector<InterfaceGrid>& new_grids) {
  if (old_grids.size() != new_grids.size())
    throw IndexMismatch("warm start: interface count changed");
  const IndexMap old_map = make_index_map(old_grids);
  const IndexMap new_map = make_index_map(new_grids);
  if (old_x.size() != old_map.total())
    throw IndexMismatch("warm start: vector does not match old grids");

  Eigen::VectorXd out(new_map.total());
  for (size_t i = 0; i < new_grids.size(); ++i) {
    const InterfaceGrid& og = old_grids[i];
    const InterfaceGrid& ng = new_grids[i];
    const int ooff = old_map.offset[i];
    const int noff = new_map.offset[i];
    const bool same = og.scheme == ng.scheme && og.size() == ng.size() &&
                      og.q == ng.q;
    if (same) {
      out.segment(noff, ng.size()) = old_x.segment(ooff, og.size());
      continue;
    }
    for (int m = 0; m < ng.size(); ++m)
      out(noff + m) = eval_block(og, old_x, ooff, ng.q[static_cast<size_t>(m)]);
  }
  return out;
}

DensitySolution solve_adaptive(const RegionTree& tree,
                               const std::vector<BoundaryFn>& data,
                               const SolveSettings& settings) {
  const int n = tree.size();
  if (static_cast<int>(data.size()) != n)
    throw IndexMismatch("solve: boundary data count does not match geometry");
  if (settings.max_rounds < 1 || settings.initial_uniform_nodes < 4)
    throw BadConfig("solve: invalid refinement settings");

  const std::vector<double> clearance = min_clearance(tree);
  std::vector<InterfacePlan> plans;
  plans.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    plans.push_back(initial_plan(tree.curves[static_cast<size_t>(i)],
                                 clearance[static_cast<size_t>(i)], settings));

  DensitySolution sol;
  sol.tree = &tree;
  sol.rescaled = settings.rescaled;

  std::vector<InterfaceGrid> prev_grids;
  Eigen::VectorXd prev_x;

  for (int round = 0; round < settings.max_rounds; ++round) {
    std::vector<InterfaceGrid> grids;
    grids.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      grids.push_back(grid_from_plan(tree.curves[static_cast<size_t>(i)],
                                     plans[static_cast<size_t>(i)]));

    SystemContext ctx(tree, grids, settings.rescaled, settings.sum);
    const Eigen::VectorXd rhs = assemble_rhs(ctx, data, settings.compat_tol);

    Eigen::VectorXd x0;
    const bool warm = round > 0;
    if (warm) x0 = warm_start_interpolate(prev_grids, prev_x, grids);

    const LinearOp apply = [&ctx](const Eigen::VectorXd& v) {
      return apply_system(ctx, v);
    };
    GmresResult gm = gmres(apply, rhs, settings.gmres_tol,
                           settings.gmres_max_iters, warm ? &x0 : nullptr,
                           settings.gmres_restart);

    // Spectral tails of the solver unknowns, interface by interface.
    double global_max = 0.0;
    std::vector<double> block_max(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      const int off = ctx.map.offset[static_cast<size_t>(i)];
      for (int m = 0; m < grids[static_cast<size_t>(i)].size(); ++m)
        block_max[static_cast<size_t>(i)] = std::max(
            block_max[static_cast<size_t>(i)], std::abs(gm.x(off + m)));
      global_max = std::max(global_max, block_max[static_cast<size_t>(i)]);
    }

    RefinementRound rec;
    rec.gmres_iterations = gm.iterations;
    rec.gmres_residual = gm.residuals.empty() ? 0.0 : gm.residuals.back();
    rec.nodes.resize(static_cast<size_t>(n));
    rec.tail.assign(static_cast<size_t>(n), 0.0);
    rec.refined.assign(static_cast<size_t>(n), 0);

    std::vector<std::vector<char>> panel_flags(static_cast<size_t>(n));
    bool any_flag = false;
    for (int i = 0; i < n; ++i) {
      const InterfaceGrid& g = grids[static_cast<size_t>(i)];
      const int off = ctx.map.offset[static_cast<size_t>(i)];
      rec.nodes[static_cast<size_t>(i)] = g.size();
      const double scale =
          std::max(block_max[static_cast<size_t>(i)], 1e-8 * global_max);
      if (scale == 0.0) continue;  // identically zero block is resolved

      if (g.uniform()) {
        std::vector<double> f(static_cast<size_t>(g.size()));
        for (int m = 0; m < g.size(); ++m)
          f[static_cast<size_t>(m)] = gm.x(off + m);
        rec.tail[static_cast<size_t>(i)] =
            fourier_tail(f, g.shift).max_abs() / scale;
      } else {
        panel_flags[static_cast<size_t>(i)].assign(g.panels.size(), 0);
        double worst = 0.0;
        for (size_t p = 0; p < g.panels.size(); ++p) {
          const Panel& pan = g.panels[p];
          std::vector<double> f(static_cast<size_t>(pan.order));
          for (int j = 0; j < pan.order; ++j)
            f[static_cast<size_t>(j)] = gm.x(off + pan.offset + j);
          const double t = legendre_tail(f).max_abs() / scale;
          worst = std::max(worst, t);
          if (t > settings.adapt_tol) panel_flags[static_cast<size_t>(i)][p] = 1;
        }
        rec.tail[static_cast<size_t>(i)] = worst;
      }
      if (rec.tail[static_cast<size_t>(i)] > settings.adapt_tol) {
        rec.refined[static_cast<size_t>(i)] = 1;
        any_flag = true;
      }
    }

    sol.rounds.push_back(rec);
    sol.grids = grids;
    sol.map = ctx.map;
    sol.phi = gm.x;
    sol.converged = gm.converged;
    sol.rhs_norm = rhs.norm();

    // Physical densities and per-interface net charges.
    sol.gamma = gm.x;
    sol.charges.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      const double gs = ctx.gamma_scale(i);
      const int off = ctx.map.offset[static_cast<size_t>(i)];
      double c = 0.0;
      for (int m = 0; m < grids[static_cast<size_t>(i)].size(); ++m) {
        sol.gamma(off + m) = gs * gm.x(off + m);
        c += grids[static_cast<size_t>(i)].weight[static_cast<size_t>(m)] *
             sol.gamma(off + m);
      }
      sol.charges[static_cast<size_t>(i)] = c;
    }

    if (!any_flag) {
      sol.resolved = true;
      break;
    }
    if (round + 1 == settings.max_rounds) {
      log_warn("solve: density not resolved after %d rounds", settings.max_rounds);
      break;
    }

    // Refine every flagged interface for the next round.
    bool progressed = false;
    for (int i = 0; i < n; ++i) {
      if (!sol.rounds.back().refined[static_cast<size_t>(i)]) continue;
      InterfacePlan& plan = plans[static_cast<size_t>(i)];
      if (plan.scheme == InterfaceGrid::Scheme::Uniform) {
        if (2 * plan.uniform_nodes > settings.max_uniform_nodes) {
          log_warn("solve: interface %d at the node cap, not refining", i);
          sol.rounds.back().refined[static_cast<size_t>(i)] = 0;
          continue;
        }
        plan.uniform_nodes *= 2;
        progressed = true;
      } else {
        if (plan.node_count() > settings.max_uniform_nodes) {
          log_warn("solve: interface %d at the node cap, not refining", i);
          sol.rounds.back().refined[static_cast<size_t>(i)] = 0;
          continue;
        }
        std::vector<double> nb;
        std::vector<int> no;
        const size_t np = plan.breaks.size();
        for (size_t p = 0; p < np; ++p) {
          const double a = plan.breaks[p];
          const double b = (p + 1 < np) ? plan.breaks[p + 1]
                                        : plan.breaks[0] + 1.0;
          const int order = plan.orders[p];
          if (!panel_flags[static_cast<size_t>(i)][p]) {
            nb.push_back(a);
            no.push_back(order);
          } else if (order < settings.max_panel_nodes) {
            nb.push_back(a);
            no.push_back(std::min(settings.max_panel_nodes,
                                  order + (order + 1) / 2));
          } else {
            for (int s = 0; s < 4; ++s) {
              nb.push_back(a + 0.25 * s * (b - a));
              no.push_back(settings.panel_nodes);
            }
          }
        }
        plan.breaks = std::move(nb);
        plan.orders = std::move(no);
        progressed = true;
      }
    }
    if (!progressed) {
      log_warn("solve: all flagged interfaces capped, stopping refinement");
      break;
    }
    prev_grids = std::move(sol.grids);
    sol.grids.clear();
    prev_x = gm.x;
  }

  // With a well-posed formulation each interface carries zero net charge up
  // to the linear-solve tolerance; surface a violation loudly.
  const double charge_bound = 10.0 * settings.gmres_tol * sol.rhs_norm;
  for (int i = 0; i < n; ++i)
    if (std::abs(sol.charges[static_cast<size_t>(i)]) >
        std::max(charge_bound, 1e-300))
      log_warn("solve: interface %d net charge %.3e exceeds %.3e", i,
               sol.charges[static_cast<size_t>(i)], charge_bound);

  if (sol.grids.empty()) throw BadConfig("solve: no rounds executed");
  return sol;
}

}  // namespace bie2d
