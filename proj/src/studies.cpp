#include "bie2d/studies.hpp"

#include <algorithm>
#include <cmath>

#include "bie2d/errors.hpp"
#include "bie2d/evaluate.hpp"
#include "bie2d/interpolation.hpp"
#include "bie2d/log.hpp"

namespace bie2d {

std::vector<RefineRow> refinement_study(const RegionTree& tree,
                                        const std::vector<BoundaryFn>& data,
                                        SolveSettings base,
                                        const std::vector<int>& ladder,
                                        const Vec2& x0) {
  if (ladder.empty())
    throw BadConfig("refinement study: ladder must not be empty");
  for (size_t k = 0; k + 1 < ladder.size(); ++k)
    if (ladder[k + 1] <= ladder[k])
      throw BadConfig("refinement study: ladder must be strictly increasing");

  base.max_rounds = 1;        // fixed grids, no adaptivity
  base.close_threshold = 0.0; // force the uniform scheme everywhere

  std::vector<DensitySolution> solutions;
  std::vector<double> u_probe;
  solutions.reserve(ladder.size());
  for (int M : ladder) {
    if (M < 4) throw BadConfig("refinement study: M must be >= 4");
    SolveSettings s = base;
    s.initial_uniform_nodes = M;
    solutions.push_back(solve_adaptive(tree, data, s));
    const Vec2 pts[1] = {x0};
    EvalOptions eopts;
    eopts.sum = base.sum;
    u_probe.push_back(eval_close(solutions.back(), pts, eopts)[0].u);
  }

  std::vector<RefineRow> rows;
  rows.reserve(ladder.size());
  for (size_t k = 0; k < ladder.size(); ++k) {
    RefineRow row;
    row.M = ladder[k];
    row.u_value = u_probe[k];
    if (k + 1 < ladder.size()) {
      row.has_diff = true;
      row.u_diff = std::abs(u_probe[k] - u_probe[k + 1]);
      const DensitySolution& coarse = solutions[k];
      const DensitySolution& fine = solutions[k + 1];
      double worst = 0.0;
      for (size_t i = 0; i < coarse.grids.size(); ++i) {
        const InterfaceGrid& gc = coarse.grids[i];
        const InterfaceGrid& gf = fine.grids[i];
        std::vector<double> gamma_f(static_cast<size_t>(gf.size()));
        for (int m = 0; m < gf.size(); ++m)
          gamma_f[static_cast<size_t>(m)] =
              fine.gamma(fine.map.offset[i] + m);
        for (int m = 0; m < gc.size(); ++m) {
          const double interp =
              trig_interpolate(gamma_f, gf.shift, gc.q[static_cast<size_t>(m)]);
          worst = std::max(worst,
                           std::abs(coarse.gamma(coarse.map.offset[i] + m) -
                                    interp));
        }
      }
      row.gamma_diff = worst;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<RescaleRow> rescaling_study(const std::vector<Curve>& curves,
                                        const std::vector<double>& sweep,
                                        const std::vector<int>& grid_sizes,
                                        const BoundaryFn& outer_data,
                                        SolveSettings base) {
  for (double sigma : sweep)
    if (sigma == 1.0)
      throw BadSigma("rescaling study: sigma = 1 is a degenerate interface");

  // Nesting depth of each curve, from a probe tree with distinct sigmas.
  std::vector<double> probe_sigma(curves.size());
  for (size_t i = 0; i < curves.size(); ++i)
    probe_sigma[i] = static_cast<double>(i + 2);
  const RegionTree probe = build_region_tree(curves, probe_sigma);
  std::vector<int> depth(curves.size(), 0);
  for (size_t i = 0; i < curves.size(); ++i) {
    int d = 0;
    for (int p = probe.parent[i]; p >= 0; p = probe.parent[static_cast<size_t>(p)])
      ++d;
    depth[i] = d;
  }

  base.max_rounds = 1;
  base.close_threshold = 0.0;  // uniform grids, sizes fixed per row

  std::vector<RescaleRow> rows;
  for (double sigma : sweep) {
    std::vector<double> sig(curves.size());
    for (size_t i = 0; i < curves.size(); ++i)
      sig[i] = (depth[i] % 2 == 0) ? 1.0 : sigma;
    const RegionTree tree = build_region_tree(curves, sig);

    std::vector<BoundaryFn> data(curves.size());
    data[static_cast<size_t>(tree.root)] = outer_data;

    for (int M : grid_sizes) {
      RescaleRow row;
      row.sigma = sigma;
      row.M = M;
      for (bool rescaled : {true, false}) {
        SolveSettings s = base;
        s.initial_uniform_nodes = M;
        s.rescaled = rescaled;
        const DensitySolution sol = solve_adaptive(tree, data, s);
        if (!sol.converged)
          log_warn("rescaling study: sigma %.4g M %d %s did not converge",
                   sigma, M, rescaled ? "rescaled" : "unrescaled");
        (rescaled ? row.iters_rescaled : row.iters_unrescaled) =
            sol.rounds.front().gmres_iterations;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace bie2d
