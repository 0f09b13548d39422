// Command-line driver: solve transmission problems from a JSON config,
// evaluate fields, and run the refinement / rescaling studies.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "bie2d/config.hpp"
#include "bie2d/errors.hpp"
#include "bie2d/evaluate.hpp"
#include "bie2d/reference.hpp"
#include "bie2d/report.hpp"
#include "bie2d/studies.hpp"

namespace {

using namespace bie2d;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct GlobalFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::string backend;  // "", "direct", "fmm"
  double fmm_eps = -1.0;
  int threads = 0;
  unsigned seed = 12345;
};

void apply_overrides(ProblemConfig& cfg, const GlobalFlags& g) {
  if (g.backend == "direct") cfg.solve.sum.backend = Backend::Direct;
  if (g.backend == "fmm") cfg.solve.sum.backend = Backend::Fmm;
  if (g.fmm_eps > 0) cfg.solve.sum.fmm_eps = g.fmm_eps;
  if (g.threads > 0) cfg.solve.sum.threads = g.threads;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw BadConfig("cannot open output file '" + (dir / name).string() + "'");
  return os;
}

// Closed-form reference potential, when one is configured.
std::function<double(const Vec2&)> make_reference(const ReferenceSpec& r) {
  if (!r.present) return {};
  const ConcentricSolution conc(r.m, r.sigma, r.alpha);
  if (r.type == "concentric") {
    return [conc](const Vec2& p) {
      return conc.u(p.norm(), std::atan2(p.y(), p.x()));
    };
  }
  const double alpha = r.alpha;
  return [conc, alpha](const Vec2& p) {
    const std::complex<double> w = mobius(alpha, {p.x(), p.y()});
    return conc.u(std::abs(w), std::arg(w));
  };
}

nlohmann::json reference_errors_json(const ProblemConfig& cfg,
                                     const DensitySolution& sol,
                                     std::span<const FieldSample> samples) {
  const auto ref = make_reference(cfg.reference);
  if (!ref) return {};
  const Vec2 anchor = cfg.has_reference_point ? cfg.reference_point
                                              : interior_anchor(*sol.tree);
  EvalOptions opts;
  opts.sum = cfg.solve.sum;
  const Vec2 pts[1] = {anchor};
  const double shift = eval_close(sol, pts, opts)[0].u - ref(anchor);

  double max_far = 0.0, max_close = 0.0;
  int n_far = 0, n_close = 0;
  for (const FieldSample& s : samples) {
    if (s.method == EvalMethod::Outside) continue;
    const double err = std::abs(s.u - shift - ref(s.point));
    if (s.method == EvalMethod::Close) {
      max_close = std::max(max_close, err);
      ++n_close;
    } else {
      max_far = std::max(max_far, err);
      ++n_far;
    }
  }
  nlohmann::json j;
  j["anchor"] = {anchor.x(), anchor.y()};
  j["max_error_far"] = max_far;
  j["max_error_close"] = max_close;
  j["points_far"] = n_far;
  j["points_close"] = n_close;
  return j;
}

int run_solve(const GlobalFlags& g, bool with_eval) {
  ProblemConfig cfg = load_config(g.config_path);
  apply_overrides(cfg, g);

  PhaseTimings timings;
  auto t0 = Clock::now();
  const RegionTree tree = build_tree(cfg);
  const std::vector<BoundaryFn> data = build_boundary_data(cfg);
  timings.build_s = seconds_since(t0);

  t0 = Clock::now();
  const DensitySolution sol = solve_adaptive(tree, data, cfg.solve);
  timings.solve_s = seconds_since(t0);

  {
    std::ofstream os = open_out(g.out_dir, cfg.output.densities);
    write_densities_csv(os, sol);
  }

  std::vector<FieldSample> samples;
  if (with_eval && cfg.evaluation.any()) {
    t0 = Clock::now();
    const std::vector<Vec2> points = build_eval_points(cfg.evaluation);
    EvalOptions eopts;
    eopts.close_threshold = cfg.solve.close_threshold > 0
                                ? cfg.solve.close_threshold
                                : 5.0;
    eopts.sum = cfg.solve.sum;
    samples = eval_close(sol, points, eopts);
    timings.eval_s = seconds_since(t0);
    std::ofstream os = open_out(g.out_dir, cfg.output.field);
    write_field_csv(os, samples);
  }

  nlohmann::json ref_errors = reference_errors_json(cfg, sol, samples);
  {
    std::ofstream os = open_out(g.out_dir, cfg.output.report);
    os << report_json(sol, timings, ref_errors.is_null() ? nullptr : &ref_errors)
              .dump(2)
       << '\n';
  }

  const double charge_bound =
      10.0 * cfg.solve.gmres_tol * std::max(sol.rhs_norm, 1e-300);
  bool charges_ok = true;
  for (double c : sol.charges) charges_ok = charges_ok && std::abs(c) <= charge_bound;

  std::printf("interfaces=%d total_nodes=%d rounds=%zu resolved=%s converged=%s charges_ok=%s\n",
              tree.size(), sol.total_nodes(), sol.rounds.size(),
              sol.resolved ? "yes" : "no", sol.converged ? "yes" : "no",
              charges_ok ? "yes" : "no");
  if (!sol.resolved || !sol.converged || !charges_ok) {
    std::fprintf(stderr, "solve finished outside tolerances\n");
    return 3;
  }
  return 0;
}

int run_refine_study(const GlobalFlags& g, const std::string& ladder_arg) {
  ProblemConfig cfg = load_config(g.config_path);
  apply_overrides(cfg, g);

  std::vector<int> ladder;
  if (ladder_arg.empty()) {
    for (int M = 16; M <= 1024; M *= 2) ladder.push_back(M);
  } else {
    std::stringstream ss(ladder_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) ladder.push_back(std::stoi(tok));
  }

  const RegionTree tree = build_tree(cfg);
  const std::vector<BoundaryFn> data = build_boundary_data(cfg);
  const Vec2 x0 = tree.curves[static_cast<size_t>(tree.root)].position(0.0);
  const std::vector<RefineRow> rows =
      refinement_study(tree, data, cfg.solve, ladder, x0);

  std::ofstream os = open_out(g.out_dir, "refine_study.csv");
  os << "M,u_value,u_diff,gamma_diff\n";
  for (const RefineRow& r : rows) {
    os << r.M << ',';
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g", r.u_value);
    os << buf;
    if (r.has_diff) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", r.u_diff, r.gamma_diff);
      os << buf;
    } else {
      os << ",,";
    }
    os << '\n';
  }
  for (const RefineRow& r : rows)
    if (r.has_diff)
      std::printf("M=%5d  |u_M - u_2M| = %.3e  max|gamma_M - gamma_2M| = %.3e\n",
                  r.M, r.u_diff, r.gamma_diff);
  return 0;
}

int run_rescale_study(const GlobalFlags& g, const std::string& sigmas_arg,
                      const std::string& grids_arg) {
  ProblemConfig cfg = load_config(g.config_path);
  apply_overrides(cfg, g);

  std::vector<double> sweep;
  {
    std::stringstream ss(sigmas_arg.empty() ? "1.001,1.01,1.1,2,10"
                                            : sigmas_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) sweep.push_back(std::stod(tok));
  }
  std::vector<int> grids;
  {
    std::stringstream ss(grids_arg.empty() ? "32,256" : grids_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) grids.push_back(std::stoi(tok));
  }
  if (sweep.empty()) {
    std::ofstream os = open_out(g.out_dir, "rescale_study.csv");
    os << "sigma,M,iters_rescaled,iters_unrescaled\n";
    return 0;
  }

  const BoundaryFn outer = make_boundary_fn(
      cfg.data.empty() ? DataSpec{"windowed_cosine", 3, 0.4, {}, {}}
                       : cfg.data[0].type == "zero"
                           ? DataSpec{"windowed_cosine", 3, 0.4, {}, {}}
                           : cfg.data[0]);
  const std::vector<RescaleRow> rows =
      rescaling_study(cfg.curves, sweep, grids, outer, cfg.solve);

  std::ofstream os = open_out(g.out_dir, "rescale_study.csv");
  os << "sigma,M,iters_rescaled,iters_unrescaled\n";
  for (const RescaleRow& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%d\n", r.sigma, r.M,
                  r.iters_rescaled, r.iters_unrescaled);
    os << buf;
  }
  bool ok = true;
  for (const RescaleRow& r : rows) {
    std::printf("sigma=%-8g M=%-4d rescaled=%-4d unrescaled=%-4d\n", r.sigma,
                r.M, r.iters_rescaled, r.iters_unrescaled);
    ok = ok && r.iters_rescaled <= r.iters_unrescaled;
  }
  std::printf("rescaled <= unrescaled for all rows: %s\n", ok ? "yes" : "no");
  return 0;
}

int run_selftest(const GlobalFlags& g) {
  // Concentric two-circle problem with the sine-mode datum: the inner
  // density has a closed form, which the whole pipeline must reproduce.
  const int m = 3;
  const double sigma = 2.0, alpha = 0.4;
  std::vector<Curve> curves;
  curves.push_back(Curve::circle({0, 0}, 1.0));
  curves.push_back(Curve::circle({0, 0}, alpha));
  const RegionTree tree = build_region_tree(curves, {1.0, sigma});

  std::vector<BoundaryFn> data(2);
  data[0] = [m](double q) { return std::sin(2.0 * std::numbers::pi * m * q); };

  SolveSettings settings;
  settings.initial_uniform_nodes = 64;
  settings.sum.threads = g.threads > 0 ? g.threads : 1;
  if (g.backend == "fmm") settings.sum.backend = Backend::Fmm;
  const DensitySolution sol = solve_adaptive(tree, data, settings);

  double worst = 0.0;
  const InterfaceGrid& inner = sol.grids[1];
  for (int k = 0; k < inner.size(); ++k) {
    const double theta =
        2.0 * std::numbers::pi * inner.q[static_cast<size_t>(k)];
    worst = std::max(worst,
                     std::abs(sol.gamma(sol.map.offset[1] + k) -
                              exact_inner_density(m, sigma, alpha, theta)));
  }
  std::printf("selftest: max inner-density error = %.3e (seed %u)\n", worst,
              g.seed);
  const bool pass = worst <= 1e-8 && sol.resolved && sol.converged;
  std::printf("selftest: %s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-integral solver for piecewise-constant conductivity"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--backend", g.backend, "Summation backend")
      ->check(CLI::IsMember({"direct", "fmm"}));
  app.add_option("--fmm-eps", g.fmm_eps, "FMM target accuracy");
  app.add_option("--threads", g.threads, "Worker threads (1 = reproducible)");
  app.add_option("--seed", g.seed, "Seed for randomized checks");

  CLI::App* solve = app.add_subcommand("solve", "Solve and write densities");
  CLI::App* eval = app.add_subcommand("eval", "Solve, then evaluate the field");
  CLI::App* refine =
      app.add_subcommand("refine-study", "Grid refinement ladder");
  CLI::App* rescale =
      app.add_subcommand("rescale-study", "Rescaled vs unrescaled iterations");
  CLI::App* selftest = app.add_subcommand("selftest", "Built-in sanity check");

  std::string ladder_arg, sigmas_arg, grids_arg;
  for (CLI::App* sub : {solve, eval, refine, rescale}) {
    sub->add_option("--config", g.config_path, "Problem config (JSON)")
        ->required();
    sub->add_option("--out", g.out_dir, "Output directory");
  }
  refine->add_option("--ladder", ladder_arg, "Comma-separated M values");
  rescale->add_option("--sigmas", sigmas_arg, "Comma-separated sweep values");
  rescale->add_option("--grids", grids_arg, "Comma-separated node counts");
  selftest->add_option("--out", g.out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(g, /*with_eval=*/false);
    if (eval->parsed()) return run_solve(g, /*with_eval=*/true);
    if (refine->parsed()) return run_refine_study(g, ladder_arg);
    if (rescale->parsed()) return run_rescale_study(g, sigmas_arg, grids_arg);
    if (selftest->parsed()) return run_selftest(g);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
