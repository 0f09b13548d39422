// Acceptance suite: one self-contained check per shipped guarantee, each
// printing a single [PASS]/[FAIL] line with the measured number and the
// pinned bound.  Exit status is the number of failed checks.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bie2d/config.hpp"
#include "bie2d/evaluate.hpp"
#include "bie2d/interpolation.hpp"
#include "bie2d/kernels.hpp"
#include "bie2d/quadrature.hpp"
#include "bie2d/reference.hpp"
#include "bie2d/studies.hpp"

using namespace bie2d;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Pinned bounds.
constexpr double kInnerDensityTol = 1e-8;   // criterion 1
constexpr double kInnerDensityMaxSecs = 2.0;
constexpr double kLadderFactor = 100.0;     // criterion 2
constexpr double kLadderFloor = 1e-10;
constexpr double kCloseEvalTol = 1e-3;      // criterion 3
constexpr double kFarFieldTol = 1e-6;       // criterion 4
constexpr double kBoundaryTol = 1e-3;
constexpr double kChargeFactor = 10.0;      // criterion 5
constexpr double kIdentityTol = 1e-10;      // criterion 6
constexpr double kBackendTol = 1e-9;        // criterion 8
constexpr double kTrigTol = 1e-13;          // criterion 9
constexpr double kLagrangeTol = 1e-12;
constexpr double kSegmentTol = 1e-10;

int g_failed = 0;

void report(int index, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", index,
              name.c_str(), detail.c_str());
  if (!pass) ++g_failed;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

RegionTree concentric_tree() {
  return build_region_tree(
      {Curve::circle({0.0, 0.0}, 1.0), Curve::circle({0.0, 0.0}, 0.4)},
      {1.0, 2.0});
}

std::vector<BoundaryFn> sine3_data() {
  std::vector<BoundaryFn> d(2);
  d[0] = [](double q) { return std::sin(3.0 * kTwoPi * q); };
  return d;
}

std::vector<Curve> forest_curves() {
  std::vector<Curve> cs;
  cs.push_back(Curve::circle({0.0, 0.0}, 1.0));
  cs.push_back(Curve::ellipse({-0.45, 0.25}, 0.42, 0.30, 0.5));
  cs.push_back(Curve::ellipse({-0.45, 0.25}, 0.26, 0.18, 0.5));
  cs.push_back(Curve::ellipse({-0.45, 0.25}, 0.14, 0.09, 0.5));
  cs.push_back(Curve::ellipse({0.45, -0.30}, 0.35, 0.22, -0.7));
  cs.push_back(Curve::ellipse({0.45, -0.30}, 0.20, 0.11, -0.7));
  cs.push_back(Curve::ellipse({0.20, 0.55}, 0.22, 0.13, 0.2));
  cs.push_back(Curve::ellipse({-0.10, -0.55}, 0.30, 0.16, 1.1));
  return cs;
}

double max_inner_density_error(const DensitySolution& sol) {
  double worst = 0.0;
  const InterfaceGrid& g = sol.grids[1];
  for (int m = 0; m < g.size(); ++m) {
    const double theta = kTwoPi * g.q[static_cast<size_t>(m)];
    const double want = exact_inner_density(3, 2.0, 0.4, theta);
    worst = std::max(worst,
                     std::abs(sol.gamma(sol.map.offset[1] + m) - want));
  }
  return worst;
}

// --- criterion 1: closed-form inner density at a fixed resolved grid ---
DensitySolution criterion_inner_density() {
  const RegionTree tree = concentric_tree();
  SolveSettings s;
  s.initial_uniform_nodes = 256;
  s.max_rounds = 1;
  s.close_threshold = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  DensitySolution sol = solve_adaptive(tree, sine3_data(), s);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const double err = max_inner_density_error(sol);
  report(1, "inner-density closed form at M=256",
         err <= kInnerDensityTol && secs <= kInnerDensityMaxSecs &&
             sol.converged,
         "max err " + num(err) + " <= " + num(kInnerDensityTol) + ", solve " +
             num(secs) + " s <= " + num(kInnerDensityMaxSecs) + " s");
  return sol;
}

// --- criterion 2: spectral collapse of the density error ---
void criterion_spectral_ladder() {
  const RegionTree tree = concentric_tree();
  const auto data = sine3_data();
  const std::vector<int> ladder = {16, 32, 64, 128};
  std::vector<double> err;
  for (int M : ladder) {
    SolveSettings s;
    s.initial_uniform_nodes = M;
    s.max_rounds = 1;
    s.close_threshold = 0.0;
    s.gmres_tol = 1e-13;  // keep the linear-algebra floor below the target
    err.push_back(max_inner_density_error(solve_adaptive(tree, data, s)));
  }
  bool pass = true;
  std::string detail;
  for (size_t k = 0; k + 1 < err.size(); ++k) {
    const bool at_floor = err[k] <= kLadderFloor;
    const bool reduced =
        err[k + 1] <= std::max(err[k] / kLadderFactor, kLadderFloor);
    if (!at_floor && !reduced) pass = false;
    detail += num(err[k]) + " -> ";
  }
  detail += num(err.back());
  report(2, "density error drops 100x per doubling until the 1e-10 floor",
         pass, detail);
}

// --- criterion 3: close evaluation up to the outer boundary ---
void criterion_close_evaluation() {
  bool pass = true;
  std::string detail;
  for (double shift : {0.5, 0.0}) {
    const RegionTree tree = concentric_tree();
    SolveSettings s;
    s.initial_uniform_nodes = 256;
    s.max_rounds = 1;
    s.close_threshold = 0.0;
    s.grid_shift = shift;  // node-aligned (0.0) and mid-node (0.5) rotations
    const DensitySolution sol = solve_adaptive(tree, sine3_data(), s);
    const ConcentricSolution ref(3, 2.0, 0.4);

    const Vec2 anchor(0.7, 0.0);
    const Vec2 apts[1] = {anchor};
    const double cshift = eval_close(sol, apts, {})[0].u - ref.u(0.7, 0.0);

    std::vector<double> xh = {0.0};
    for (int k = 0; k < 50; ++k) {
      const double t = k / 49.0;
      xh.push_back(
          std::exp(std::log(1e-6) + t * (std::log(0.1) - std::log(1e-6))));
    }
    std::vector<Vec2> pts;
    for (double x : xh)
      pts.emplace_back(0.0, 1.0 - x);  // along theta = pi/2
    const auto cl = eval_close(sol, pts, {});
    const auto nv = eval_naive(sol, pts, {});
    double worst_close = 0.0, worst_naive = 0.0;
    const double h = kTwoPi / 256.0;
    for (size_t k = 0; k < pts.size(); ++k) {
      const double want = ref.u(1.0 - xh[k], kPi / 2.0);
      worst_close = std::max(worst_close, std::abs(cl[k].u - cshift - want));
      if (xh[k] < 5.0 * h)
        worst_naive = std::max(worst_naive, std::abs(nv[k].u - cshift - want));
    }
    // The swapped-segment evaluation must hold the bound everywhere,
    // including on the boundary itself; plain quadrature must break it
    // inside the close zone (otherwise the dispatch is untested).
    if (worst_close > kCloseEvalTol || worst_naive <= kCloseEvalTol)
      pass = false;
    detail += (shift == 0.5 ? std::string("mid-node ") : "node-aligned ") +
              num(worst_close) + " (naive " + num(worst_naive) + "); ";
  }
  report(3, "close evaluation error <= 1e-3 up to the boundary", pass,
         detail + "bound " + num(kCloseEvalTol));
}

// --- criterion 4: eccentric interface vs conformal-map reference ---
DensitySolution criterion_conformal_crosscheck() {
  const double alpha = 0.4;
  const double a = a_from_alpha(alpha);
  const RegionTree tree = build_region_tree(
      {Curve::circle({0.0, 0.0}, 1.0),
       Curve::circle({a / 2.0, 0.0}, a / 2.0)},
      {1.0, 2.0});
  std::vector<BoundaryFn> data(2);
  data[0] = [alpha](double q) {
    return nonconcentric_b1(3, alpha, kTwoPi * q);
  };
  SolveSettings s;
  DensitySolution sol = solve_adaptive(tree, data, s);

  const ConcentricSolution conc(3, 2.0, alpha);
  auto uref = [&](const Vec2& p) {
    const std::complex<double> w = mobius(alpha, {p.x(), p.y()});
    return conc.u(std::abs(w), std::arg(w));
  };
  const Vec2 anchor(-0.5, 0.0);
  const Vec2 apts[1] = {anchor};
  const double cshift = eval_close(sol, apts, {})[0].u - uref(anchor);

  // 100 interior points kept clear of both interfaces; every one must take
  // the plain-quadrature path, which certifies the clearance in units of the
  // local node spacing.
  std::vector<Vec2> far;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  while (far.size() < 100) {
    const Vec2 p(ur(rng), ur(rng));
    const double d_out = 1.0 - p.norm();
    const double d_in = std::abs((p - Vec2(a / 2.0, 0.0)).norm() - a / 2.0);
    if (d_out > 0.12 && d_in > 0.12) far.push_back(p);
  }
  const auto fs = eval_close(sol, far, {});
  double worst_far = 0.0;
  bool all_far_plain = true;
  for (size_t k = 0; k < far.size(); ++k) {
    worst_far = std::max(worst_far, std::abs(fs[k].u - cshift - uref(far[k])));
    all_far_plain = all_far_plain && fs[k].method == EvalMethod::Naive;
  }

  // 100-point boundary sample, 50 per interface.
  std::vector<Vec2> bpts;
  for (int k = 0; k < 50; ++k) {
    const double th = kTwoPi * (k + 0.37) / 50.0;
    bpts.emplace_back(std::cos(th), std::sin(th));
  }
  for (int k = 0; k < 50; ++k) {
    const double th = kTwoPi * (k + 0.11) / 50.0;
    bpts.emplace_back(a / 2.0 + a / 2.0 * std::cos(th),
                      a / 2.0 * std::sin(th));
  }
  const auto bs = eval_close(sol, bpts, {});
  double worst_b = 0.0;
  for (size_t k = 0; k < bpts.size(); ++k)
    worst_b = std::max(worst_b, std::abs(bs[k].u - cshift - uref(bpts[k])));

  report(4, "eccentric solve matches the transplanted reference",
         worst_far <= kFarFieldTol && worst_b <= kBoundaryTol &&
             all_far_plain && sol.resolved,
         "far " + num(worst_far) + " <= " + num(kFarFieldTol) + ", boundary " +
             num(worst_b) + " <= " + num(kBoundaryTol));
  return sol;
}

// --- criterion 5: zero net charge per interface after a solve ---
void criterion_charge_conservation(const DensitySolution& a,
                                   const DensitySolution& b,
                                   double gmres_tol) {
  double worst_ratio = 0.0;
  for (const DensitySolution* sol : {&a, &b}) {
    const double bound =
        kChargeFactor * gmres_tol * std::max(sol->rhs_norm, 1e-300);
    for (double c : sol->charges)
      worst_ratio = std::max(worst_ratio, std::abs(c) / bound);
  }
  report(5, "every interface charge within 10*tol*||rhs||",
         worst_ratio <= 1.0,
         "worst |charge|/bound " + num(worst_ratio) + " <= 1");
}

// --- criterion 6: the kernel integrates to 1 / 1/2 / 0 ---
void criterion_kernel_identity() {
  const Curve circle = Curve::circle({0.2, -0.1}, 1.3);
  const InterfaceGrid g = make_uniform_grid(circle, 256);
  auto identity_sum = [&](const Vec2& y, int diag_node) {
    double s = 0.0;
    for (int m = 0; m < g.size(); ++m) {
      const size_t mm = static_cast<size_t>(m);
      if (m == diag_node)
        s += g.weight[mm] * normal_derivative_kernel_diag(g.curvature[mm]);
      else
        s += g.weight[mm] *
             normal_derivative_kernel(g.point[mm], g.normal[mm], y);
    }
    return s;
  };
  double dev = 0.0;
  for (const Vec2& y : {Vec2(0.2, -0.1), Vec2(0.5, 0.1)})
    dev = std::max(dev, std::abs(identity_sum(y, -1) - 1.0));
  for (int m : {0, 77, 191})
    dev = std::max(dev,
                   std::abs(identity_sum(g.point[static_cast<size_t>(m)], m) -
                            0.5));
  for (const Vec2& y : {Vec2(2.0, 2.0), Vec2(-1.4, -1.5)})
    dev = std::max(dev, std::abs(identity_sum(y, -1)));
  report(6, "kernel quadrature identity (inside 1, on-curve 1/2, outside 0)",
         dev <= kIdentityTol,
         "max deviation " + num(dev) + " <= " + num(kIdentityTol));
}

// --- criterion 7: rescaling never loses on iteration counts ---
void criterion_rescaling_iterations() {
  DataSpec wc;
  wc.type = "windowed_cosine";
  SolveSettings base;  // gmres_tol 1e-8, zero initial guess inside the study
  const auto rows = rescaling_study(forest_curves(),
                                    {1.001, 1.01, 1.1, 2.0, 10.0}, {32, 256},
                                    make_boundary_fn(wc), base);
  bool pass = true;
  int worst_margin = 1 << 30;
  for (const auto& r : rows) {
    if (r.iters_rescaled > r.iters_unrescaled) pass = false;
    worst_margin = std::min(worst_margin,
                            r.iters_unrescaled - r.iters_rescaled);
  }
  report(7, "rescaled GMRES iterations <= unrescaled on the nested forest",
         pass,
         std::to_string(rows.size()) + " rows (5 contrasts x {32, 256}), " +
             "min iteration margin " + std::to_string(worst_margin));
}

// --- criterion 8: FMM and direct summation interchangeable ---
void criterion_backend_equivalence() {
  const std::vector<Curve> cs = forest_curves();
  const std::vector<double> sig{1.0, 2.0, 1.0, 2.0, 2.0, 1.0, 2.0, 2.0};
  const RegionTree tree = build_region_tree(cs, sig);
  std::vector<InterfaceGrid> grids;
  for (const Curve& c : cs) grids.push_back(make_uniform_grid(c, 1250));

  SumOptions fopt;
  fopt.backend = Backend::Fmm;
  fopt.fmm_eps = 1e-9;
  const SystemContext cd(tree, grids, true);
  const SystemContext cf(tree, grids, true, fopt);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  Eigen::VectorXd x(cd.size());
  for (int k = 0; k < x.size(); ++k) x[k] = ur(rng);
  const double matvec_diff =
      (apply_system(cd, x) - apply_system(cf, x)).lpNorm<Eigen::Infinity>();

  // Field evaluation through both backends on the same 10^4-node solution.
  std::vector<BoundaryFn> data(cs.size());
  DataSpec wc;
  wc.type = "windowed_cosine";
  data[static_cast<size_t>(tree.root)] = make_boundary_fn(wc);
  SolveSettings s;
  s.initial_uniform_nodes = 1250;
  s.max_rounds = 1;
  s.close_threshold = 0.0;
  s.sum = fopt;
  const DensitySolution sol = solve_adaptive(tree, data, s);
  std::vector<Vec2> pts;
  std::mt19937 rng2(7);
  while (pts.size() < 200) {
    const Vec2 p(ur(rng2), ur(rng2));
    if (p.norm() < 0.95) pts.push_back(p);
  }
  EvalOptions ed, ef;
  ef.sum = fopt;
  const auto sd = eval_naive(sol, pts, ed);
  const auto sf = eval_naive(sol, pts, ef);
  double eval_diff = 0.0;
  for (size_t k = 0; k < pts.size(); ++k)
    eval_diff = std::max(eval_diff, std::abs(sd[k].u - sf[k].u));

  report(8, "FMM equals direct summation at 1e4 nodes (direct is default)",
         matvec_diff <= kBackendTol && eval_diff <= kBackendTol,
         "matvec " + num(matvec_diff) + ", eval " + num(eval_diff) + " <= " +
             num(kBackendTol));
}

// Adaptive Simpson oracle used only by criterion 9.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

// --- criterion 9: interpolation and segment quadrature properties ---
void criterion_interpolation_suite() {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Trigonometric interpolation reproduces band-limited functions: M odd,
  // degree K = (M - 1) / 2.
  double trig_err = 0.0;
  {
    const int M = 33, K = 16;
    std::vector<double> a(K + 1), b(K + 1);
    for (int k = 0; k <= K; ++k) {
      a[k] = ur(rng) / (2 * K + 1);
      b[k] = ur(rng) / (2 * K + 1);
    }
    auto f = [&](double q) {
      double v = a[0];
      for (int k = 1; k <= K; ++k)
        v += a[k] * std::cos(kTwoPi * k * q) + b[k] * std::sin(kTwoPi * k * q);
      return v;
    };
    const double shift = 0.5;
    std::vector<double> samples(M);
    for (int m = 0; m < M; ++m) samples[m] = f((m + shift) / M);
    for (int t = 0; t < 200; ++t) {
      const double q = u01(rng);
      trig_err = std::max(trig_err,
                          std::abs(trig_interpolate(samples, shift, q) - f(q)));
    }
  }

  // Barycentric Lagrange reproduces polynomials of full degree.
  double lag_err = 0.0;
  {
    const int n = 16;
    const GaussRule& rule = gauss_legendre(n);
    BarycentricLagrange lag(rule.x);
    std::vector<double> c(n);
    for (int k = 0; k < n; ++k) c[k] = ur(rng) / n;
    auto poly = [&](double t) {
      double v = 0.0;
      for (int k = n - 1; k >= 0; --k) v = v * t + c[k];
      return v;
    };
    std::vector<double> samples(n);
    for (int k = 0; k < n; ++k) samples[k] = poly(rule.x[k]);
    for (int t = 0; t < 200; ++t) {
      const double x = ur(rng);
      lag_err = std::max(lag_err, std::abs(lag.eval(samples, x) - poly(x)));
    }
  }

  // Straight-segment potential against a generic adaptive quadrature.
  double seg_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vec2 X1(ur(rng), ur(rng)), X2(ur(rng), ur(rng));
    if ((X2 - X1).norm() < 0.1) {
      --trial;
      continue;
    }
    Vec2 x(2.0 * ur(rng), 2.0 * ur(rng));
    if (point_segment_distance(x, X1, X2) < 0.05) {
      --trial;
      continue;
    }
    const double L = (X2 - X1).norm();
    const double s1 = 3.0 * u01(rng), s2 = s1 + L;
    const double g1 = ur(rng), g2 = ur(rng);
    auto integrand = [&](double t) {
      const Vec2 y = X1 + t * (X2 - X1);
      return (g1 + t * (g2 - g1)) * std::log((x - y).norm()) / kTwoPi * L;
    };
    const double want = integrate(integrand, 0.0, 1.0, 1e-14);
    const double got = segment_potential(X1, X2, s1, s2, g1, g2, x);
    seg_err = std::max(seg_err, std::abs(got - want));
  }

  report(9, "interpolation exactness and segment-potential quadrature",
         trig_err <= kTrigTol && lag_err <= kLagrangeTol &&
             seg_err <= kSegmentTol,
         "trig " + num(trig_err) + " <= " + num(kTrigTol) + ", lagrange " +
             num(lag_err) + " <= " + num(kLagrangeTol) + ", segment " +
             num(seg_err) + " <= " + num(kSegmentTol));
}

// --- criterion 10: deliberate scope exclusions ---
void criterion_exclusions() {
  report(10, "excluded by design", true,
         "external mesh-solver wall-time comparisons and analytic regularity "
         "constants are out of scope; accuracy and iteration behavior are "
         "covered by criteria 1-9");
}

}  // namespace

int main() {
  setenv("BIE_LOG", "off", 1);
  const DensitySolution sol1 = criterion_inner_density();
  criterion_spectral_ladder();
  criterion_close_evaluation();
  const DensitySolution sol4 = criterion_conformal_crosscheck();
  criterion_charge_conservation(sol1, sol4, SolveSettings{}.gmres_tol);
  criterion_kernel_identity();
  criterion_rescaling_iterations();
  criterion_backend_equivalence();
  criterion_interpolation_suite();
  criterion_exclusions();
  if (g_failed) std::printf("%d criterion(s) failed\n", g_failed);
  return g_failed;
}
