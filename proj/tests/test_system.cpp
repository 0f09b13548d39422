#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bie2d/kernels.hpp"
#include "bie2d/system.hpp"

using namespace bie2d;
namespace {
constexpr double kPi = std::numbers::pi;

// Dense assembly of the same operator apply_system implements, built
// independently from the coefficient definitions.  Test oracle only.
Eigen::MatrixXd dense_system(const SystemContext& ctx) {
  const int total = ctx.size();
  const int n = ctx.tree->size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
  for (int i = 0; i < n; ++i) {
    for (int t = ctx.map.offset[i]; t < ctx.map.offset[i + 1]; ++t) {
      for (int j = 0; j < n; ++j) {
        for (int s = ctx.map.offset[j]; s < ctx.map.offset[j + 1]; ++s) {
          double k;
          if (s == t) {
            k = normal_derivative_kernel_diag(ctx.curvatures[t]);
          } else if ((ctx.points[t] - ctx.points[s]).squaredNorm() == 0.0) {
            k = 0.0;  // distinct coincident nodes are skipped by the sum
          } else {
            k = normal_derivative_kernel(ctx.points[t], ctx.normals[t],
                                         ctx.points[s]);
          }
          A(t, s) += ctx.row_coef[i] * ctx.alpha[j] * ctx.weights[s] * k;
        }
      }
      A(t, t) += ctx.diag_coef[i];
      if (i == ctx.tree->root) {
        const int root = ctx.tree->root;
        for (int s = ctx.map.offset[root]; s < ctx.map.offset[root + 1]; ++s)
          A(t, s) -= ctx.row_coef[i] * ctx.alpha[root] * ctx.weights[s];
      }
    }
  }
  return A;
}

RegionTree six_circle_tree() {
  std::vector<Curve> curves;
  curves.push_back(Curve::circle({0.0, 0.0}, 3.0));
  curves.push_back(Curve::circle({-1.8, -0.8}, 0.5));
  curves.push_back(Curve::circle({0.8, 0.3}, 1.5));
  curves.push_back(Curve::circle({0.5, 0.95}, 0.55));
  curves.push_back(Curve::circle({0.85, -0.5}, 0.3));
  curves.push_back(Curve::circle({0.75, 0.95}, 0.22));
  return build_region_tree(curves, {1.0, 5.0, 2.0, 10.0, 0.5, 3.0});
}

std::vector<InterfaceGrid> uniform_grids(const RegionTree& tree, int M) {
  std::vector<InterfaceGrid> grids;
  for (int i = 0; i < tree.size(); ++i) {
    grids.push_back(make_uniform_grid(tree.curves[i], M));
    grids.back().curve_index = i;
  }
  return grids;
}

// Quadrature of the divergence-theorem integral over the discretized curve,
// evaluated at y; diag_node >= 0 marks y as that very node (diagonal rule).
double divergence_sum(const InterfaceGrid& g, const Vec2& y,
                      int diag_node = -1) {
  double s = 0;
  for (int m = 0; m < g.size(); ++m) {
    if (m == diag_node)
      s += g.weight[m] * normal_derivative_kernel_diag(g.curvature[m]);
    else
      s += g.weight[m] * normal_derivative_kernel(g.point[m], g.normal[m], y);
  }
  return s;
}

}  // namespace

TEST_CASE("kernel diagonal is the curvature limit") {
  const Curve ell = Curve::ellipse({0.3, -0.2}, 1.4, 0.6, 0.8);
  for (double q : {0.0, 0.17, 0.45, 0.81}) {
    const CurveFrame f = ell.frame(q);
    const double limit = normal_derivative_kernel_diag(f.curvature);
    const double eps = 1e-5;
    const Vec2 ynear = ell.position(q + eps);
    CHECK(normal_derivative_kernel(f.point, f.normal, ynear) ==
          doctest::Approx(limit).epsilon(1e-3));
    const Vec2 ycloser = ell.position(q + 1e-7);
    CHECK(normal_derivative_kernel(f.point, f.normal, ycloser) ==
          doctest::Approx(limit).epsilon(1e-4));
  }
  CHECK(normal_derivative_kernel_diag(2.0) ==
        doctest::Approx(0.5 / kPi).epsilon(1e-15));
}

TEST_CASE("kernel rejects coincident points") {
  const Vec2 x{0.5, 0.5}, n{1.0, 0.0};
  CHECK_THROWS_AS(normal_derivative_kernel(x, n, x), CoincidentPoints);
  CHECK_THROWS_AS(log_kernel(x, x), CoincidentPoints);
}

TEST_CASE("divergence identity on a circle is discretely exact") {
  // On a circle the kernel is constant, so the identity holds at machine
  // precision for every node count, including the half for on-curve targets.
  const Curve c = Curve::circle({0.4, -0.1}, 1.2);
  for (int M : {8, 32, 64}) {
    const InterfaceGrid g = make_uniform_grid(c, M);
    CHECK(divergence_sum(g, {0.4, -0.1}) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(divergence_sum(g, g.point[M / 3], M / 3) ==
          doctest::Approx(0.5).epsilon(1e-13));
  }
}

TEST_CASE("divergence identity: inside one, outside zero, on-curve half") {
  const Curve ell = Curve::ellipse({0.0, 0.0}, 1.5, 0.8, 0.4);
  const Curve wav = Curve::polar_cosine({0.0, 0.0}, 1.0, 0.2, 5);
  for (const Curve* c : {&ell, &wav}) {
    const InterfaceGrid g = make_uniform_grid(*c, 256);
    // Strictly inside (well separated from the curve).
    CHECK(std::abs(divergence_sum(g, {0.0, 0.0}) - 1.0) < 1e-10);
    CHECK(std::abs(divergence_sum(g, {0.2, 0.1}) - 1.0) < 1e-10);
    // Strictly outside.
    CHECK(std::abs(divergence_sum(g, {3.0, 2.0})) < 1e-10);
    CHECK(std::abs(divergence_sum(g, {-2.5, 0.3})) < 1e-10);
    // On-curve with the diagonal rule.
    for (int m : {0, 40, 171})
      CHECK(std::abs(divergence_sum(g, g.point[m], m) - 0.5) < 1e-10);
  }
}

TEST_CASE("system coefficients implement both scalings") {
  const RegionTree tree = six_circle_tree();
  auto grids = uniform_grids(tree, 8);

  SystemContext re(tree, grids, /*rescaled=*/true);
  SystemContext un(tree, grids, /*rescaled=*/false);
  const int root = tree.root;
  CHECK(re.alpha[root] == 1.0);
  CHECK(re.row_coef[root] == 1.0);
  CHECK(re.diag_coef[root] == -0.5);
  CHECK(re.rhs_scale[root] == tree.sigma[root]);
  CHECK(un.alpha[root] == 1.0);
  CHECK(un.row_coef[root] == 1.0);
  CHECK(un.diag_coef[root] == -0.5);
  CHECK(un.rhs_scale[root] == tree.sigma[root]);
  for (int i = 0; i < tree.size(); ++i) {
    if (i == root) continue;
    const double sp = tree.sigma_outside(i);
    const double si = tree.sigma[i];
    CHECK(re.alpha[i] == doctest::Approx(1.0 - sp / si).epsilon(1e-15));
    CHECK(re.diag_coef[i] ==
          doctest::Approx(-0.5 * (sp + si) / si).epsilon(1e-14));
    CHECK(re.rhs_scale[i] == doctest::Approx(sp - si).epsilon(1e-15));
    CHECK(re.gamma_scale(i) == doctest::Approx(re.alpha[i]));
    CHECK(un.alpha[i] == 1.0);
    CHECK(un.row_coef[i] == 1.0);
    CHECK(un.diag_coef[i] ==
          doctest::Approx(0.5 * (sp + si) / (sp - si)).epsilon(1e-14));
    CHECK(un.rhs_scale[i] == doctest::Approx(sp - si).epsilon(1e-15));
    CHECK(un.gamma_scale(i) == 1.0);
  }
}

TEST_CASE("matrix-free apply matches dense assembly") {
  const RegionTree tree = six_circle_tree();
  auto grids = uniform_grids(tree, 32);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  for (bool rescaled : {true, false}) {
    SystemContext ctx(tree, grids, rescaled);
    const Eigen::MatrixXd A = dense_system(ctx);
    Eigen::VectorXd x(ctx.size());
    for (int k = 0; k < x.size(); ++k) x[k] = uc(rng);
    const Eigen::VectorXd want = A * x;
    const Eigen::VectorXd got = apply_system(ctx, x);
    CHECK((got - want).lpNorm<Eigen::Infinity>() <
          1e-12 * want.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("apply is linear") {
  const RegionTree tree = six_circle_tree();
  SystemContext ctx(tree, uniform_grids(tree, 16), true);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  Eigen::VectorXd x(ctx.size()), y(ctx.size());
  for (int k = 0; k < x.size(); ++k) {
    x[k] = uc(rng);
    y[k] = uc(rng);
  }
  const Eigen::VectorXd lhs = apply_system(ctx, 3.0 * x - 0.5 * y);
  const Eigen::VectorXd rhs = 3.0 * apply_system(ctx, x) -
                              0.5 * apply_system(ctx, y);
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <
        1e-13 * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("rhs assembly samples and scales the data") {
  const RegionTree tree = six_circle_tree();
  SystemContext ctx(tree, uniform_grids(tree, 16), true);
  std::vector<BoundaryFn> data(tree.size());
  data[0] = [](double q) { return std::sin(2.0 * kPi * q); };
  data[3] = [](double q) { return std::cos(2.0 * kPi * 2.0 * q); };
  const Eigen::VectorXd rhs = assemble_rhs(ctx, data);
  for (int m = 0; m < 16; ++m) {
    const double q = ctx.grids[0].q[m];
    CHECK(rhs[ctx.map.flat(0, m)] ==
          doctest::Approx(std::sin(2.0 * kPi * q) / ctx.rhs_scale[0])
              .epsilon(1e-14));
    const double q3 = ctx.grids[3].q[m];
    CHECK(rhs[ctx.map.flat(3, m)] ==
          doctest::Approx(std::cos(4.0 * kPi * q3) / ctx.rhs_scale[3])
              .epsilon(1e-14));
  }
  // Interfaces with no data get exact zeros.
  for (int i : {1, 2, 4, 5})
    for (int m = 0; m < 16; ++m) CHECK(rhs[ctx.map.flat(i, m)] == 0.0);
}

TEST_CASE("rhs assembly rejects net-flux data") {
  const RegionTree tree = six_circle_tree();
  SystemContext ctx(tree, uniform_grids(tree, 16), true);
  std::vector<BoundaryFn> data(tree.size());
  data[0] = [](double) { return 1.0; };  // pure net flux
  CHECK_THROWS_AS(assemble_rhs(ctx, data), CompatibilityViolation);
  // A large compat_tol accepts it (escape hatch, not a recommendation).
  CHECK_NOTHROW(assemble_rhs(ctx, data, 10.0));
}

TEST_CASE("shape mismatches are rejected") {
  const RegionTree tree = six_circle_tree();
  auto grids = uniform_grids(tree, 8);
  grids.pop_back();
  CHECK_THROWS_AS(SystemContext(tree, grids, true), IndexMismatch);

  SystemContext ctx(tree, uniform_grids(tree, 8), true);
  Eigen::VectorXd bad(ctx.size() + 1);
  bad.setZero();
  CHECK_THROWS_AS(apply_system(ctx, bad), IndexMismatch);
  std::vector<BoundaryFn> data(tree.size() - 1);
  CHECK_THROWS_AS(assemble_rhs(ctx, data), IndexMismatch);
}
