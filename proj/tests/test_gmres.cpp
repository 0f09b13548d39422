#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "bie2d/errors.hpp"
#include "bie2d/gmres.hpp"

using namespace bie2d;
namespace {

Eigen::MatrixXd random_well_conditioned(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = uc(rng) / n;
  // Diagonal dominance keeps it far from singular.
  for (int i = 0; i < n; ++i) A(i, i) += 2.0;
  return A;
}

LinearOp as_op(const Eigen::MatrixXd& A) {
  return [&A](const Eigen::VectorXd& v) -> Eigen::VectorXd { return A * v; };
}

double rel_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& b) {
  return (b - A * x).norm() / b.norm();
}

}  // namespace

TEST_CASE("matches a dense direct solve") {
  const int n = 60;
  const Eigen::MatrixXd A = random_well_conditioned(n, 101);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = uc(rng);

  const GmresResult r = gmres(as_op(A), b, 1e-12, 200);
  CHECK(r.converged);
  CHECK(rel_residual(A, r.x, b) <= 1e-12);
  const Eigen::VectorXd xd = A.partialPivLu().solve(b);
  CHECK((r.x - xd).norm() < 1e-10 * xd.norm());
  // The residual history is the advertised stopping quantity.
  REQUIRE(!r.residuals.empty());
  CHECK(r.residuals.back() <= 1e-12);
  CHECK(static_cast<int>(r.residuals.size()) == r.iterations);
  // Full GMRES residuals never increase.
  for (size_t k = 1; k < r.residuals.size(); ++k)
    CHECK(r.residuals[k] <= r.residuals[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("zero right-hand side returns zero immediately") {
  const Eigen::MatrixXd A = random_well_conditioned(12, 3);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(12);
  const GmresResult r = gmres(as_op(A), b, 1e-10, 50);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.x.norm() == 0.0);
}

TEST_CASE("warm start from the exact solution costs nothing") {
  const int n = 40;
  const Eigen::MatrixXd A = random_well_conditioned(n, 5);
  Eigen::VectorXd xstar(n);
  for (int i = 0; i < n; ++i) xstar[i] = std::sin(i + 1.0);
  const Eigen::VectorXd b = A * xstar;

  const GmresResult cold = gmres(as_op(A), b, 1e-10, 200);
  const GmresResult warm = gmres(as_op(A), b, 1e-10, 200, &xstar);
  CHECK(warm.converged);
  CHECK(warm.iterations == 0);
  CHECK((warm.x - xstar).norm() < 1e-14 * xstar.norm());
  CHECK(cold.iterations > 0);

  // A slightly perturbed start converges in fewer iterations than cold.
  Eigen::VectorXd near = xstar;
  near[0] += 1e-6;
  const GmresResult r = gmres(as_op(A), b, 1e-10, 200, &near);
  CHECK(r.converged);
  CHECK(r.iterations < cold.iterations);
  CHECK(rel_residual(A, r.x, b) <= 1e-10);
}

TEST_CASE("invariant subspace breakdown counts as convergence") {
  // With A = I the first Arnoldi step breaks down exactly.
  const int n = 10;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = i + 1.0;
  const GmresResult r = gmres(as_op(A), b, 1e-14, 50);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK((r.x - b).norm() < 1e-13 * b.norm());

  // Rank-structured operator: solution lives in a 2-dimensional Krylov space.
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  B(0, 1) = 0.7;  // single Jordan-like coupling
  const GmresResult r2 = gmres(as_op(B), b, 1e-14, 50);
  CHECK(r2.converged);
  CHECK(r2.iterations <= 2);
  CHECK(rel_residual(B, r2.x, b) <= 1e-13);
}

TEST_CASE("iteration cap returns the best iterate unconverged") {
  const int n = 50;
  const Eigen::MatrixXd A = random_well_conditioned(n, 77);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  const GmresResult r = gmres(as_op(A), b, 1e-14, 3);
  CHECK(!r.converged);
  CHECK(r.iterations == 3);
  // Still an improvement over the zero start.
  CHECK(rel_residual(A, r.x, b) < 1.0);
  // And consistent with the reported residual.
  CHECK(rel_residual(A, r.x, b) ==
        doctest::Approx(r.residuals.back()).epsilon(1e-8));
}

TEST_CASE("restarted cycles reach the same answer") {
  const int n = 48;
  const Eigen::MatrixXd A = random_well_conditioned(n, 13);
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = uc(rng);
  const GmresResult r = gmres(as_op(A), b, 1e-11, 400, nullptr, /*restart=*/8);
  CHECK(r.converged);
  CHECK(rel_residual(A, r.x, b) <= 1e-11);
  const Eigen::VectorXd xd = A.partialPivLu().solve(b);
  CHECK((r.x - xd).norm() < 1e-9 * xd.norm());
}

TEST_CASE("determinism") {
  const int n = 30;
  const Eigen::MatrixXd A = random_well_conditioned(n, 55);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  const GmresResult a = gmres(as_op(A), b, 1e-12, 100);
  const GmresResult c = gmres(as_op(A), b, 1e-12, 100);
  CHECK(a.iterations == c.iterations);
  CHECK((a.x - c.x).norm() == 0.0);
}

TEST_CASE("input validation") {
  const Eigen::MatrixXd A = random_well_conditioned(8, 2);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(8);
  CHECK_THROWS_AS(gmres(as_op(A), b, -1.0, 10), BadConfig);
  CHECK_THROWS_AS(gmres(as_op(A), b, 1e-10, 0), BadConfig);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(gmres(as_op(A), b, 1e-10, 10, &x0), IndexMismatch);
}
