#include "bie2d/gmres.hpp"

#include <cmath>

#include "bie2d/errors.hpp"
#include "bie2d/log.hpp"

namespace bie2d {

namespace {

// One Arnoldi cycle of at most `m` steps starting from iterate x.
// Updates x in place, appends relative residuals, returns true on
// convergence (including exact breakdown at a converged residual).
bool gmres_cycle(const LinearOp& apply, const Eigen::VectorXd& b, double tol,
                 int m, double bnorm, Eigen::VectorXd& x, int& total_iters,
                 std::vector<double>& residuals) {
  const int n = static_cast<int>(b.size());
  Eigen::VectorXd r = b - apply(x);
  const double beta = r.norm();
  if (beta <= tol * bnorm) return true;

  std::vector<Eigen::VectorXd> V;
  V.reserve(static_cast<size_t>(m) + 1);
  V.push_back(r / beta);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sn = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
  g(0) = beta;

  int k = 0;           // number of completed Arnoldi steps
  bool happy = false;  // exact invariant subspace reached
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = apply(V[static_cast<size_t>(j)]);
    for (int i = 0; i <= j; ++i) {
      H(i, j) = V[static_cast<size_t>(i)].dot(w);
      w -= H(i, j) * V[static_cast<size_t>(i)];
    }
    H(j + 1, j) = w.norm();

    // Apply the accumulated rotations to the new column.
    for (int i = 0; i < j; ++i) {
      const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
      H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
      H(i, j) = t;
    }
    // New rotation eliminating H(j+1, j).
    const double denom = std::hypot(H(j, j), H(j + 1, j));
    if (denom == 0.0) {
      cs(j) = 1.0;
      sn(j) = 0.0;
    } else {
      cs(j) = H(j, j) / denom;
      sn(j) = H(j + 1, j) / denom;
    }
    H(j, j) = denom;
    g(j + 1) = -sn(j) * g(j);
    g(j) = cs(j) * g(j);

    ++k;
    ++total_iters;
    const double res = std::abs(g(j + 1));
    residuals.push_back(bnorm > 0.0 ? res / bnorm : res);

    if (H(j + 1, j) <= 1e-14 * beta) {
      happy = true;  // Krylov space is invariant: iterate is exact
      break;
    }
    if (res <= tol * bnorm) break;
    V.push_back(w / H(j + 1, j));
  }

  // Back substitution for the projected least-squares problem.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
  for (int i = k - 1; i >= 0; --i) {
    double s = g(i);
    for (int j = i + 1; j < k; ++j) s -= H(i, j) * y(j);
    y(i) = (H(i, i) != 0.0) ? s / H(i, i) : 0.0;
  }
  for (int i = 0; i < k; ++i) x += y(i) * V[static_cast<size_t>(i)];
  (void)n;

  if (happy) return true;
  return std::abs(g(k)) <= tol * bnorm;
}

}  // namespace

GmresResult gmres(const LinearOp& apply, const Eigen::VectorXd& b, double tol,
                  int max_iters, const Eigen::VectorXd* x0, int restart) {
  if (max_iters < 1) throw BadConfig("gmres: max_iters must be positive");
  if (!(tol > 0.0)) throw BadConfig("gmres: tolerance must be positive");
  if (x0 && x0->size() != b.size())
    throw IndexMismatch("gmres: warm-start size does not match rhs");

  GmresResult out;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    // The unique minimizer with zero right-hand side.
    out.x = Eigen::VectorXd::Zero(b.size());
    out.converged = true;
    return out;
  }

  out.x = x0 ? *x0 : Eigen::VectorXd::Zero(b.size());
  const int cycle = (restart > 0) ? std::min(restart, max_iters) : max_iters;
  while (out.iterations < max_iters) {
    const int m = std::min(cycle, max_iters - out.iterations);
    if (gmres_cycle(apply, b, tol, m, bnorm, out.x, out.iterations,
                    out.residuals)) {
      out.converged = true;
      return out;
    }
  }
  log_warn("gmres: no convergence in %d iterations (rel residual %.3e)",
           out.iterations,
           out.residuals.empty() ? 1.0 : out.residuals.back());
  return out;
}

}  // namespace bie2d
