#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace bie2d {

using LinearOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  std::vector<double> residuals;  // relative residual after each iteration
  bool converged = false;
};

// Restart-free GMRES (modified Gram-Schmidt Arnoldi, Givens least squares).
// Stops when ||b - A x|| <= tol * ||b||.  An exact invariant-subspace
// breakdown counts as convergence.  If max_iters is reached the best iterate
// is returned with converged = false.  restart > 0 enables GMRES(restart)
// cycles; the default runs a single full cycle.  Fully deterministic.
GmresResult gmres(const LinearOp& apply, const Eigen::VectorXd& b, double tol,
                  int max_iters, const Eigen::VectorXd* x0 = nullptr,
                  int restart = 0);

}  // namespace bie2d
