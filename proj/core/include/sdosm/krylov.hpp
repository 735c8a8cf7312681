#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace sdosm::krylov {

using Vector = Eigen::VectorXd;
using LinearOperator = std::function<Vector(const Vector&)>;

struct GmresResult {
  Vector x;
  int iterations = 0;
  std::vector<double> residuals;  // relative residual estimates, starting with the initial one
  bool converged = false;
};

// Full (unrestarted) GMRES with modified Gram-Schmidt plus one reorthogonalization pass.
// Stops when ||b - A x|| <= tol * ||b|| (||r0|| when b = 0).
GmresResult gmres(const LinearOperator& A, const Vector& b, const Vector& x0, double tol, int max_iter);

}  // namespace sdosm::krylov
