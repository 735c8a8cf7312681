#include "sdosm/krylov.hpp"

#include <cmath>

#include "sdosm/errors.hpp"

namespace sdosm::krylov {

GmresResult gmres(const LinearOperator& A, const Vector& b, const Vector& x0, double tol, int max_iter) {
  if (!(tol > 0.0)) throw DomainError("GMRES tolerance must be positive");
  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = x0.size() ? x0 : Vector::Zero(n);
  if (res.x.size() != n) throw DomainError("GMRES initial guess has the wrong size");

  const Vector r0 = b - A(res.x);
  const double beta = r0.norm();
  double ref = b.norm();
  if (ref == 0.0) ref = beta;
  if (ref == 0.0) {
    res.residuals.push_back(0.0);
    res.converged = true;
    return res;
  }
  res.residuals.push_back(beta / ref);
  if (beta <= tol * ref) {
    res.converged = true;
    return res;
  }

  const int m = std::max(1, static_cast<int>(std::min<Eigen::Index>(max_iter, n)));
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g = Eigen::VectorXd::Zero(m + 1);
  V.col(0) = r0 / beta;
  g[0] = beta;

  int k = 0;
  for (int j = 0; j < m && j < max_iter; ++j) {
    Vector w = A(V.col(j));
    const double wn = w.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) {
        const double h = V.col(i).dot(w);
        H(i, j) += h;
        w -= h * V.col(i);
      }
    const double hn = w.norm();
    H(j + 1, j) = hn;
    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
      H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
      H(i, j) = t;
    }
    const double denom = std::hypot(H(j, j), H(j + 1, j));
    cs[j] = denom == 0.0 ? 1.0 : H(j, j) / denom;
    sn[j] = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
    H(j, j) = denom;
    H(j + 1, j) = 0.0;
    g[j + 1] = -sn[j] * g[j];
    g[j] = cs[j] * g[j];

    k = j + 1;
    const double rel = std::abs(g[j + 1]) / ref;
    res.residuals.push_back(rel);
    if (rel <= tol) {
      res.converged = true;
      break;
    }
    if (hn <= 1e-14 * wn) break;  // breakdown: the Krylov space is invariant
    V.col(j + 1) = w / hn;
  }

  const Vector y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
  res.x += V.leftCols(k) * y;
  res.iterations = k;
  if (!res.converged) res.converged = (b - A(res.x)).norm() <= tol * ref;
  return res;
}

}  // namespace sdosm::krylov
