#include "ot/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ot {

std::pair<double, TransportPlan> exact_uniform_wasserstein(const CostMatrix& cost) {
  const int n = cost.rows();
  if (n != cost.cols()) throw Unsupported("exact oracle requires a square cost matrix");
  if (n > 8) throw Unsupported("exact oracle is capped at n = 8");

  const Matrix& c = cost.values();
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_total = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += c(i, perm[i]);
    if (total < best_total) {  // strict: keeps the lexicographically first tie
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Matrix plan = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) plan(i, best[i]) = 1.0 / static_cast<double>(n);
  return {best_total / static_cast<double>(n), TransportPlan(std::move(plan))};
}

// Kuhn-Munkres with explicit dual variables (u, v). The duals satisfy
// u_i + v_j <= C_ij with equality on the optimal matching, so they are an
// optimal solution of the assignment dual.
DualPotentials exact_uniform_potentials(const CostMatrix& cost) {
  const int n = cost.rows();
  if (n != cost.cols()) throw Unsupported("exact potentials require a square cost matrix");
  const Matrix& c = cost.values();
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  // The algorithm keeps v[0] as the running objective offset; drop it and
  // report the row/column potentials in natural indexing.
  Vector alpha(n), beta(n);
  for (int i = 1; i <= n; ++i) alpha[i - 1] = u[i];
  for (int j = 1; j <= n; ++j) beta[j - 1] = v[j];
  return {std::move(alpha), std::move(beta)};
}

Certificate certify(const TransportPlan& plan, const DualPotentials& potentials,
                    const CostMatrix& cost, const DiscreteMeasure& mu,
                    const DiscreteMeasure& nu) {
  if (plan.rows() != cost.rows() || plan.cols() != cost.cols())
    throw InvalidArgument("certify: plan/cost shape mismatch");
  if (potentials.alpha.size() != cost.rows() || potentials.beta.size() != cost.cols())
    throw InvalidArgument("certify: potential/cost shape mismatch");

  Certificate cert;
  cert.primal_value = transport_cost(plan, cost);
  cert.dual_value =
      potentials.alpha.dot(mu.weights()) + potentials.beta.dot(nu.weights());
  cert.gap = std::abs(cert.primal_value - cert.dual_value);

  double violation = -std::numeric_limits<double>::infinity();
  const Matrix& c = cost.values();
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      violation = std::max(violation, potentials.alpha[i] + potentials.beta[j] - c(i, j));
  cert.max_dual_violation = violation;
  cert.max_marginal_residual = marginal_residual(plan.values(), mu.weights(), nu.weights());
  return cert;
}

Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                  const Vector& point, double step) {
  if (step <= 0.0) throw InvalidArgument("finite differences need a positive step");
  Vector grad(point.size());
  Vector p = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    p[i] = point[i] + step;
    const double fp = f(p);
    p[i] = point[i] - step;
    const double fm = f(p);
    p[i] = point[i];
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

}  // namespace ot
