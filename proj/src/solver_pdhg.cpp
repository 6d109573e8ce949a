#include "ot/solver_pdhg.hpp"

#include <cmath>

namespace ot {

void MarginalOperator::apply(const Vector& t, Vector& out) const {
  if (t.size() != static_cast<Eigen::Index>(n) * m)
    throw InvalidArgument("MarginalOperator::apply: size mismatch");
  out.setZero(n + m);
  for (int i = 0; i < n; ++i) {
    const double* row = t.data() + static_cast<Eigen::Index>(i) * m;
    double rs = 0.0;
    for (int j = 0; j < m; ++j) {
      rs += row[j];
      out[n + j] += row[j];
    }
    out[i] = rs;
  }
}

void MarginalOperator::apply_adjoint(const Vector& lambda, Vector& out) const {
  if (lambda.size() != n + m)
    throw InvalidArgument("MarginalOperator::apply_adjoint: size mismatch");
  out.resize(static_cast<Eigen::Index>(n) * m);
  for (int i = 0; i < n; ++i) {
    double* row = out.data() + static_cast<Eigen::Index>(i) * m;
    const double li = lambda[i];
    for (int j = 0; j < m; ++j) row[j] = li + lambda[n + j];
  }
}

double operator_norm_bound(const MarginalOperator& op) {
  return std::sqrt(static_cast<double>(op.n + op.m));
}

std::tuple<TransportPlan, DualPotentials, SolveReport> solve_pdhg(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg) {
  cfg.validate();
  const int n = cost.rows();
  const int m = cost.cols();
  if (mu.size() != n || nu.size() != m)
    throw InvalidArgument("solve_pdhg: measure sizes do not match the cost matrix");

  const Matrix& c = cost.values();
  const double tau = cfg.tau;
  const double l2 = static_cast<double>(n + m);  // squared operator norm bound
  const double sigma = 1.0 / (tau * l2);

  Matrix t = Matrix::Zero(n, m);
  Matrix t_next(n, m), t_hat(n, m);
  Vector lam1 = Vector::Zero(n);
  Vector lam2 = Vector::Zero(m);

  SolveReport report;
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    // t_{k+1} = [t_k - tau (K'lambda + c)]_+, then extrapolate by one step.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        double g = lam1[i] + lam2[j] + c(i, j);
        t_next(i, j) = std::max(t(i, j) - tau * g, 0.0);
        t_hat(i, j) = 2.0 * t_next(i, j) - t(i, j);
      }

    for (int i = 0; i < n; ++i) lam1[i] += sigma * (t_hat.row(i).sum() - mu.weights()[i]);
    for (int j = 0; j < m; ++j) lam2[j] += sigma * (t_hat.col(j).sum() - nu.weights()[j]);

    t.swap(t_next);

    residual = marginal_residual(t, mu.weights(), nu.weights());
    if (iter % 100 == 0) {
      double obj = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) obj += t(i, j) * c(i, j);
      report.history.push_back({iter, residual, obj});
    }
    if (residual <= cfg.tol) {
      ++iter;
      break;
    }
  }

  TransportPlan plan(std::move(t));
  report.distance = transport_cost(plan, cost);
  report.regularized_objective = report.distance;  // no regularization term
  report.iterations = iter;
  report.marginal_residual = residual;
  report.converged = residual <= cfg.tol;
  report.history.push_back({iter, residual, report.distance});

  // Lagrange multipliers of the saddle-point form satisfy
  // lambda1_i + lambda2_j >= -C_ij; negation restores the standard
  // dual orientation alpha_i + beta_j <= C_ij.
  DualPotentials pots{-lam1, -lam2};
  return {std::move(plan), std::move(pots), std::move(report)};
}

}  // namespace ot
