#include "ot/solver_quadratic.hpp"

#include <cmath>
#include <limits>

namespace ot {
namespace {

struct InnerResult {
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
};

double sharp_cost(const Matrix& t, const Matrix& c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) s += t(i, j) * c(i, j);
  return s;
}

// One FISTA run on the centered dual, warm-started at state.alpha/beta with
// a fresh momentum sequence. Records (iteration, residual, sharp cost) every
// `history_stride` iterations when a history sink is given.
InnerResult fista_loop(const Matrix& c, const Vector& mu, const Vector& nu, double eps,
                       const Matrix& center, int max_iter, double tol, FistaState& state,
                       std::vector<HistoryEntry>* history, int history_stride) {
  const Eigen::Index n = c.rows();
  const Eigen::Index m = c.cols();
  state.step_bound = static_cast<double>(n + m) / eps;
  state.alpha_prev = state.alpha;
  state.beta_prev = state.beta;
  const double step = 1.0 / state.step_bound;

  Vector bar_alpha(n), bar_beta(m), grad_alpha(n), grad_beta(m);

  InnerResult out;
  for (state.momentum_index = 1; state.momentum_index <= max_iter; ++state.momentum_index) {
    const int k = state.momentum_index;
    const double theta = static_cast<double>(k - 1) / static_cast<double>(k + 2);
    bar_alpha = state.alpha + theta * (state.alpha - state.alpha_prev);
    bar_beta = state.beta + theta * (state.beta - state.beta_prev);

    quadratic_dual_gradient(c, mu, nu, eps, center, bar_alpha, bar_beta, grad_alpha,
                            grad_beta);
    state.alpha_prev = state.alpha;
    state.beta_prev = state.beta;
    state.alpha = bar_alpha + step * grad_alpha;
    state.beta = bar_beta + step * grad_beta;

    // The dual gradient at the new point is exactly the marginal defect of
    // the implied plan, so convergence is read off the gradient.
    quadratic_dual_gradient(c, mu, nu, eps, center, state.alpha, state.beta, grad_alpha,
                            grad_beta);
    double residual = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      residual = std::max(residual, std::abs(grad_alpha[i]));
    for (Eigen::Index j = 0; j < m; ++j)
      residual = std::max(residual, std::abs(grad_beta[j]));

    out.iterations = k;
    out.residual = residual;
    if (history && (k % history_stride == 0)) {
      Matrix t = quadratic_plan(c, eps, center, state.alpha, state.beta);
      history->push_back({k, residual, sharp_cost(t, c)});
    }
    if (residual <= tol) break;
  }
  return out;
}

}  // namespace

Matrix quadratic_plan(const Matrix& cost, double eps, const Matrix& center,
                      const Vector& alpha, const Vector& beta) {
  Matrix t(cost.rows(), cost.cols());
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    for (Eigen::Index j = 0; j < cost.cols(); ++j)
      t(i, j) = std::max(center(i, j) + (alpha[i] + beta[j] - cost(i, j)) / eps, 0.0);
  return t;
}

double quadratic_dual_objective(const Matrix& cost, const Vector& mu, const Vector& nu,
                                double eps, const Matrix& center, const Vector& alpha,
                                const Vector& beta) {
  double obj = alpha.dot(mu) + beta.dot(nu);
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const double x = alpha[i] + beta[j] - cost(i, j);
      const double tk = center(i, j);
      if (tk + x / eps > 0.0)
        obj -= tk * x + x * x / (2.0 * eps);
      else
        obj += (eps / 2.0) * tk * tk;
    }
  return obj;
}

void quadratic_dual_gradient(const Matrix& cost, const Vector& mu, const Vector& nu,
                             double eps, const Matrix& center, const Vector& alpha,
                             const Vector& beta, Vector& grad_alpha, Vector& grad_beta) {
  grad_alpha = mu;
  grad_beta = nu;
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const double entry =
          std::max(center(i, j) + (alpha[i] + beta[j] - cost(i, j)) / eps, 0.0);
      grad_alpha[i] -= entry;
      grad_beta[j] -= entry;
    }
}

std::tuple<TransportPlan, DualPotentials, SolveReport> solve_fista(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.epsilon <= 0.0)
    throw InvalidArgument("solve_fista: epsilon must be positive (step bound is infinite)");
  const int n = cost.rows();
  const int m = cost.cols();
  if (mu.size() != n || nu.size() != m)
    throw InvalidArgument("solve_fista: measure sizes do not match the cost matrix");

  const Matrix& c = cost.values();
  const Matrix center = Matrix::Zero(n, m);
  FistaState state;
  state.alpha = Vector::Zero(n);
  state.beta = Vector::Zero(m);

  SolveReport report;
  InnerResult res = fista_loop(c, mu.weights(), nu.weights(), cfg.epsilon, center,
                               cfg.max_iter, cfg.tol, state, &report.history, 100);

  TransportPlan plan(quadratic_plan(c, cfg.epsilon, center, state.alpha, state.beta));
  report.distance = transport_cost(plan, cost);
  report.regularized_objective =
      report.distance + 0.5 * cfg.epsilon * plan.values().squaredNorm();
  report.iterations = res.iterations;
  report.marginal_residual = res.residual;
  report.converged = res.residual <= cfg.tol;
  report.history.push_back({res.iterations, res.residual, report.distance});
  return {std::move(plan), DualPotentials{state.alpha, state.beta}, std::move(report)};
}

std::tuple<TransportPlan, DualPotentials, SolveReport> solve_fista_center(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg, int outer_iter, bool literal_center_update) {
  cfg.validate();
  if (cfg.epsilon <= 0.0)
    throw InvalidArgument("solve_fista_center: epsilon must be positive");
  if (outer_iter < 1) throw InvalidArgument("solve_fista_center: outer_iter must be >= 1");
  const int n = cost.rows();
  const int m = cost.cols();
  if (mu.size() != n || nu.size() != m)
    throw InvalidArgument("solve_fista_center: measure sizes do not match the cost matrix");

  const Matrix& c = cost.values();
  const double eps = cfg.epsilon;
  Matrix center = Matrix::Zero(n, m);
  FistaState state;
  state.alpha = Vector::Zero(n);
  state.beta = Vector::Zero(m);

  SolveReport report;
  for (int k = 0; k < outer_iter; ++k) {
    fista_loop(c, mu.weights(), nu.weights(), eps, center, cfg.inner_iter, cfg.tol, state,
               nullptr, 1);
    if (literal_center_update) {
      const Matrix zero = Matrix::Zero(n, m);
      center = quadratic_plan(c, eps, zero, state.alpha, state.beta);
    } else {
      center = quadratic_plan(c, eps, center, state.alpha, state.beta);
    }
    report.history.push_back(
        {k + 1, marginal_residual(center, mu.weights(), nu.weights()), sharp_cost(center, c)});
  }

  TransportPlan plan(center);
  report.distance = transport_cost(plan, cost);
  report.regularized_objective =
      report.distance + 0.5 * eps * plan.values().squaredNorm();
  report.iterations = outer_iter;
  report.marginal_residual = marginal_residual(plan.values(), mu.weights(), nu.weights());
  report.converged = report.marginal_residual <= cfg.tol;
  return {std::move(plan), DualPotentials{state.alpha, state.beta}, std::move(report)};
}

}  // namespace ot
