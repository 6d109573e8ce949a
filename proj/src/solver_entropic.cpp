#include "ot/solver_entropic.hpp"

#include <cmath>
#include <limits>

namespace ot {
namespace {

constexpr double kUnderflowFloor = 1e-300;

double entropic_objective(const Matrix& t, const Matrix& c, double eps) {
  double sharp = 0.0, ent = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const double v = t(i, j);
      sharp += v * c(i, j);
      if (v > 0.0) ent += v * std::log(v);
    }
  return sharp + eps * ent;
}

void check_denominator(const Vector& d) {
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] < kUnderflowFloor)
      throw NumericalUnderflow(
          "scaling denominator underflow; epsilon is too small for this cost "
          "(use log_domain)");
}

double log_sum_exp_row(const Matrix& logk, const Vector& g, Eigen::Index i) {
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < logk.cols(); ++j) hi = std::max(hi, logk(i, j) + g[j]);
  double s = 0.0;
  for (Eigen::Index j = 0; j < logk.cols(); ++j) s += std::exp(logk(i, j) + g[j] - hi);
  return hi + std::log(s);
}

double log_sum_exp_col(const Matrix& logk, const Vector& f, Eigen::Index j) {
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < logk.rows(); ++i) hi = std::max(hi, logk(i, j) + f[i]);
  double s = 0.0;
  for (Eigen::Index i = 0; i < logk.rows(); ++i) s += std::exp(logk(i, j) + f[i] - hi);
  return hi + std::log(s);
}

// Alternating scaling on an arbitrary positive kernel; shared by the plain
// and the centered solver. Scalings are passed in/out so the centered outer
// loop can warm-start. Returns (iterations used, final mu-side residual).
std::pair<int, double> scale_kernel(const Matrix& kernel, const Vector& mu, const Vector& nu,
                                    int max_pairs, double tol, Vector& a, Vector& b) {
  int it = 0;
  double residual = std::numeric_limits<double>::infinity();
  Vector denom;
  for (; it < max_pairs; ++it) {
    denom = kernel * b;
    check_denominator(denom);
    a = mu.cwiseQuotient(denom);
    denom = kernel.transpose() * a;
    check_denominator(denom);
    b = nu.cwiseQuotient(denom);

    // After the b-update the nu marginal is exact; report the mu side.
    residual = (a.cwiseProduct(kernel * b) - mu).cwiseAbs().maxCoeff();
    if (residual <= tol) {
      ++it;
      break;
    }
  }
  return {it, residual};
}

std::pair<int, double> scale_kernel_log(const Matrix& log_kernel, const Vector& mu,
                                        const Vector& nu, int max_pairs, double tol,
                                        Vector& f, Vector& g) {
  const Eigen::Index n = log_kernel.rows();
  const Eigen::Index m = log_kernel.cols();
  Vector log_mu = mu.array().log();
  Vector log_nu = nu.array().log();
  int it = 0;
  double residual = std::numeric_limits<double>::infinity();
  for (; it < max_pairs; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) f[i] = log_mu[i] - log_sum_exp_row(log_kernel, g, i);
    for (Eigen::Index j = 0; j < m; ++j) g[j] = log_nu[j] - log_sum_exp_col(log_kernel, f, j);

    residual = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) row += std::exp(f[i] + log_kernel(i, j) + g[j]);
      residual = std::max(residual, std::abs(row - mu[i]));
    }
    if (residual <= tol) {
      ++it;
      break;
    }
  }
  return {it, residual};
}

Matrix reconstruct(const Vector& a, const Matrix& kernel, const Vector& b) {
  return a.asDiagonal() * kernel * b.asDiagonal();
}

Matrix reconstruct_log(const Vector& f, const Matrix& log_kernel, const Vector& g) {
  Matrix t(log_kernel.rows(), log_kernel.cols());
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) t(i, j) = std::exp(f[i] + log_kernel(i, j) + g[j]);
  return t;
}

}  // namespace

std::pair<TransportPlan, SolveReport> solve_sinkhorn(const CostMatrix& cost,
                                                     const DiscreteMeasure& mu,
                                                     const DiscreteMeasure& nu,
                                                     const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.epsilon <= 0.0) throw InvalidArgument("solve_sinkhorn: epsilon must be positive");
  const int n = cost.rows();
  const int m = cost.cols();
  if (mu.size() != n || nu.size() != m)
    throw InvalidArgument("solve_sinkhorn: measure sizes do not match the cost matrix");

  const Matrix& c = cost.values();
  const double eps = cfg.epsilon;

  SolveReport report;
  Matrix t;
  if (cfg.log_domain) {
    Matrix log_kernel = (-c / eps);
    Vector f = Vector::Zero(n), g = Vector::Zero(m);
    auto [iters, residual] =
        scale_kernel_log(log_kernel, mu.weights(), nu.weights(), cfg.max_iter, cfg.tol, f, g);
    t = reconstruct_log(f, log_kernel, g);
    report.iterations = iters;
    report.marginal_residual = residual;
  } else {
    Matrix gibbs = (-c / eps).array().exp();
    Vector a = Vector::Ones(n), b = Vector::Ones(m);
    auto [iters, residual] =
        scale_kernel(gibbs, mu.weights(), nu.weights(), cfg.max_iter, cfg.tol, a, b);
    t = reconstruct(a, gibbs, b);
    report.iterations = iters;
    report.marginal_residual = residual;
  }

  TransportPlan plan(std::move(t));
  report.distance = transport_cost(plan, cost);
  report.regularized_objective = entropic_objective(plan.values(), c, eps);
  report.converged = report.marginal_residual <= cfg.tol;
  report.history.push_back({report.iterations, report.marginal_residual, report.distance});
  return {std::move(plan), std::move(report)};
}

std::pair<TransportPlan, SolveReport> solve_sinkhorn_center(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg, int outer_iter, const std::optional<Matrix>& initial_center) {
  cfg.validate();
  if (cfg.epsilon <= 0.0)
    throw InvalidArgument("solve_sinkhorn_center: epsilon must be positive");
  if (outer_iter < 0) throw InvalidArgument("solve_sinkhorn_center: outer_iter must be >= 0");
  const int n = cost.rows();
  const int m = cost.cols();
  if (mu.size() != n || nu.size() != m)
    throw InvalidArgument("solve_sinkhorn_center: measure sizes do not match the cost matrix");

  const Matrix& c = cost.values();
  const double eps = cfg.epsilon;
  const Matrix gibbs = (-c / eps).array().exp();

  // Default center: the independent coupling, feasible and strictly positive.
  Matrix t = initial_center ? *initial_center
                            : Matrix(mu.weights() * nu.weights().transpose());
  if (t.rows() != n || t.cols() != m)
    throw InvalidArgument("solve_sinkhorn_center: center shape mismatch");

  SolveReport report;
  Vector a = Vector::Ones(n), b = Vector::Ones(m);
  double residual = marginal_residual(t, mu.weights(), nu.weights());
  for (int k = 0; k < outer_iter; ++k) {
    Matrix q = t.cwiseProduct(gibbs);
    auto [pairs, res] = scale_kernel(q, mu.weights(), nu.weights(), cfg.inner_iter,
                                     0.0 /* run all inner pairs */, a, b);
    (void)pairs;
    t = reconstruct(a, q, b);
    residual = res;
    double sharp = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) sharp += t(i, j) * c(i, j);
    report.history.push_back({k + 1, residual, sharp});
  }

  TransportPlan plan(std::move(t));
  report.distance = transport_cost(plan, cost);
  report.regularized_objective = entropic_objective(plan.values(), c, eps);
  report.iterations = outer_iter;
  report.marginal_residual = residual;
  report.converged = residual <= cfg.tol;
  return {std::move(plan), std::move(report)};
}

}  // namespace ot
