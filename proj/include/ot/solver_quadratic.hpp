#pragma once

#include <tuple>

#include "ot/core.hpp"

namespace ot {

/// Accelerated-gradient bookkeeping for the quadratic dual ascent.
struct FistaState {
  Vector alpha;
  Vector beta;
  Vector alpha_prev;
  Vector beta_prev;
  double step_bound = 0.0;  // L = (n + m) / eps, gradient Lipschitz bound
  int momentum_index = 1;   // extrapolation factor (k-1)/(k+2)
};

/// Dual objective of quadratically regularized transport with a proximal
/// center:  a'mu + b'nu - sum_ij phi(x_ij)  where x = alpha_i + beta_j - C_ij
/// and phi is the partial maximum over plan entries t >= 0 of
/// t*x - (eps/2)(t - center)^2. A zero center gives the plain dual with
/// phi(x) = [x]_+^2 / (2 eps).
double quadratic_dual_objective(const Matrix& cost, const Vector& mu, const Vector& nu,
                                double eps, const Matrix& center, const Vector& alpha,
                                const Vector& beta);

/// Gradient of the centered dual: (mu - row sums, nu - column sums) of the
/// implied plan [center + x/eps]_+.
void quadratic_dual_gradient(const Matrix& cost, const Vector& mu, const Vector& nu,
                             double eps, const Matrix& center, const Vector& alpha,
                             const Vector& beta, Vector& grad_alpha, Vector& grad_beta);

/// Plan implied by potentials: [center + (alpha_i + beta_j - C_ij)/eps]_+.
Matrix quadratic_plan(const Matrix& cost, double eps, const Matrix& center,
                      const Vector& alpha, const Vector& beta);

/// Quadratically regularized transport solved in the dual by FISTA with
/// fixed step 1/L, L = (n+m)/eps. Stops when the marginal residual of the
/// recovered plan falls below cfg.tol.
std::tuple<TransportPlan, DualPotentials, SolveReport> solve_fista(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg);

/// Proximal-center variant: outer steps move the quadratic penalty's center
/// to the previous plan; each subproblem runs at most cfg.inner_iter FISTA
/// iterations (early exit on cfg.tol). The default center update keeps the
/// previous plan inside the positive part, T <- [T + x/eps]_+, matching the
/// closed form of the inner maximization; literal_center_update drops the
/// center term from the final plan-recovery line instead.
std::tuple<TransportPlan, DualPotentials, SolveReport> solve_fista_center(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg, int outer_iter, bool literal_center_update = false);

}  // namespace ot
