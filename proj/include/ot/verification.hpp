#pragma once

#include <functional>

#include "ot/core.hpp"

namespace ot {

/// Joint primal-dual optimality evidence for a (plan, potentials) pair.
struct Certificate {
  double primal_value = 0.0;        // <T,C>
  double dual_value = 0.0;          // alpha'mu + beta'nu
  double gap = 0.0;                 // |primal - dual|
  double max_dual_violation = 0.0;  // max_ij (alpha_i + beta_j - C_ij)
  double max_marginal_residual = 0.0;
};

/// Exact Wasserstein value for uniform marginals on n = m <= 8 atoms by
/// enumerating all permutation plans. Ties break to the lexicographically
/// smallest permutation so golden files are stable.
std::pair<double, TransportPlan> exact_uniform_wasserstein(const CostMatrix& cost);

/// Optimal dual potentials of the uniform assignment LP via Kuhn-Munkres.
/// Returned potentials are feasible (alpha_i + beta_j <= C_ij) and their
/// dual value equals the exact primal value. Independent of the iterative
/// solvers; used to certify oracle plans in tests.
DualPotentials exact_uniform_potentials(const CostMatrix& cost);

Certificate certify(const TransportPlan& plan, const DualPotentials& potentials,
                    const CostMatrix& cost, const DiscreteMeasure& mu,
                    const DiscreteMeasure& nu);

/// Central finite differences of f at point, one coordinate at a time.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                  const Vector& point, double step);

}  // namespace ot
