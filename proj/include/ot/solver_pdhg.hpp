#pragma once

#include <tuple>

#include "ot/core.hpp"

namespace ot {

/// Matrix-free constraint operator K of the transport LP: maps the
/// vectorized plan t = vec(T) (row-major) to its stacked marginals
/// (T 1_m ; T' 1_n).
struct MarginalOperator {
  int n = 0;
  int m = 0;

  /// out (n+m) = (row sums ; column sums) of reshape(t, n x m).
  void apply(const Vector& t, Vector& out) const;
  /// out (n*m) with out[i*m+j] = lambda1_i + lambda2_j.
  void apply_adjoint(const Vector& lambda, Vector& out) const;
};

/// Tight upper bound sqrt(n + m) on the spectral norm of K; the all-ones
/// plan attains eigenvalue n + m of K'K.
double operator_norm_bound(const MarginalOperator& op);

/// Unregularized transport LP solved as a saddle-point problem by the
/// primal-dual hybrid gradient iteration: primal step tau, projection onto
/// t >= 0, extrapolation factor 1, dual step sigma = 1/(tau L^2). Stops when
/// the marginal residual drops below cfg.tol. The returned potentials are
/// the multipliers flipped into the standard dual orientation
/// (alpha_i + beta_j <= C_ij).
std::tuple<TransportPlan, DualPotentials, SolveReport> solve_pdhg(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg);

}  // namespace ot
