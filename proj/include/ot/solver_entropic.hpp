#pragma once

#include <utility>

#include "ot/core.hpp"

namespace ot {

/// Diagonal scalings and the Gibbs kernel exp(-C/eps) of an entropic solve.
/// The plan factors as diag(a) * gibbs * diag(b) with a on the mu side.
struct ScalingState {
  Vector a;
  Vector b;
  Matrix gibbs;
};

/// Entropy-regularized transport by alternating scaling. Updates run
///   a <- mu ./ (gibbs b),   b <- nu ./ (gibbs' a)
/// from b = 1 until the mu-side marginal residual falls below cfg.tol
/// (the nu marginal is exact after every b-update). With
/// cfg.log_domain the same updates run on log a, log b through
/// log-sum-exp, which cannot underflow; otherwise any denominator
/// below 1e-300 raises NumericalUnderflow.
///
/// report.distance is the sharp cost <T,C>; report.regularized_objective
/// adds eps * sum T log T.
std::pair<TransportPlan, SolveReport> solve_sinkhorn(const CostMatrix& cost,
                                                     const DiscreteMeasure& mu,
                                                     const DiscreteMeasure& nu,
                                                     const SolverConfig& cfg);

/// Proximal variant: each outer step rescales the kernel by the previous
/// plan, Q = T_k (entrywise*) gibbs, runs cfg.inner_iter scaling pairs on Q
/// and sets T_{k+1} = diag(a) Q diag(b). The plan center drives the iterates
/// toward the unregularized optimum even for large eps. outer_iter = 0
/// returns the starting center unchanged; the default center is the
/// independent coupling mu nu'.
std::pair<TransportPlan, SolveReport> solve_sinkhorn_center(
    const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
    const SolverConfig& cfg, int outer_iter,
    const std::optional<Matrix>& initial_center = std::nullopt);

}  // namespace ot
