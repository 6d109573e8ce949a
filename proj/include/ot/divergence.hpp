#pragma once

#include "ot/core.hpp"
#include "ot/solvers.hpp"

namespace ot {

/// Debiased transport distance 2 W(mu,nu) - W(mu,mu) - W(nu,nu), all three
/// terms solved with the same configuration.
struct DivergenceReport {
  double value = 0.0;
  double w_xy = 0.0;
  double w_xx = 0.0;
  double w_yy = 0.0;
  SolveReport report_xy;
  SolveReport report_xx;
  SolveReport report_yy;
};

/// The W components default to the regularized objectives of the three
/// solves; use_sharp_distance switches them to the plain transport cost.
/// Only the regularized solver family is accepted.
DivergenceReport sinkhorn_divergence(const SampleBatch& x, const SampleBatch& y,
                                     CostKind kind, const SolverConfig& cfg,
                                     SolverKind solver, int outer_iter = 100,
                                     bool use_sharp_distance = false);

/// Gradient of sum_ij T_ij c(x_i, y_j) with respect to the rows of Y, with
/// the plan held fixed. One output row per row of Y. SSIM is unsupported.
Matrix plan_gradient(const TransportPlan& plan, const SampleBatch& x, const SampleBatch& y,
                     CostKind kind);

}  // namespace ot
