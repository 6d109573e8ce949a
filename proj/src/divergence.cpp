#include "ot/divergence.hpp"

#include <cmath>

#include "ot/costs.hpp"

namespace ot {

DivergenceReport sinkhorn_divergence(const SampleBatch& x, const SampleBatch& y,
                                     CostKind kind, const SolverConfig& cfg,
                                     SolverKind solver, int outer_iter,
                                     bool use_sharp_distance) {
  if (solver == SolverKind::Pdhg)
    throw InvalidArgument("sinkhorn_divergence needs a regularized solver");

  const DiscreteMeasure mu = uniform_measure(x.size());
  const DiscreteMeasure nu = uniform_measure(y.size());

  auto solve_pair = [&](const SampleBatch& a, const SampleBatch& b,
                        const DiscreteMeasure& ma, const DiscreteMeasure& mb) {
    CostMatrix c = pairwise_cost(a, b, kind);
    return run_solver(solver, c, ma, mb, cfg, outer_iter).report;
  };

  DivergenceReport out;
  out.report_xy = solve_pair(x, y, mu, nu);
  out.report_xx = solve_pair(x, x, mu, mu);
  out.report_yy = solve_pair(y, y, nu, nu);

  auto component = [&](const SolveReport& r) {
    return use_sharp_distance ? r.distance : r.regularized_objective;
  };
  out.w_xy = component(out.report_xy);
  out.w_xx = component(out.report_xx);
  out.w_yy = component(out.report_yy);
  out.value = 2.0 * out.w_xy - out.w_xx - out.w_yy;
  return out;
}

Matrix plan_gradient(const TransportPlan& plan, const SampleBatch& x, const SampleBatch& y,
                     CostKind kind) {
  if (kind == CostKind::SSIM) throw Unsupported("plan_gradient: SSIM gradient not supported");
  if (x.dim() != y.dim()) throw InvalidArgument("plan_gradient: feature dimensions differ");
  if (plan.rows() != x.size() || plan.cols() != y.size())
    throw InvalidArgument("plan_gradient: plan shape does not match the batches");

  const Matrix& t = plan.values();
  const Matrix& xd = x.data();
  const Matrix& yd = y.data();
  const int n = x.size();
  const int m = y.size();
  const int d = x.dim();

  Vector x_norm, y_norm;
  if (kind == CostKind::Cosine) {
    x_norm = xd.rowwise().norm();
    y_norm = yd.rowwise().norm();
    for (int i = 0; i < n; ++i)
      if (x_norm[i] == 0.0) throw DegenerateInput("plan_gradient: zero-norm sample row");
    for (int j = 0; j < m; ++j)
      if (y_norm[j] == 0.0) throw DegenerateInput("plan_gradient: zero-norm sample row");
  }

  Matrix grad = Matrix::Zero(m, d);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      const double w = t(i, j);
      if (w == 0.0) continue;
      switch (kind) {
        case CostKind::SquaredL2:
          grad.row(j) += 2.0 * w * (yd.row(j) - xd.row(i));
          break;
        case CostKind::L2: {
          const double dist = std::max((yd.row(j) - xd.row(i)).norm(), 1e-12);
          grad.row(j) += (w / dist) * (yd.row(j) - xd.row(i));
          break;
        }
        case CostKind::L1:
          for (int k = 0; k < d; ++k) {
            const double diff = yd(j, k) - xd(i, k);
            // Subgradient 0 at exact ties.
            grad(j, k) += w * (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0));
          }
          break;
        case CostKind::Cosine: {
          // d/dy [1 - <x,y>/(|x||y|)] = (cos(x,y) * y/|y| - x/|x|) / |y|
          const double dot = xd.row(i).dot(yd.row(j));
          const double cosine = dot / (x_norm[i] * y_norm[j]);
          grad.row(j) +=
              (w / y_norm[j]) * (cosine * yd.row(j) / y_norm[j] - xd.row(i) / x_norm[i]);
          break;
        }
        case CostKind::SSIM:
          break;  // unreachable
      }
    }
  }
  return grad;
}

}  // namespace ot
