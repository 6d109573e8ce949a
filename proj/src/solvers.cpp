#include "ot/solvers.hpp"

namespace ot {

const char* solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Pdhg: return "pdhg";
    case SolverKind::Sinkhorn: return "sinkhorn";
    case SolverKind::SinkhornCenter: return "sinkhorn-center";
    case SolverKind::Fista: return "fista";
    case SolverKind::FistaCenter: return "fista-center";
  }
  return "unknown";
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "pdhg") return SolverKind::Pdhg;
  if (name == "sinkhorn") return SolverKind::Sinkhorn;
  if (name == "sinkhorn-center") return SolverKind::SinkhornCenter;
  if (name == "fista") return SolverKind::Fista;
  if (name == "fista-center") return SolverKind::FistaCenter;
  throw InvalidArgument("unknown solver: " + name);
}

SolveResult run_solver(SolverKind kind, const CostMatrix& cost, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, const SolverConfig& cfg, int outer_iter) {
  switch (kind) {
    case SolverKind::Pdhg: {
      auto [plan, pots, report] = solve_pdhg(cost, mu, nu, cfg);
      return {std::move(plan), std::move(pots), std::move(report)};
    }
    case SolverKind::Sinkhorn: {
      auto [plan, report] = solve_sinkhorn(cost, mu, nu, cfg);
      return {std::move(plan), DualPotentials{}, std::move(report)};
    }
    case SolverKind::SinkhornCenter: {
      auto [plan, report] = solve_sinkhorn_center(cost, mu, nu, cfg, outer_iter);
      return {std::move(plan), DualPotentials{}, std::move(report)};
    }
    case SolverKind::Fista: {
      auto [plan, pots, report] = solve_fista(cost, mu, nu, cfg);
      return {std::move(plan), std::move(pots), std::move(report)};
    }
    case SolverKind::FistaCenter: {
      auto [plan, pots, report] = solve_fista_center(cost, mu, nu, cfg, outer_iter);
      return {std::move(plan), std::move(pots), std::move(report)};
    }
  }
  throw InvalidArgument("run_solver: unknown solver kind");
}

}  // namespace ot
