#pragma once

#include <string>

#include "ot/solver_entropic.hpp"
#include "ot/solver_pdhg.hpp"
#include "ot/solver_quadratic.hpp"

namespace ot {

enum class SolverKind { Pdhg, Sinkhorn, SinkhornCenter, Fista, FistaCenter };

const char* solver_kind_name(SolverKind kind);
SolverKind parse_solver_kind(const std::string& name);

/// Uniform front end over the solver family. outer_iter only applies to the
/// centered variants. Potentials are empty for solvers that do not produce
/// them (Sinkhorn family).
struct SolveResult {
  TransportPlan plan;
  DualPotentials potentials;
  SolveReport report;
};

SolveResult run_solver(SolverKind kind, const CostMatrix& cost, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, const SolverConfig& cfg, int outer_iter);

}  // namespace ot
