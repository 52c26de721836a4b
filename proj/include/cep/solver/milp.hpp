#pragma once

#include <span>
#include <vector>

#include "cep/solver/linear_program.hpp"

namespace cep {

struct MilpOptions {
  double gap_tol = 1e-4;  // (incumbent - bound) / max(1, |bound|)
  long node_limit = 200000;
  double integrality_tol = 1e-6;
  SimplexOptions lp;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kNumericalError;
  std::vector<double> x;  // incumbent
  double objective = kInf;
  double bound = -kInf;  // proven lower bound
  double gap = kInf;
  long nodes = 0;  // LP relaxations solved after the root
  std::vector<double> bound_trace;
  Basis root_basis;

  bool has_incumbent() const { return !x.empty(); }
};

// Best-bound branch and bound on LP relaxations with pseudocost branching.
// Columns without the integer flag stay continuous; a problem without integer
// columns is a single LP. A feasible `start` becomes the initial incumbent and
// is ignored otherwise.
MilpSolution solve_milp(const LinearProgram& lp, const MilpOptions& options = {},
                        const Basis* warm_root = nullptr, std::span<const double> start = {});

}  // namespace cep
