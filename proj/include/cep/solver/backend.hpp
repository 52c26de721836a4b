#pragma once

#include <memory>
#include <span>
#include <string>

#include "cep/solver/linear_program.hpp"
#include "cep/solver/milp.hpp"

namespace cep {

// Solver adapter. Implementations must be safe to call concurrently on
// distinct problems.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual std::string name() const = 0;
  virtual LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options,
                              const Basis* warm_start) const = 0;
  // `start` is an optional feasible point offered as the first incumbent.
  virtual MilpSolution solve_milp(const LinearProgram& lp, const MilpOptions& options,
                                  const Basis* warm_root, std::span<const double> start = {}) const = 0;
};

class SimplexBackend final : public LpBackend {
 public:
  std::string name() const override { return "simplex"; }
  LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options,
                      const Basis* warm_start) const override {
    return cep::solve_lp(lp, options, warm_start);
  }
  MilpSolution solve_milp(const LinearProgram& lp, const MilpOptions& options, const Basis* warm_root,
                          std::span<const double> start = {}) const override {
    return cep::solve_milp(lp, options, warm_root, start);
  }
};

std::shared_ptr<const LpBackend> default_backend();

}  // namespace cep
