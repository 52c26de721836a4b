#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cep/model/formulation.hpp"
#include "cep/solver/backend.hpp"
#include "cep/solver/milp.hpp"

namespace cep {

// One optimality cut:
//   theta >= f + pi'(y - y_anchor) + lambda'(q - q_anchor).
struct CutRecord {
  int w = 0;  // subperiod, 0 for the aggregated cut of the classic variant
  int j = 0;  // iteration that produced it
  double f = 0.0;
  std::vector<double> pi;      // per investment column
  std::vector<double> lambda;  // per coupling row
  std::vector<double> y_anchor;
  std::vector<double> q_anchor;

  double evaluate(std::span<const double> y, std::span<const double> q) const;
};

struct MasterSolution {
  SolveStatus status = SolveStatus::kNumericalError;
  std::vector<double> y;
  std::vector<std::vector<double>> q;  // per subperiod, empty without coupling rows
  std::vector<double> theta;
  double objective = kInf;
  double bound = -kInf;
};

// min c0'y + sum theta  s.t.  R y <= r, sum_w q_w = e, stored cuts.
// With `budgets` false there are no q columns (classic variant or no coupling).
class MasterProblem {
 public:
  MasterProblem(const CompactBlocks& blocks, int num_theta, bool budgets, bool relax);

  int num_theta() const { return static_cast<int>(theta_col_.size()); }
  int num_cuts() const { return num_cuts_; }
  int y_col(int j) const { return j; }
  int theta_col(int slot) const { return theta_col_.at(slot); }
  int q_col(int w, int k) const { return q_col_.at(w - 1) + k; }
  bool has_budgets() const { return !q_col_.empty(); }

  // Cut slot is w - 1 for subperiod cuts, 0 for the aggregated cut.
  void add_cut(const CutRecord& cut);
  // `relaxed` drops integrality for this solve only.
  MasterSolution solve(const MilpOptions& options, const LpBackend& backend, bool relaxed = false);

  const LinearProgram& program() const { return lp_; }

 private:
  const CompactBlocks* blocks_;
  LinearProgram lp_;
  std::vector<int> theta_col_;
  std::vector<int> q_col_;
  int num_cuts_ = 0;
  int first_cut_row_ = 0;
  std::vector<int> cut_theta_;  // theta column of each cut row
  Basis warm_;
  std::vector<double> last_x_;
};

struct SubproblemResult {
  SolveStatus status = SolveStatus::kNumericalError;
  double f = 0.0;
  std::vector<double> pi;      // dense over investment columns
  std::vector<double> lambda;  // per coupling row (budgeted) or empty
  std::vector<double> x;       // operational vector(s), concatenated by subperiod
  long iterations = 0;
  double solve_ms = 0.0;
};

// Operational LP with investments (and budgets) pinned by equality rows whose
// duals are the cut slopes. Keeps its last basis for warm starts.
class Subproblem {
 public:
  // Budgeted subproblem of subperiod w.
  Subproblem(const CompactBlocks& blocks, int w);
  // Coupled subproblem over every subperiod, including the coupling rows.
  static Subproblem coupled(const CompactBlocks& blocks);

  SubproblemResult solve(std::span<const double> y, std::span<const double> q,
                         const LpBackend& backend, bool keep_x = false,
                         const SimplexOptions& options = {});
  int w() const { return w_; }

 private:
  Subproblem() = default;
  void pin_investments(const CompactBlocks& blocks);

  int w_ = 0;
  int m_ = 0;
  int num_x_ = 0;
  PinnedProgram program_;
  std::vector<int> y_copy_;  // investment column -> subproblem column, -1 if unused
  std::vector<int> q_copy_;
  Basis warm_;
};

struct BendersOptions {
  double rel_tol = 1e-3;
  int k_max = 1000;
  double mip_gap = 1e-4;
  int workers = 1;
  bool relax = false;
  SimplexOptions lp;
  // Order in which subproblems are dispatched; empty means 1..|W|.
  std::vector<int> dispatch_order;
  // Keep every cut in the result (used by validation tooling).
  bool keep_cuts = false;
  // With integer investments, iterate on the relaxed master first until its
  // bounds are within rel_tol, then switch to the integer master.
  bool lp_warmup = true;
};

struct IterationRecord {
  int k = 0;
  double ub = kInf;
  double lb = -kInf;
  double gap = kInf;
  double elapsed_ms = 0.0;
  double master_ms = 0.0;
  std::vector<double> subproblem_ms;  // per subperiod (one entry for the classic variant)
};

struct BendersState {
  int k = 0;
  double ub = kInf;
  double lb = -kInf;
  std::vector<double> y;               // current master proposal
  std::vector<std::vector<double>> q;  // current budgets
  std::vector<double> best_y;          // UB-attaining iterate
  std::vector<std::vector<double>> best_q;
  std::vector<IterationRecord> trace;
};

struct BendersResult {
  bool converged = false;
  int iterations = 0;
  double ub = kInf;
  double lb = -kInf;
  double gap = kInf;
  std::vector<double> y;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> x;  // dispatch per subperiod at the UB iterate
  std::vector<IterationRecord> trace;
  std::vector<CutRecord> cuts;
};

// (UB - LB) / LB. Throws std::domain_error when LB <= 0; callers then compare
// UB - LB against the tolerance directly.
double optimality_gap(double ub, double lb);

// Gap used by the stopping rule: relative when LB > 0, absolute otherwise.
double stopping_gap(double ub, double lb);

enum class BendersVariant { kBudgetedMultiCut, kClassic };

class BendersEngine {
 public:
  BendersEngine(const CompactBlocks& blocks, BendersVariant variant, BendersOptions options,
                std::shared_ptr<const LpBackend> backend = nullptr);
  ~BendersEngine();

  // Runs one master solve and one round of subproblems; true once converged.
  bool step();
  BendersResult run();

  const BendersState& state() const { return state_; }
  const MasterProblem& master() const { return master_; }
  const std::vector<CutRecord>& cuts() const { return cuts_; }
  bool converged() const { return converged_; }

 private:
  BendersResult finish();

  const CompactBlocks& blocks_;
  BendersVariant variant_;
  BendersOptions options_;
  std::shared_ptr<const LpBackend> backend_;
  MasterProblem master_;
  std::vector<Subproblem> subproblems_;
  BendersState state_;
  std::vector<CutRecord> cuts_;
  bool converged_ = false;
  bool warming_up_ = false;
  double relaxed_ub_ = kInf;
  double started_ms_ = 0.0;
};

BendersResult run_benders(const CompactBlocks& blocks, const BendersOptions& options = {});
BendersResult run_classic_benders(const CompactBlocks& blocks, const BendersOptions& options = {});

}  // namespace cep
