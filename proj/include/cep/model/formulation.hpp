#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cep/core/system_case.hpp"
#include "cep/solver/linear_program.hpp"

namespace cep {

// Compressed sparse rows with a fixed column space.
struct RowMatrix {
  int num_cols = 0;
  std::vector<std::int64_t> start{0};
  std::vector<int> index;
  std::vector<double> value;

  int num_rows() const { return static_cast<int>(start.size()) - 1; }
  std::int64_t num_nonzeros() const { return start.back(); }
  std::span<const int> row_cols(int i) const;
  std::span<const double> row_vals(int i) const;
  double row_dot(int i, std::span<const double> x) const;
  void append_row(std::span<const int> cols, std::span<const double> vals);
};

enum class RowFamily : std::uint8_t {
  kNewCapacityLimit,
  kRetirementLimit,
  kNoRetirement,
  kCapacityDefinition,
  kDurationLimit,
  kLineExpansionLimit,
  kLineCapacityDefinition,
  kDemandBalance,
  kAvailability,
  kStorageLimit,
  kMinOutput,
  kFlowLimit,
  kCurtailmentLimit,
  kStorageBalance,
  kStorageWrap,
  kHydroBalance,
  kHydroWrap,
  kRamp,
  kRampWrap,
  kCommitmentLimit,
  kCommitmentOutput,
  kCommitmentBalance,
  kCommitmentWrap,
  kCommitmentRamp,
  kCommitmentRampWrap,
  kMinUpTime,
  kMinDownTime,
};

const char* to_string(RowFamily family);

// Column positions of the investment vector y. Entries are -1 where a
// variable does not exist for that cluster.
struct InvestmentIndex {
  std::vector<int> new_units;      // per cluster
  std::vector<int> retired_units;  // per cluster
  std::vector<int> capacity;       // per cluster, MW
  std::vector<int> energy_new;     // per storage cluster
  std::vector<int> energy_retired;
  std::vector<int> energy_capacity;  // MWh
  std::vector<int> line_new;       // per line, MW
  std::vector<int> line_capacity;  // per line, MW
  int size = 0;

  std::string describe(const SystemCase& c, int j) const;
};

// Column layout of one operational vector x_w. Every subperiod shares the
// layout; hourly variables occupy `hours` consecutive columns from their base.
struct OperationalIndex {
  int hours = 0;
  int num_segments = 0;
  std::vector<int> generation;  // per cluster
  std::vector<int> charge;      // storage
  std::vector<int> state_of_charge;
  std::vector<int> level;  // hydro
  std::vector<int> spill;
  std::vector<int> commit;  // unit commitment
  std::vector<int> start;
  std::vector<int> shut;
  std::vector<int> flow;          // per line, free sign
  std::vector<int> curtailment;   // per (zone, segment): zone * num_segments + segment
  int rps_slack = -1;
  int co2_slack = -1;
  int size = 0;

  int at(int base, int local_hour) const { return base < 0 ? -1 : base + local_hour; }
  int nse(int zone, int segment) const { return curtailment[zone * num_segments + segment]; }
  std::string describe(const SystemCase& c, int j) const;
};

struct InvestmentBlock {
  InvestmentIndex index;
  RowMatrix R;
  std::vector<RowSense> sense;
  std::vector<double> r;
  std::vector<RowFamily> family;
  std::vector<double> c0;
  std::vector<char> integer;
};

// A_w x_w + B_w y (sense) b_w, with x_w >= lower (flows are free).
struct OperationalBlock {
  int w = 0;
  RowMatrix A;
  RowMatrix B;
  std::vector<RowSense> sense;
  std::vector<double> b;
  std::vector<RowFamily> family;
  std::vector<double> c;
  std::vector<double> lower;
};

// sum_w Q_w x_w <= e, all rows in <= form.
struct PolicyBlock {
  std::vector<RowMatrix> Q;  // per subperiod
  std::vector<double> e;
  std::vector<std::string> row_names;

  int num_rows() const { return static_cast<int>(e.size()); }
};

struct CompactBlocks {
  Scenario scenario = Scenario::kRef;
  InvestmentBlock investment;
  OperationalIndex x_index;
  std::vector<OperationalBlock> operations;  // subperiod w at position w-1
  PolicyBlock policy;

  int num_subperiods() const { return static_cast<int>(operations.size()); }
  const OperationalBlock& block(int w) const { return operations.at(w - 1); }
};

InvestmentBlock build_investment_block(const SystemCase& c);
OperationalIndex make_operational_index(const SystemCase& c, Scenario scenario);
OperationalBlock build_operational_block(const SystemCase& c, const OperationalIndex& x,
                                         const InvestmentIndex& y, int w, Scenario scenario);
PolicyBlock build_policy_block(const SystemCase& c, const OperationalIndex& x, Scenario scenario);

// All blocks for a scenario; per-subperiod blocks are built by up to `workers`
// threads and stored in subperiod order.
CompactBlocks build_blocks(const SystemCase& c, Scenario scenario, int workers = 1);

// Column map of an assembled instance.
struct AssembledProgram {
  LinearProgram lp;
  std::vector<int> x_offset;  // per subperiod
  std::vector<int> q_offset;  // per subperiod, budget columns (budgeted form only)
  int coupling_row = -1;      // first coupling or budget-sum row, -1 when absent
};

AssembledProgram assemble_monolithic(const CompactBlocks& blocks, bool relax);
AssembledProgram assemble_budgeted(const CompactBlocks& blocks, bool relax);
AssembledProgram assemble_monolithic(const SystemCase& c, Scenario scenario, bool relax);
AssembledProgram assemble_budgeted(const SystemCase& c, Scenario scenario, bool relax);

// Budget vectors for a feasible point by the constructive argument:
// q_w = Q_w x_w for w >= 2 and q_1 takes the remainder of e.
std::vector<std::vector<double>> budgets_from_point(const PolicyBlock& policy,
                                                    std::span<const std::vector<double>> x);

}  // namespace cep
