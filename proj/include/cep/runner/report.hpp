#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cep/benders/benders.hpp"
#include "cep/core/system_case.hpp"

namespace cep {

enum class Method { kMonolithic, kBenders, kBendersClassic };

const char* to_string(Method method);
Method parse_method(const std::string& text);  // throws std::invalid_argument

struct RunOptions {
  bool relax = false;
  double rel_tol = 1e-3;
  int k_max = 1000;
  double mip_gap = 1e-4;
  int workers = 1;
  bool lp_warmup = true;  // decomposed methods with integer investments
};

struct CostBreakdown {
  double fixed = 0.0;     // investment and fixed O&M
  double variable = 0.0;  // weighted variable cost of generation and charging
  double nse = 0.0;       // weighted curtailment cost
  double startup = 0.0;   // weighted start-up cost
  double policy_penalty = 0.0;

  double total() const { return fixed + variable + nse + startup + policy_penalty; }
};

struct ClusterInvestment {
  std::string id;
  std::string zone;
  std::string type;
  double new_units = 0.0;
  double retired_units = 0.0;
  double capacity = 0.0;         // MW
  double energy_capacity = 0.0;  // MWh, storage only
};

struct LineInvestment {
  std::string id;
  double new_capacity = 0.0;
  double capacity = 0.0;
};

// Hourly operating decisions over the global hour index. Per-cluster series
// are empty where the variable does not exist for that cluster.
struct Dispatch {
  std::vector<std::vector<double>> generation;  // [cluster][hour-1]
  std::vector<std::vector<double>> charge;
  std::vector<std::vector<double>> state_of_charge;
  std::vector<std::vector<double>> level;
  std::vector<std::vector<double>> spill;
  std::vector<std::vector<double>> commit;
  std::vector<std::vector<double>> start;
  std::vector<std::vector<double>> shut;
  std::vector<std::vector<double>> flow;              // [line][hour-1]
  std::vector<std::vector<std::vector<double>>> nse;  // [zone][segment][hour-1]
  std::vector<double> policy_slack;                   // per subperiod, empty under ref
};

struct SolveReport {
  std::string case_name;
  Method method = Method::kMonolithic;
  Scenario scenario = Scenario::kRef;
  bool relax = false;
  std::vector<int> weeks;
  std::vector<double> weights;
  std::string status;
  bool converged = false;
  double objective = kInf;
  double lower_bound = -kInf;
  double gap = kInf;
  int iterations = 0;
  CostBreakdown costs;
  double emissions = 0.0;        // tons, alpha-weighted
  double rps_share = 0.0;        // qualifying generation over demand, alpha-weighted
  double weighted_demand = 0.0;  // MWh
  std::vector<ClusterInvestment> clusters;
  std::vector<LineInvestment> lines;
  std::vector<IterationRecord> trace;
  Dispatch dispatch;
  double total_ms = 0.0;
};

// Builds the scenario's model, solves it with `method` and fills the report
// from the returned investments and dispatch. Solver failures are rethrown
// as std::runtime_error prefixed with the method name.
SolveReport run(Method method, const SystemCase& c, Scenario scenario, const RunOptions& options = {});

// Root of the summed squared capacity differences over clusters (MW), overall
// and grouped by resource type. Throws std::invalid_argument when the reports
// cover different cluster ids.
struct CapacityMse {
  double total = 0.0;
  std::map<std::string, double> by_type;
};
CapacityMse compute_capacity_mse(const SolveReport& report, const SolveReport& reference);

// Trace as comma separated text: iteration, elapsed_ms, ub, lb, gap.
void emit_trace(const SolveReport& report, const std::filesystem::path& path);

// Dispatch in long form: hour, variable, entity, value.
void emit_dispatch(const SolveReport& report, const SystemCase& c, const std::filesystem::path& path);

// Stable key order; everything outside "timings" is reproducible for a fixed
// worker count and input.
nlohmann::ordered_json report_to_json(const SolveReport& report);
// Inverse of report_to_json for the summary fields, investments and trace;
// the dispatch is not part of the JSON.
SolveReport report_from_json(const nlohmann::ordered_json& j);

void write_report(const SolveReport& report, const std::filesystem::path& path);
SolveReport read_report(const std::filesystem::path& path);

}  // namespace cep
