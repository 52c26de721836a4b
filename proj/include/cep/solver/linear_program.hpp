#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cep {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { kLessEqual, kGreaterEqual, kEqual };

// Sparse minimization problem   min c'x + offset  s.t.  rows (sense) rhs,  lower <= x <= upper.
// Rows are stored in compressed row form; names are optional.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<char> integer;

  std::vector<std::int64_t> row_start{0};
  std::vector<int> row_index;
  std::vector<double> row_value;
  std::vector<RowSense> sense;
  std::vector<double> rhs;

  double objective_offset = 0.0;

  int num_cols() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
  std::int64_t num_nonzeros() const { return row_start.back(); }

  int add_column(double c, double lo = 0.0, double up = kInf, bool is_integer = false,
                 std::string name = {});
  int add_row(std::span<const int> cols, std::span<const double> vals, RowSense s, double b,
              std::string name = {});
  int add_row(std::initializer_list<std::pair<int, double>> entries, RowSense s, double b,
              std::string name = {});

  std::span<const int> row_cols(int i) const;
  std::span<const double> row_vals(int i) const;

  double row_activity(int i, std::span<const double> x) const;
  double objective(std::span<const double> x) const;
  bool has_integers() const;

  std::string col_name(int j) const;
  std::string row_name(int i) const;
  void set_col_name(int j, std::string name);
  void set_row_name(int i, std::string name);

  void reserve(int cols, int rows, std::int64_t nonzeros);

 private:
  std::vector<std::string> col_names_;
  std::vector<std::string> row_names_;
};

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kNodeLimit,
  kNumericalError,
};

const char* to_string(SolveStatus status);

enum class BasisStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

// Simplex basis: one status per column and one per row logical (slack).
struct Basis {
  std::vector<BasisStatus> cols;
  std::vector<BasisStatus> rows;

  bool empty() const { return cols.empty() && rows.empty(); }
  bool operator==(const Basis&) const = default;
};

struct LpSolution {
  SolveStatus status = SolveStatus::kNumericalError;
  std::vector<double> x;
  double objective = 0.0;
  // Row multipliers, d(objective)/d(rhs): <= rows carry duals <= 0, >= rows
  // duals >= 0, equality rows are free.
  std::vector<double> row_dual;
  std::vector<double> reduced_cost;
  std::vector<double> row_activity;
  Basis basis;
  bool is_vertex = false;
  long iterations = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-7;
  int refactor_interval = 100;
  int bland_after_degenerate = 60;
  long max_iterations = 0;  // 0 selects a size-based limit
  bool scale = true;
};

// Bounded primal simplex. Optimal results are vertex solutions with duals.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {},
                    const Basis* warm_start = nullptr);

// Result of pinning columns with equality rows `x_j = v`; the duals of the
// pinning rows are the sensitivities of the optimum to each pinned value.
struct PinnedProgram {
  LinearProgram lp;
  std::map<int, int> pin_row;  // column -> row

  void set_value(int column, double value);
  double dual_of(const LpSolution& solution, int column) const;
};

// Throws std::out_of_range for unknown columns. An empty map leaves the rows unchanged.
PinnedProgram fix_columns(LinearProgram lp, const std::map<int, double>& assignments);

// CPLEX LP text format, for cross-checking with external tools.
void write_lp_format(std::ostream& out, const LinearProgram& lp);

}  // namespace cep
