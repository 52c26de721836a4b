#include "cep/solver/linear_program.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cep {

int LinearProgram::add_column(double c, double lo, double up, bool is_integer, std::string name) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(up);
  integer.push_back(is_integer ? 1 : 0);
  const int j = num_cols() - 1;
  if (!name.empty()) set_col_name(j, std::move(name));
  return j;
}

int LinearProgram::add_row(std::span<const int> cols, std::span<const double> vals, RowSense s,
                           double b, std::string name) {
  if (cols.size() != vals.size()) throw std::invalid_argument("row index/value size mismatch");
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] < 0 || cols[k] >= num_cols()) throw std::out_of_range("row references unknown column");
    row_index.push_back(cols[k]);
    row_value.push_back(vals[k]);
  }
  row_start.push_back(static_cast<std::int64_t>(row_index.size()));
  sense.push_back(s);
  rhs.push_back(b);
  const int i = num_rows() - 1;
  if (!name.empty()) set_row_name(i, std::move(name));
  return i;
}

int LinearProgram::add_row(std::initializer_list<std::pair<int, double>> entries, RowSense s,
                           double b, std::string name) {
  std::vector<int> cols;
  std::vector<double> vals;
  for (const auto& [j, v] : entries) {
    cols.push_back(j);
    vals.push_back(v);
  }
  return add_row(cols, vals, s, b, std::move(name));
}

std::span<const int> LinearProgram::row_cols(int i) const {
  return {row_index.data() + row_start[i], static_cast<std::size_t>(row_start[i + 1] - row_start[i])};
}

std::span<const double> LinearProgram::row_vals(int i) const {
  return {row_value.data() + row_start[i], static_cast<std::size_t>(row_start[i + 1] - row_start[i])};
}

double LinearProgram::row_activity(int i, std::span<const double> x) const {
  double sum = 0.0;
  for (std::int64_t k = row_start[i]; k < row_start[i + 1]; ++k) sum += row_value[k] * x[row_index[k]];
  return sum;
}

double LinearProgram::objective(std::span<const double> x) const {
  double sum = objective_offset;
  for (int j = 0; j < num_cols(); ++j) sum += cost[j] * x[j];
  return sum;
}

bool LinearProgram::has_integers() const {
  for (char flag : integer) {
    if (flag) return true;
  }
  return false;
}

std::string LinearProgram::col_name(int j) const {
  if (j < static_cast<int>(col_names_.size()) && !col_names_[j].empty()) return col_names_[j];
  return "x" + std::to_string(j);
}

std::string LinearProgram::row_name(int i) const {
  if (i < static_cast<int>(row_names_.size()) && !row_names_[i].empty()) return row_names_[i];
  return "r" + std::to_string(i);
}

void LinearProgram::set_col_name(int j, std::string name) {
  if (static_cast<int>(col_names_.size()) <= j) col_names_.resize(j + 1);
  col_names_[j] = std::move(name);
}

void LinearProgram::set_row_name(int i, std::string name) {
  if (static_cast<int>(row_names_.size()) <= i) row_names_.resize(i + 1);
  row_names_[i] = std::move(name);
}

void LinearProgram::reserve(int cols, int rows, std::int64_t nonzeros) {
  cost.reserve(cols);
  lower.reserve(cols);
  upper.reserve(cols);
  integer.reserve(cols);
  row_start.reserve(rows + 1);
  sense.reserve(rows);
  rhs.reserve(rows);
  row_index.reserve(nonzeros);
  row_value.reserve(nonzeros);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kIterationLimit: return "iteration_limit";
    case SolveStatus::kNodeLimit: return "node_limit";
    case SolveStatus::kNumericalError: return "numerical_error";
  }
  return "?";
}

void PinnedProgram::set_value(int column, double value) {
  const auto it = pin_row.find(column);
  if (it == pin_row.end()) throw std::out_of_range("column is not pinned");
  lp.rhs[it->second] = value;
}

double PinnedProgram::dual_of(const LpSolution& solution, int column) const {
  const auto it = pin_row.find(column);
  if (it == pin_row.end()) throw std::out_of_range("column is not pinned");
  return solution.row_dual.at(it->second);
}

PinnedProgram fix_columns(LinearProgram lp, const std::map<int, double>& assignments) {
  PinnedProgram out{std::move(lp), {}};
  for (const auto& [column, value] : assignments) {
    if (column < 0 || column >= out.lp.num_cols()) {
      throw std::out_of_range("cannot fix unknown column " + std::to_string(column));
    }
    const int row = out.lp.add_row({{column, 1.0}}, RowSense::kEqual, value);
    out.pin_row[column] = row;
  }
  return out;
}

namespace {

void write_number(std::ostream& out, double v) {
  if (std::isinf(v)) {
    out << (v > 0 ? "+inf" : "-inf");
  } else {
    out << v;
  }
}

}  // namespace

void write_lp_format(std::ostream& out, const LinearProgram& lp) {
  const auto old_precision = out.precision(17);
  out << "\\ written by cep\nMinimize\n obj:";
  bool any = false;
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (lp.cost[j] == 0.0) continue;
    out << (lp.cost[j] < 0 ? " - " : " + ") << std::abs(lp.cost[j]) << ' ' << lp.col_name(j);
    any = true;
  }
  if (!any) out << " 0 " << (lp.num_cols() > 0 ? lp.col_name(0) : "x0");
  out << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    out << ' ' << lp.row_name(i) << ':';
    const auto cols = lp.row_cols(i);
    const auto vals = lp.row_vals(i);
    if (cols.empty()) out << " 0 " << (lp.num_cols() > 0 ? lp.col_name(0) : "x0");
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << (vals[k] < 0 ? " - " : " + ") << std::abs(vals[k]) << ' ' << lp.col_name(cols[k]);
    }
    switch (lp.sense[i]) {
      case RowSense::kLessEqual: out << " <= "; break;
      case RowSense::kGreaterEqual: out << " >= "; break;
      case RowSense::kEqual: out << " = "; break;
    }
    write_number(out, lp.rhs[i]);
    out << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_cols(); ++j) {
    out << ' ';
    if (std::isinf(lp.lower[j]) && std::isinf(lp.upper[j])) {
      out << lp.col_name(j) << " free\n";
      continue;
    }
    write_number(out, lp.lower[j]);
    out << " <= " << lp.col_name(j) << " <= ";
    write_number(out, lp.upper[j]);
    out << '\n';
  }
  if (lp.has_integers()) {
    out << "General\n";
    for (int j = 0; j < lp.num_cols(); ++j) {
      if (lp.integer[j]) out << ' ' << lp.col_name(j) << '\n';
    }
  }
  out << "End\n";
  out.precision(old_precision);
}

}  // namespace cep
