#include "cep/solver/milp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

namespace cep {

namespace {

struct BoundChange {
  int col;
  double lower;
  double upper;
};

struct Node {
  std::vector<BoundChange> changes;
  double bound;
  int depth;
  long id;
  std::shared_ptr<const Basis> basis;
  // branching that created the node, for pseudocost updates
  int branch_col = -1;
  bool up = false;
  double distance = 0.0;
  double parent_objective = 0.0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInf;
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(bound));
}

// Per-column objective degradation per unit of rounding distance.
class Pseudocosts {
 public:
  explicit Pseudocosts(int n) : sum_{std::vector<double>(n), std::vector<double>(n)},
                                count_{std::vector<int>(n), std::vector<int>(n)} {}

  void record(int j, bool up, double gain_per_unit) {
    sum_[up][j] += std::max(0.0, gain_per_unit);
    ++count_[up][j];
    total_[up] += std::max(0.0, gain_per_unit);
    ++total_count_[up];
  }
  bool reliable(int j) const { return count_[0][j] > 0 && count_[1][j] > 0; }
  double estimate(int j, bool up) const {
    if (count_[up][j] > 0) return sum_[up][j] / count_[up][j];
    return total_count_[up] > 0 ? total_[up] / total_count_[up] : 1.0;
  }

 private:
  std::vector<double> sum_[2];
  std::vector<int> count_[2];
  double total_[2] = {0.0, 0.0};
  long total_count_[2] = {0, 0};
};

struct BranchChoice {
  int col = -1;
  double value = 0.0;
  double down_bound = -kInf;
  double up_bound = -kInf;
  bool down_infeasible = false;
  bool up_infeasible = false;
};

class BranchAndBound {
 public:
  BranchAndBound(const LinearProgram& lp, const MilpOptions& options)
      : root_(lp), work_(lp), opt_(options), pseudo_(lp.num_cols()) {}

  MilpSolution run(const Basis* warm_root, std::span<const double> start);

 private:
  static constexpr int kStrongCandidates = 8;

  void apply(const std::vector<BoundChange>& changes) {
    work_.lower = root_.lower;
    work_.upper = root_.upper;
    for (const auto& c : changes) {
      work_.lower[c.col] = std::max(work_.lower[c.col], c.lower);
      work_.upper[c.col] = std::min(work_.upper[c.col], c.upper);
    }
  }

  // Warm solve, then cold, then cold without scaling.
  LpSolution solve(const Basis* warm) {
    auto retry = [](const LpSolution& s) {
      return s.status == SolveStatus::kNumericalError || s.status == SolveStatus::kIterationLimit;
    };
    LpSolution sol = solve_lp(work_, opt_.lp, warm);
    if (retry(sol) && warm) sol = solve_lp(work_, opt_.lp, nullptr);
    if (retry(sol) && opt_.lp.scale) {
      SimplexOptions plain = opt_.lp;
      plain.scale = false;
      sol = solve_lp(work_, plain, nullptr);
    }
    return sol;
  }

  double fraction(double v) const { return std::abs(v - std::round(v)); }

  BranchChoice choose_branch(const LpSolution& sol);

  // Fix integer columns to a rounding of x and solve for the continuous part.
  void try_rounding(const std::vector<double>& x, const Basis* warm, bool use_floor) {
    const auto saved_lower = work_.lower;
    const auto saved_upper = work_.upper;
    for (int j = 0; j < root_.num_cols(); ++j) {
      if (!root_.integer[j]) continue;
      double v = use_floor ? std::floor(x[j] + opt_.integrality_tol) : std::round(x[j]);
      v = std::clamp(v, work_.lower[j], work_.upper[j]);
      work_.lower[j] = v;
      work_.upper[j] = v;
    }
    const LpSolution sol = solve_lp(work_, opt_.lp, warm);
    if (sol.optimal()) offer(sol.x, sol.objective);
    work_.lower = saved_lower;
    work_.upper = saved_upper;
  }

  void offer(const std::vector<double>& x, double objective) {
    if (objective < incumbent_obj_) {
      incumbent_obj_ = objective;
      incumbent_ = x;
    }
  }

  bool feasible_start(std::span<const double> x) const;

  // Moving a nonbasic integer column k units off its bound costs at least
  // k * |reduced cost|; bounds beyond the incumbent's reach are tightened.
  void fix_by_reduced_cost(const LpSolution& sol, std::vector<BoundChange>& changes) const {
    if (!std::isfinite(incumbent_obj_) || sol.reduced_cost.empty()) return;
    const double room = incumbent_obj_ - sol.objective;
    if (room < 0.0) return;
    for (int j = 0; j < root_.num_cols(); ++j) {
      if (!root_.integer[j]) continue;
      const double d = sol.reduced_cost[j];
      const double lo = work_.lower[j], up = work_.upper[j];
      if (d > 1e-9 && std::isfinite(lo) && sol.x[j] <= lo + opt_.integrality_tol) {
        const double reach = lo + std::floor(room / d + 1e-6);
        if (reach < up) changes.push_back({j, -kInf, reach});
      } else if (d < -1e-9 && std::isfinite(up) && sol.x[j] >= up - opt_.integrality_tol) {
        const double reach = up - std::floor(room / -d + 1e-6);
        if (reach > lo) changes.push_back({j, reach, kInf});
      }
    }
  }

  // Re-solve with the integer columns pinned to exact integers so the reported
  // incumbent is integral and its continuous part consistent.
  void polish() {
    if (incumbent_.empty()) return;
    work_.lower = root_.lower;
    work_.upper = root_.upper;
    for (int j = 0; j < root_.num_cols(); ++j) {
      if (!root_.integer[j]) continue;
      const double v = std::round(incumbent_[j]);
      work_.lower[j] = v;
      work_.upper[j] = v;
    }
    const LpSolution sol = solve_lp(work_, opt_.lp, nullptr);
    if (sol.optimal() && sol.objective <= incumbent_obj_ + 1e-9 * std::max(1.0, std::abs(incumbent_obj_))) {
      incumbent_ = sol.x;
      incumbent_obj_ = sol.objective;
    }
  }

  const LinearProgram& root_;
  LinearProgram work_;
  MilpOptions opt_;
  Pseudocosts pseudo_;
  std::vector<double> incumbent_;
  double incumbent_obj_ = kInf;
};

bool BranchAndBound::feasible_start(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != root_.num_cols()) return false;
  const double tol = 1e-9;
  for (int j = 0; j < root_.num_cols(); ++j) {
    const double scale = std::max(1.0, std::abs(x[j]));
    if (x[j] < root_.lower[j] - tol * scale || x[j] > root_.upper[j] + tol * scale) return false;
    if (root_.integer[j] && fraction(x[j]) > opt_.integrality_tol) return false;
  }
  for (int i = 0; i < root_.num_rows(); ++i) {
    const double a = root_.row_activity(i, x);
    const double b = root_.rhs[i];
    const double slack = tol * std::max(1.0, std::abs(b));
    switch (root_.sense[i]) {
      case RowSense::kLessEqual:
        if (a > b + slack) return false;
        break;
      case RowSense::kGreaterEqual:
        if (a < b - slack) return false;
        break;
      case RowSense::kEqual:
        if (std::abs(a - b) > slack) return false;
        break;
    }
  }
  return true;
}

BranchChoice BranchAndBound::choose_branch(const LpSolution& sol) {
  std::vector<int> candidates;
  for (int j = 0; j < root_.num_cols(); ++j) {
    if (root_.integer[j] && fraction(sol.x[j]) > opt_.integrality_tol) candidates.push_back(j);
  }
  BranchChoice best;
  if (candidates.empty()) return best;
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](int a, int b) { return fraction(sol.x[a]) > fraction(sol.x[b]); });

  SimplexOptions limited = opt_.lp;
  limited.max_iterations = 2L * root_.num_rows() + 50;
  const double eps = 1e-6 * std::max(1.0, std::abs(sol.objective));
  double best_score = -1.0;
  int strong_left = kStrongCandidates;
  for (int j : candidates) {
    const double v = sol.x[j];
    const double down_dist = v - std::floor(v);
    const double up_dist = std::ceil(v) - v;
    BranchChoice c;
    c.col = j;
    c.value = v;
    double down_gain = pseudo_.estimate(j, false) * down_dist;
    double up_gain = pseudo_.estimate(j, true) * up_dist;

    if (!pseudo_.reliable(j) && strong_left > 0) {
      --strong_left;
      const double lo = work_.lower[j], up = work_.upper[j];
      work_.upper[j] = std::floor(v);
      const LpSolution down = solve_lp(work_, limited, &sol.basis);
      work_.upper[j] = up;
      work_.lower[j] = std::ceil(v);
      const LpSolution upper = solve_lp(work_, limited, &sol.basis);
      work_.lower[j] = lo;
      if (down.status == SolveStatus::kInfeasible) {
        c.down_infeasible = true;
        down_gain = kInf;
      } else if (down.optimal()) {
        c.down_bound = down.objective;
        down_gain = std::max(0.0, down.objective - sol.objective);
        pseudo_.record(j, false, down_gain / down_dist);
      }
      if (upper.status == SolveStatus::kInfeasible) {
        c.up_infeasible = true;
        up_gain = kInf;
      } else if (upper.optimal()) {
        c.up_bound = upper.objective;
        up_gain = std::max(0.0, upper.objective - sol.objective);
        pseudo_.record(j, true, up_gain / up_dist);
      }
      if (c.down_infeasible || c.up_infeasible) return c;
    }
    const double score = std::max(down_gain, eps) * std::max(up_gain, eps);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

MilpSolution BranchAndBound::run(const Basis* warm_root, std::span<const double> start) {
  MilpSolution out;
  if (!start.empty() && feasible_start(start)) {
    offer(std::vector<double>(start.begin(), start.end()), root_.objective(start));
  }
  const LpSolution root = solve(warm_root);
  out.root_basis = root.basis;
  if (root.status != SolveStatus::kOptimal) {
    out.status = root.status;
    return out;
  }

  const double prune_eps = 1e-9;
  auto prunable = [&](double bound) {
    return bound >= incumbent_obj_ - prune_eps * std::max(1.0, std::abs(incumbent_obj_));
  };
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  double last_bound = root.objective;
  double unresolved_bound = kInf;  // nodes whose relaxation could not be solved

  auto process = [&](const LpSolution& sol, const Node& node) {
    const double node_bound = std::max(sol.objective, node.bound);
    if (prunable(node_bound)) return;
    const BranchChoice branch = choose_branch(sol);
    if (branch.col < 0) {
      offer(sol.x, sol.objective);
      return;
    }
    if (incumbent_.empty() || node.depth % 8 == 0) {
      try_rounding(sol.x, &sol.basis, false);
      if (incumbent_.empty()) try_rounding(sol.x, &sol.basis, true);
    }
    auto basis = std::make_shared<const Basis>(sol.basis);
    auto changes = node.changes;
    fix_by_reduced_cost(sol, changes);
    const double v = branch.value;
    if (!branch.down_infeasible) {
      Node down{changes, std::max(node_bound, branch.down_bound), node.depth + 1, next_id++, basis,
                branch.col, false, v - std::floor(v), sol.objective};
      down.changes.push_back({branch.col, -kInf, std::floor(v)});
      if (!prunable(down.bound)) open.push(std::move(down));
    }
    if (!branch.up_infeasible) {
      Node up{changes, std::max(node_bound, branch.up_bound), node.depth + 1, next_id++, basis,
              branch.col, true, std::ceil(v) - v, sol.objective};
      up.changes.push_back({branch.col, std::ceil(v), kInf});
      if (!prunable(up.bound)) open.push(std::move(up));
    }
  };

  apply({});
  process(root, Node{{}, root.objective, 0, next_id++, nullptr});

  out.status = SolveStatus::kOptimal;
  while (true) {
    double bound = open.empty() ? incumbent_obj_ : std::min(open.top().bound, incumbent_obj_);
    bound = std::min(bound, unresolved_bound);
    last_bound = std::max(last_bound, bound);
    out.bound_trace.push_back(last_bound);
    if (relative_gap(incumbent_obj_, last_bound) <= opt_.gap_tol) break;
    if (open.empty()) {
      if (std::isfinite(unresolved_bound)) out.status = SolveStatus::kNumericalError;
      break;
    }
    if (out.nodes >= opt_.node_limit) {
      out.status = SolveStatus::kNodeLimit;
      break;
    }
    Node node = open.top();
    open.pop();
    if (prunable(node.bound)) continue;
    apply(node.changes);
    const LpSolution sol = solve(node.basis.get());
    ++out.nodes;
    if (sol.status == SolveStatus::kInfeasible) continue;
    if (sol.status != SolveStatus::kOptimal) {
      unresolved_bound = std::min(unresolved_bound, node.bound);
      continue;
    }
    if (node.branch_col >= 0 && node.distance > 0.0) {
      pseudo_.record(node.branch_col, node.up, (sol.objective - node.parent_objective) / node.distance);
    }
    process(sol, node);
  }

  polish();
  out.bound = incumbent_.empty() ? last_bound : std::min(last_bound, incumbent_obj_);
  if (incumbent_.empty()) {
    if (out.status == SolveStatus::kOptimal) out.status = SolveStatus::kInfeasible;
    return out;
  }
  out.x = incumbent_;
  out.objective = incumbent_obj_;
  out.gap = relative_gap(incumbent_obj_, out.bound);
  return out;
}

}  // namespace

MilpSolution solve_milp(const LinearProgram& lp, const MilpOptions& options, const Basis* warm_root,
                        std::span<const double> start) {
  if (!lp.has_integers()) {
    const LpSolution sol = solve_lp(lp, options.lp, warm_root);
    MilpSolution out;
    out.status = sol.status;
    out.root_basis = sol.basis;
    if (sol.optimal()) {
      out.x = sol.x;
      out.objective = sol.objective;
      out.bound = sol.objective;
      out.gap = 0.0;
      out.bound_trace.push_back(sol.objective);
    }
    return out;
  }
  BranchAndBound bb(lp, options);
  return bb.run(warm_root, start);
}

}  // namespace cep
