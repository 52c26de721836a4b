// Bounded revised primal simplex.
//
// Every row i gets a logical column s_i with a_i x + s_i = b_i; the logical's
// bounds encode the row sense (<=: [0,inf), >=: (-inf,0], =: [0,0]). Phase 1
// minimizes the sum of bound violations of basic variables directly from any
// starting basis, so warm starts need no artificial columns. The basis inverse
// is a sparse LU of B (Eigen) followed by a product-form eta file.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cep/solver/linear_program.hpp"

namespace cep {

namespace {

enum class VarState : std::uint8_t { kBasic, kLower, kUpper, kZero, kFixed };

double power_of_two(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
  return std::exp2(std::round(std::log2(v)));
}

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), opt_(options), m_(lp.num_rows()), n_(lp.num_cols()), pivot_tol_(options.pivot_tol) {
    build_scaled_problem();
  }

  LpSolution run(const Basis* warm);

 private:
  struct Eta {
    int pos;
    double pivot;
    std::vector<int> index;
    std::vector<double> value;
  };

  enum class StepKind { kPivot, kFlip, kUnbounded };
  struct Step {
    StepKind kind = StepKind::kUnbounded;
    int pos = -1;
    double theta = 0.0;
    bool leave_at_upper = false;
  };

  int total() const { return n_ + m_; }

  void build_scaled_problem();
  void init_basis(const Basis* warm);
  void crash_slack_basis();
  void place_nonbasic(int j);
  bool factorize();
  bool refactor(int& recoveries);
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void compute_primal();
  double primal_residual() const;
  bool phase_costs(std::vector<double>& cb) const;
  int choose_entering(bool phase1, bool bland, double& d_q) const;
  double reduced_cost(int j, bool phase1) const;
  Step ratio_test(bool phase1, bool bland, int q, double dir) const;
  void load_column(int j, std::vector<double>& out) const;
  LpSolution finish(SolveStatus status, long iterations, const char* message);

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int m_;
  int n_;

  // scaled structural columns (CSC)
  std::vector<int> cstart_;
  std::vector<int> cindex_;
  std::vector<double> cvalue_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> rhs_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  std::vector<double> weight_;
  double cost_scale_ = 1.0;

  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<int> head_;

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;

  mutable std::vector<double> y_;
  std::vector<double> alpha_;

  double pivot_tol_ = 0.0;
  // last basis that factorized cleanly
  std::vector<int> good_head_;
  std::vector<VarState> good_state_;
};

void Simplex::build_scaled_problem() {
  // transpose rows to columns
  cstart_.assign(n_ + 1, 0);
  for (int k : lp_.row_index) ++cstart_[k + 1];
  for (int j = 0; j < n_; ++j) cstart_[j + 1] += cstart_[j];
  cindex_.resize(lp_.row_index.size());
  cvalue_.resize(lp_.row_index.size());
  {
    std::vector<int> fill(cstart_.begin(), cstart_.end() - 1);
    for (int i = 0; i < m_; ++i) {
      for (std::int64_t k = lp_.row_start[i]; k < lp_.row_start[i + 1]; ++k) {
        const int j = lp_.row_index[k];
        cindex_[fill[j]] = i;
        cvalue_[fill[j]] = lp_.row_value[k];
        ++fill[j];
      }
    }
  }

  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (opt_.scale) {
    std::vector<double> rmax(m_), rmin(m_);
    for (int pass = 0; pass < 6; ++pass) {
      std::fill(rmax.begin(), rmax.end(), 0.0);
      std::fill(rmin.begin(), rmin.end(), kInf);
      for (int j = 0; j < n_; ++j) {
        for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) {
          const double a = std::abs(cvalue_[k]) * col_scale_[j];
          if (a == 0.0) continue;
          rmax[cindex_[k]] = std::max(rmax[cindex_[k]], a);
          rmin[cindex_[k]] = std::min(rmin[cindex_[k]], a);
        }
      }
      for (int i = 0; i < m_; ++i) {
        if (rmax[i] > 0.0) row_scale_[i] = 1.0 / std::sqrt(rmax[i] * rmin[i]);
      }
      for (int j = 0; j < n_; ++j) {
        double cmax = 0.0, cmin = kInf;
        for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) {
          const double a = std::abs(cvalue_[k]) * row_scale_[cindex_[k]];
          if (a == 0.0) continue;
          cmax = std::max(cmax, a);
          cmin = std::min(cmin, a);
        }
        if (cmax > 0.0) col_scale_[j] = 1.0 / std::sqrt(cmax * cmin);
      }
    }
    for (auto& r : row_scale_) r = power_of_two(r);
    for (auto& s : col_scale_) s = power_of_two(s);
  }

  for (int j = 0; j < n_; ++j) {
    for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) {
      cvalue_[k] *= row_scale_[cindex_[k]] * col_scale_[j];
    }
  }

  cost_.assign(total(), 0.0);
  lower_.assign(total(), 0.0);
  upper_.assign(total(), 0.0);
  double cmax = 0.0, cmin = kInf;
  for (int j = 0; j < n_; ++j) {
    cost_[j] = lp_.cost[j] * col_scale_[j];
    if (cost_[j] != 0.0) {
      cmax = std::max(cmax, std::abs(cost_[j]));
      cmin = std::min(cmin, std::abs(cost_[j]));
    }
    lower_[j] = lp_.lower[j] / col_scale_[j];
    upper_[j] = lp_.upper[j] / col_scale_[j];
  }
  // geometric mean of the nonzero costs goes to one
  cost_scale_ = cmax > 0.0 ? power_of_two(1.0 / std::sqrt(cmax * cmin)) : 1.0;
  for (int j = 0; j < n_; ++j) cost_[j] *= cost_scale_;

  rhs_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    rhs_[i] = lp_.rhs[i] * row_scale_[i];
    const int s = n_ + i;
    switch (lp_.sense[i]) {
      case RowSense::kLessEqual: lower_[s] = 0.0; upper_[s] = kInf; break;
      case RowSense::kGreaterEqual: lower_[s] = -kInf; upper_[s] = 0.0; break;
      case RowSense::kEqual: lower_[s] = 0.0; upper_[s] = 0.0; break;
    }
  }

  weight_.assign(total(), 1.0);
  for (int j = 0; j < n_; ++j) {
    double norm = 1.0;
    for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) norm += cvalue_[k] * cvalue_[k];
    weight_[j] = norm;
  }
  for (int i = 0; i < m_; ++i) weight_[n_ + i] = 2.0;
}

void Simplex::place_nonbasic(int j) {
  const double lo = lower_[j], up = upper_[j];
  if (lo == up) {
    state_[j] = VarState::kFixed;
    x_[j] = lo;
    return;
  }
  VarState s = state_[j];
  if (s == VarState::kUpper && !std::isfinite(up)) s = VarState::kLower;
  if (s == VarState::kLower && !std::isfinite(lo)) s = std::isfinite(up) ? VarState::kUpper : VarState::kZero;
  if (s == VarState::kZero || s == VarState::kFixed || s == VarState::kBasic) {
    if (std::isfinite(lo)) {
      s = VarState::kLower;
    } else if (std::isfinite(up)) {
      s = VarState::kUpper;
    } else {
      s = VarState::kZero;
    }
  }
  state_[j] = s;
  x_[j] = s == VarState::kLower ? lo : s == VarState::kUpper ? up : 0.0;
}

void Simplex::crash_slack_basis() {
  head_.resize(m_);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::kBasic) state_[j] = VarState::kLower;
    place_nonbasic(j);
  }
  for (int i = 0; i < m_; ++i) {
    state_[n_ + i] = VarState::kBasic;
    head_[i] = n_ + i;
  }
}

void Simplex::init_basis(const Basis* warm) {
  x_.assign(total(), 0.0);
  state_.assign(total(), VarState::kLower);
  const bool usable = warm && static_cast<int>(warm->cols.size()) == n_ &&
                      static_cast<int>(warm->rows.size()) <= m_;
  if (!usable) {
    crash_slack_basis();
    return;
  }
  auto convert = [](BasisStatus s) {
    switch (s) {
      case BasisStatus::kBasic: return VarState::kBasic;
      case BasisStatus::kAtLower: return VarState::kLower;
      case BasisStatus::kAtUpper: return VarState::kUpper;
      case BasisStatus::kFree: return VarState::kZero;
    }
    return VarState::kLower;
  };
  for (int j = 0; j < n_; ++j) state_[j] = convert(warm->cols[j]);
  for (int i = 0; i < m_; ++i) {
    state_[n_ + i] = i < static_cast<int>(warm->rows.size()) ? convert(warm->rows[i]) : VarState::kBasic;
  }
  head_.clear();
  for (int j = 0; j < total(); ++j) {
    if (state_[j] != VarState::kBasic) continue;
    if (static_cast<int>(head_.size()) < m_) {
      head_.push_back(j);
    } else {
      state_[j] = VarState::kLower;
    }
  }
  for (int i = 0; i < m_ && static_cast<int>(head_.size()) < m_; ++i) {
    if (state_[n_ + i] != VarState::kBasic) {
      state_[n_ + i] = VarState::kBasic;
      head_.push_back(n_ + i);
    }
  }
  for (int j = 0; j < total(); ++j) {
    if (state_[j] != VarState::kBasic) place_nonbasic(j);
  }
}

bool Simplex::factorize() {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m_) * 3);
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    if (j >= n_) {
      trip.emplace_back(j - n_, p, 1.0);
    } else {
      for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) trip.emplace_back(cindex_[k], p, cvalue_[k]);
    }
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(trip.begin(), trip.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  return lu_.info() == Eigen::Success;
}

// Refactorizes the current basis. A singular basis is replaced by the last
// good one with a stricter pivot tolerance, or by the slack basis.
bool Simplex::refactor(int& recoveries) {
  if (factorize()) {
    good_head_ = head_;
    good_state_ = state_;
    compute_primal();
    return true;
  }
  if (++recoveries > 5) return false;
  pivot_tol_ = std::min(1e-4, pivot_tol_ * 10.0);
  bool ok = false;
  if (!good_head_.empty() && good_head_ != head_) {
    head_ = good_head_;
    state_ = good_state_;
    for (int j = 0; j < total(); ++j) {
      if (state_[j] != VarState::kBasic) place_nonbasic(j);
    }
    ok = factorize();
  }
  if (!ok) {
    crash_slack_basis();
    ok = factorize();
  }
  if (ok) {
    good_head_ = head_;
    good_state_ = state_;
  }
  compute_primal();
  return ok;
}

void Simplex::ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  Eigen::Map<Eigen::VectorXd> in(v.data(), m_);
  Eigen::VectorXd out = lu_.solve(in);
  for (int i = 0; i < m_; ++i) v[i] = out[i];
  for (const Eta& e : etas_) {
    const double xr = v[e.pos] / e.pivot;
    v[e.pos] = xr;
    if (xr == 0.0) continue;
    for (std::size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * xr;
  }
}

void Simplex::btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = v[it->pos];
    for (std::size_t k = 0; k < it->index.size(); ++k) acc -= it->value[k] * v[it->index[k]];
    v[it->pos] = acc / it->pivot;
  }
  Eigen::Map<Eigen::VectorXd> in(v.data(), m_);
  Eigen::VectorXd out = lu_.transpose().solve(in);
  for (int i = 0; i < m_; ++i) v[i] = out[i];
}

void Simplex::load_column(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (j >= n_) {
    out[j - n_] = 1.0;
    return;
  }
  for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) out[cindex_[k]] = cvalue_[k];
}

void Simplex::compute_primal() {
  std::vector<double> r(rhs_);
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    if (j >= n_) {
      r[j - n_] -= x_[j];
    } else {
      for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) r[cindex_[k]] -= cvalue_[k] * x_[j];
    }
  }
  ftran(r);
  for (int p = 0; p < m_; ++p) x_[head_[p]] = r[p];
}

double Simplex::primal_residual() const {
  std::vector<double> r(rhs_);
  for (int j = 0; j < n_; ++j) {
    for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) r[cindex_[k]] -= cvalue_[k] * x_[j];
  }
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    worst = std::max(worst, std::abs(r[i] - x_[n_ + i]) / (1.0 + std::abs(rhs_[i])));
  }
  return worst;
}

bool Simplex::phase_costs(std::vector<double>& cb) const {
  bool infeasible = false;
  const double tol = opt_.feasibility_tol;
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    if (x_[j] < lower_[j] - tol) {
      cb[p] = -1.0;
      infeasible = true;
    } else if (x_[j] > upper_[j] + tol) {
      cb[p] = 1.0;
      infeasible = true;
    } else {
      cb[p] = 0.0;
    }
  }
  if (!infeasible) {
    for (int p = 0; p < m_; ++p) cb[p] = cost_[head_[p]];
  }
  return infeasible;
}

double Simplex::reduced_cost(int j, bool phase1) const {
  double d = phase1 ? 0.0 : cost_[j];
  if (j >= n_) return d - y_[j - n_];
  for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) d -= y_[cindex_[k]] * cvalue_[k];
  return d;
}

int Simplex::choose_entering(bool phase1, bool bland, double& d_q) const {
  const double tol = opt_.optimality_tol;
  int best = -1;
  double best_score = 0.0;
  for (int j = 0; j < total(); ++j) {
    const VarState s = state_[j];
    if (s == VarState::kBasic || s == VarState::kFixed) continue;
    const double d = reduced_cost(j, phase1);
    bool eligible = false;
    if (s == VarState::kLower) {
      eligible = d < -tol;
    } else if (s == VarState::kUpper) {
      eligible = d > tol;
    } else {
      eligible = std::abs(d) > tol;
    }
    if (!eligible) continue;
    if (bland) {
      d_q = d;
      return j;
    }
    const double score = d * d / weight_[j];
    if (score > best_score) {
      best_score = score;
      best = j;
      d_q = d;
    }
  }
  return best;
}

Simplex::Step Simplex::ratio_test(bool phase1, bool bland, int q, double dir) const {
  const double tol = opt_.feasibility_tol;
  // half the feasibility tolerance so a Harris step cannot create a phase 1 violation
  const double harris = bland ? 0.0 : 0.5 * tol;
  Step step;

  // Pass 1: relaxed bound on the step length.
  double theta_max = kInf;
  for (int p = 0; p < m_; ++p) {
    const double a = alpha_[p];
    if (std::abs(a) <= pivot_tol_) continue;
    const double rate = -dir * a;
    const int j = head_[p];
    const double xj = x_[j];
    double limit = kInf;
    if (phase1 && xj < lower_[j] - tol) {
      if (rate > 0) limit = (lower_[j] - xj) / rate;
    } else if (phase1 && xj > upper_[j] + tol) {
      if (rate < 0) limit = (xj - upper_[j]) / -rate;
    } else if (rate < 0 && std::isfinite(lower_[j])) {
      limit = (xj - lower_[j] + harris) / -rate;
    } else if (rate > 0 && std::isfinite(upper_[j])) {
      limit = (upper_[j] - xj + harris) / rate;
    }
    theta_max = std::min(theta_max, limit);
  }

  const double flip = upper_[q] - lower_[q];
  if (std::isfinite(flip) && flip <= theta_max) {
    step.kind = StepKind::kFlip;
    step.theta = flip;
    return step;
  }
  if (!std::isfinite(theta_max)) return step;

  // Pass 2: among rows blocking within theta_max take the largest pivot.
  double best_pivot = -1.0;
  double best_ratio = kInf;
  for (int p = 0; p < m_; ++p) {
    const double a = alpha_[p];
    if (std::abs(a) <= pivot_tol_) continue;
    const double rate = -dir * a;
    const int j = head_[p];
    const double xj = x_[j];
    double ratio = kInf;
    bool at_upper = false;
    if (phase1 && xj < lower_[j] - tol) {
      if (rate > 0) ratio = (lower_[j] - xj) / rate;
    } else if (phase1 && xj > upper_[j] + tol) {
      if (rate < 0) {
        ratio = (xj - upper_[j]) / -rate;
        at_upper = true;
      }
    } else if (rate < 0 && std::isfinite(lower_[j])) {
      ratio = (xj - lower_[j]) / -rate;
    } else if (rate > 0 && std::isfinite(upper_[j])) {
      ratio = (upper_[j] - xj) / rate;
      at_upper = true;
    }
    if (!(ratio <= theta_max)) continue;
    bool better;
    if (bland) {
      // smallest ratio; ties go to the larger pivot, then the lower index
      better = step.pos < 0 || ratio < best_ratio - 1e-12 ||
               (ratio <= best_ratio + 1e-12 &&
                (std::abs(a) > best_pivot || (std::abs(a) == best_pivot && j < head_[step.pos])));
    } else {
      better = std::abs(a) > best_pivot;
    }
    if (better) {
      best_pivot = std::abs(a);
      best_ratio = ratio;
      step.pos = p;
      step.leave_at_upper = at_upper;
    }
  }
  if (step.pos < 0) return step;
  step.kind = StepKind::kPivot;
  step.theta = std::max(0.0, best_ratio);
  return step;
}

LpSolution Simplex::finish(SolveStatus status, long iterations, const char* message) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.message = message;
  sol.x.resize(n_);
  for (int j = 0; j < n_; ++j) sol.x[j] = x_[j] * col_scale_[j];

  sol.basis.cols.resize(n_);
  sol.basis.rows.resize(m_);
  auto convert = [](VarState s) {
    switch (s) {
      case VarState::kBasic: return BasisStatus::kBasic;
      case VarState::kUpper: return BasisStatus::kAtUpper;
      case VarState::kZero: return BasisStatus::kFree;
      default: return BasisStatus::kAtLower;
    }
  };
  for (int j = 0; j < n_; ++j) sol.basis.cols[j] = convert(state_[j]);
  for (int i = 0; i < m_; ++i) sol.basis.rows[i] = convert(state_[n_ + i]);

  sol.row_activity.resize(m_);
  for (int i = 0; i < m_; ++i) sol.row_activity[i] = lp_.row_activity(i, sol.x);
  sol.objective = lp_.objective(sol.x);

  if (status == SolveStatus::kOptimal) {
    std::vector<double> cb(m_);
    for (int p = 0; p < m_; ++p) cb[p] = cost_[head_[p]];
    y_ = cb;
    btran(y_);
    sol.row_dual.resize(m_);
    for (int i = 0; i < m_; ++i) sol.row_dual[i] = y_[i] * row_scale_[i] / cost_scale_;
    sol.reduced_cost.resize(n_);
    for (int j = 0; j < n_; ++j) {
      sol.reduced_cost[j] =
          state_[j] == VarState::kBasic ? 0.0 : reduced_cost(j, false) / (col_scale_[j] * cost_scale_);
    }
    sol.is_vertex = true;
  }
  return sol;
}

LpSolution Simplex::run(const Basis* warm) {
  init_basis(warm);
  int recoveries = 0;
  if (!refactor(recoveries)) return finish(SolveStatus::kNumericalError, 0, "singular basis");

  const long max_iter = opt_.max_iterations > 0 ? opt_.max_iterations : 50L * (m_ + n_) + 1000;
  std::vector<double> cb(m_);
  alpha_.assign(m_, 0.0);
  y_.assign(m_, 0.0);

  long iter = 0;
  int degenerate_run = 0;
  bool fresh = true;
  while (true) {
    if (iter >= max_iter) return finish(SolveStatus::kIterationLimit, iter, "iteration limit");
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      if (!refactor(recoveries)) return finish(SolveStatus::kNumericalError, iter, "singular basis");
      fresh = true;
    }

    const bool phase1 = phase_costs(cb);
    y_ = cb;
    btran(y_);
    const bool bland = degenerate_run > opt_.bland_after_degenerate;
    double d_q = 0.0;
    const int q = choose_entering(phase1, bland, d_q);

    if (q < 0) {
      if (!fresh) {
        if (!refactor(recoveries)) return finish(SolveStatus::kNumericalError, iter, "singular basis");
        fresh = true;
        continue;
      }
      if (primal_residual() > 1e-6) {
        if (++recoveries > 5) return finish(SolveStatus::kNumericalError, iter, "residual too large");
        crash_slack_basis();
        if (!refactor(recoveries)) return finish(SolveStatus::kNumericalError, iter, "singular basis");
        continue;
      }
      return phase1 ? finish(SolveStatus::kInfeasible, iter, "infeasible")
                    : finish(SolveStatus::kOptimal, iter, "optimal");
    }

    load_column(q, alpha_);
    ftran(alpha_);
    double dir;
    if (state_[q] == VarState::kLower) {
      dir = 1.0;
    } else if (state_[q] == VarState::kUpper) {
      dir = -1.0;
    } else {
      dir = d_q < 0 ? 1.0 : -1.0;
    }

    const Step step = ratio_test(phase1, bland, q, dir);
    if (step.kind == StepKind::kUnbounded) {
      if (!fresh) {
        if (!refactor(recoveries)) return finish(SolveStatus::kNumericalError, iter, "singular basis");
        fresh = true;
        continue;
      }
      if (phase1) return finish(SolveStatus::kNumericalError, iter, "unbounded phase 1 ray");
      return finish(SolveStatus::kUnbounded, iter, "unbounded");
    }

    const double theta = step.theta;
    x_[q] += dir * theta;
    for (int p = 0; p < m_; ++p) {
      if (alpha_[p] != 0.0) x_[head_[p]] -= dir * theta * alpha_[p];
    }
    if (step.kind == StepKind::kFlip) {
      state_[q] = state_[q] == VarState::kLower ? VarState::kUpper : VarState::kLower;
      x_[q] = state_[q] == VarState::kLower ? lower_[q] : upper_[q];
    } else {
      const int r = step.pos;
      const int leaving = head_[r];
      if (lower_[leaving] == upper_[leaving]) {
        state_[leaving] = VarState::kFixed;
        x_[leaving] = lower_[leaving];
      } else if (step.leave_at_upper) {
        state_[leaving] = VarState::kUpper;
        x_[leaving] = upper_[leaving];
      } else {
        state_[leaving] = VarState::kLower;
        x_[leaving] = lower_[leaving];
      }
      head_[r] = q;
      state_[q] = VarState::kBasic;

      Eta eta;
      eta.pos = r;
      eta.pivot = alpha_[r];
      for (int p = 0; p < m_; ++p) {
        if (p != r && std::abs(alpha_[p]) > 1e-14) {
          eta.index.push_back(p);
          eta.value.push_back(alpha_[p]);
        }
      }
      etas_.push_back(std::move(eta));
    }
    fresh = false;
    degenerate_run = theta <= opt_.feasibility_tol ? degenerate_run + 1 : 0;
    ++iter;
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options, const Basis* warm_start) {
  Simplex simplex(lp, options);
  return simplex.run(warm_start);
}

}  // namespace cep
