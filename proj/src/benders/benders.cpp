#include "cep/benders/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace cep {

namespace {

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

double CutRecord::evaluate(std::span<const double> y, std::span<const double> q) const {
  double v = f;
  for (std::size_t j = 0; j < pi.size(); ++j) v += pi[j] * (y[j] - y_anchor[j]);
  for (std::size_t k = 0; k < lambda.size(); ++k) v += lambda[k] * (q[k] - q_anchor[k]);
  return v;
}

double optimality_gap(double ub, double lb) {
  if (!(lb > 0.0)) throw std::domain_error("optimality gap needs a positive lower bound; use an absolute gap");
  if (std::isinf(ub)) return kInf;
  return (ub - lb) / lb;
}

double stopping_gap(double ub, double lb) {
  if (std::isinf(ub) || std::isinf(lb)) return kInf;
  if (lb > 0.0) return optimality_gap(ub, lb);
  return ub - lb;
}

MasterProblem::MasterProblem(const CompactBlocks& blocks, int num_theta, bool budgets, bool relax)
    : blocks_(&blocks) {
  const auto& inv = blocks.investment;
  const int m = inv.index.size;
  const int W = blocks.num_subperiods();
  const int K = blocks.policy.num_rows();
  for (int j = 0; j < m; ++j) lp_.add_column(inv.c0[j], 0.0, kInf, !relax && inv.integer[j]);
  for (int s = 0; s < num_theta; ++s) theta_col_.push_back(lp_.add_column(1.0, -kInf, kInf));
  if (budgets && K > 0) {
    for (int w = 0; w < W; ++w) {
      q_col_.push_back(lp_.num_cols());
      for (int k = 0; k < K; ++k) lp_.add_column(0.0, -kInf, kInf);
    }
  }
  for (int i = 0; i < inv.R.num_rows(); ++i) {
    lp_.add_row(inv.R.row_cols(i), inv.R.row_vals(i), inv.sense[i], inv.r[i]);
  }
  if (has_budgets()) {
    for (int k = 0; k < K; ++k) {
      std::vector<int> cols;
      std::vector<double> vals;
      for (int w = 1; w <= W; ++w) {
        cols.push_back(q_col(w, k));
        vals.push_back(1.0);
      }
      lp_.add_row(cols, vals, RowSense::kEqual, blocks.policy.e[k]);
    }
  }
  first_cut_row_ = lp_.num_rows();
  // Zero-anchored initial cuts: theta >= 0.
  for (int s = 0; s < num_theta; ++s) {
    CutRecord zero;
    zero.w = num_theta == 1 ? 0 : s + 1;
    add_cut(zero);
  }
}

void MasterProblem::add_cut(const CutRecord& cut) {
  const int slot = num_theta() == 1 ? 0 : cut.w - 1;
  std::vector<int> cols{theta_col(slot)};
  std::vector<double> vals{1.0};
  double rhs = cut.f;
  double largest = 1.0;
  for (double v : cut.pi) largest = std::max(largest, std::abs(v));
  for (double v : cut.lambda) largest = std::max(largest, std::abs(v));
  const double drop = 1e-12 * largest;
  for (std::size_t j = 0; j < cut.pi.size(); ++j) {
    if (std::abs(cut.pi[j]) <= drop) continue;
    cols.push_back(y_col(static_cast<int>(j)));
    vals.push_back(-cut.pi[j]);
    rhs -= cut.pi[j] * cut.y_anchor[j];
  }
  if (has_budgets()) {
    for (std::size_t k = 0; k < cut.lambda.size(); ++k) {
      if (std::abs(cut.lambda[k]) <= drop) continue;
      cols.push_back(q_col(cut.w, static_cast<int>(k)));
      vals.push_back(-cut.lambda[k]);
      rhs -= cut.lambda[k] * cut.q_anchor[k];
    }
  }
  lp_.add_row(cols, vals, RowSense::kGreaterEqual, rhs);
  cut_theta_.push_back(theta_col(slot));
  ++num_cuts_;
}

MasterSolution MasterProblem::solve(const MilpOptions& options, const LpBackend& backend, bool relaxed) {
  // The previous solution with theta lifted onto the new cuts stays feasible.
  for (int i = first_cut_row_; i < lp_.num_rows() && !last_x_.empty(); ++i) {
    const double short_by = lp_.rhs[i] - lp_.row_activity(i, last_x_);
    if (short_by > 0.0) last_x_[cut_theta_[i - first_cut_row_]] += short_by;
  }
  const Basis* warm = warm_.empty() ? nullptr : &warm_;
  MilpSolution sol;
  if (relaxed && lp_.has_integers()) {
    LinearProgram lp = lp_;
    std::fill(lp.integer.begin(), lp.integer.end(), 0);
    sol = backend.solve_milp(lp, options, warm, {});
  } else {
    sol = backend.solve_milp(lp_, options, warm, last_x_);
  }
  MasterSolution out;
  out.status = sol.status;
  if (!sol.root_basis.empty()) warm_ = sol.root_basis;
  if (!sol.has_incumbent()) return out;
  last_x_ = sol.x;
  const int m = blocks_->investment.index.size;
  out.y.assign(sol.x.begin(), sol.x.begin() + m);
  for (int col : theta_col_) out.theta.push_back(sol.x[col]);
  if (has_budgets()) {
    const int K = blocks_->policy.num_rows();
    for (int w = 1; w <= blocks_->num_subperiods(); ++w) {
      std::vector<double> q(K);
      for (int k = 0; k < K; ++k) q[k] = sol.x[q_col(w, k)];
      out.q.push_back(std::move(q));
    }
  }
  out.objective = sol.objective;
  out.bound = sol.bound;
  return out;
}

Subproblem::Subproblem(const CompactBlocks& blocks, int w) : w_(w) {
  const auto& b = blocks.block(w);
  const int n = blocks.x_index.size;
  const int K = blocks.policy.num_rows();
  m_ = blocks.investment.index.size;
  num_x_ = n;
  LinearProgram lp;
  for (int j = 0; j < n; ++j) lp.add_column(b.c[j], b.lower[j], kInf);
  y_copy_.assign(m_, -1);
  for (int j : b.B.index) {
    if (y_copy_[j] < 0) y_copy_[j] = -2;
  }
  for (int j = 0; j < m_; ++j) {
    if (y_copy_[j] == -2) y_copy_[j] = lp.add_column(0.0, -kInf, kInf);
  }
  for (int k = 0; k < K; ++k) q_copy_.push_back(lp.add_column(0.0, -kInf, kInf));

  std::vector<int> cols;
  std::vector<double> vals;
  for (int i = 0; i < b.A.num_rows(); ++i) {
    cols.assign(b.A.row_cols(i).begin(), b.A.row_cols(i).end());
    vals.assign(b.A.row_vals(i).begin(), b.A.row_vals(i).end());
    for (std::size_t k = 0; k < b.B.row_cols(i).size(); ++k) {
      cols.push_back(y_copy_[b.B.row_cols(i)[k]]);
      vals.push_back(b.B.row_vals(i)[k]);
    }
    lp.add_row(cols, vals, b.sense[i], b.b[i]);
  }
  const auto& Q = blocks.policy.Q[w - 1];
  for (int k = 0; k < K; ++k) {
    cols.assign(Q.row_cols(k).begin(), Q.row_cols(k).end());
    vals.assign(Q.row_vals(k).begin(), Q.row_vals(k).end());
    cols.push_back(q_copy_[k]);
    vals.push_back(-1.0);
    lp.add_row(cols, vals, RowSense::kLessEqual, 0.0);
  }
  std::map<int, double> pins;
  for (int j = 0; j < m_; ++j) {
    if (y_copy_[j] >= 0) pins[y_copy_[j]] = 0.0;
  }
  for (int col : q_copy_) pins[col] = 0.0;
  program_ = fix_columns(std::move(lp), pins);
}

Subproblem Subproblem::coupled(const CompactBlocks& blocks) {
  Subproblem sp;
  const int W = blocks.num_subperiods();
  const int n = blocks.x_index.size;
  const int K = blocks.policy.num_rows();
  sp.m_ = blocks.investment.index.size;
  sp.num_x_ = n * W;
  LinearProgram lp;
  for (const auto& b : blocks.operations) {
    for (int j = 0; j < n; ++j) lp.add_column(b.c[j], b.lower[j], kInf);
  }
  sp.y_copy_.assign(sp.m_, -1);
  for (const auto& b : blocks.operations) {
    for (int j : b.B.index) sp.y_copy_[j] = -2;
  }
  for (int j = 0; j < sp.m_; ++j) {
    if (sp.y_copy_[j] == -2) sp.y_copy_[j] = lp.add_column(0.0, -kInf, kInf);
  }
  std::vector<int> cols;
  std::vector<double> vals;
  for (int w = 0; w < W; ++w) {
    const auto& b = blocks.operations[w];
    for (int i = 0; i < b.A.num_rows(); ++i) {
      cols.clear();
      vals.clear();
      for (std::size_t k = 0; k < b.A.row_cols(i).size(); ++k) {
        cols.push_back(b.A.row_cols(i)[k] + w * n);
        vals.push_back(b.A.row_vals(i)[k]);
      }
      for (std::size_t k = 0; k < b.B.row_cols(i).size(); ++k) {
        cols.push_back(sp.y_copy_[b.B.row_cols(i)[k]]);
        vals.push_back(b.B.row_vals(i)[k]);
      }
      lp.add_row(cols, vals, b.sense[i], b.b[i]);
    }
  }
  for (int k = 0; k < K; ++k) {
    cols.clear();
    vals.clear();
    for (int w = 0; w < W; ++w) {
      const auto& Q = blocks.policy.Q[w];
      for (std::size_t e = 0; e < Q.row_cols(k).size(); ++e) {
        cols.push_back(Q.row_cols(k)[e] + w * n);
        vals.push_back(Q.row_vals(k)[e]);
      }
    }
    lp.add_row(cols, vals, RowSense::kLessEqual, blocks.policy.e[k]);
  }
  std::map<int, double> pins;
  for (int j = 0; j < sp.m_; ++j) {
    if (sp.y_copy_[j] >= 0) pins[sp.y_copy_[j]] = 0.0;
  }
  sp.program_ = fix_columns(std::move(lp), pins);
  return sp;
}

SubproblemResult Subproblem::solve(std::span<const double> y, std::span<const double> q,
                                   const LpBackend& backend, bool keep_x,
                                   const SimplexOptions& options) {
  const double t0 = now_ms();
  for (int j = 0; j < m_; ++j) {
    if (y_copy_[j] >= 0) program_.set_value(y_copy_[j], y[j]);
  }
  for (std::size_t k = 0; k < q_copy_.size(); ++k) program_.set_value(q_copy_[k], q[k]);

  auto retry = [](const LpSolution& s) {
    return s.status == SolveStatus::kNumericalError || s.status == SolveStatus::kIterationLimit;
  };
  LpSolution sol = backend.solve_lp(program_.lp, options, warm_.empty() ? nullptr : &warm_);
  if (retry(sol) && !warm_.empty()) sol = backend.solve_lp(program_.lp, options, nullptr);
  if (retry(sol) && options.scale) {
    SimplexOptions plain = options;
    plain.scale = false;
    sol = backend.solve_lp(program_.lp, plain, nullptr);
  }
  const std::string where = w_ > 0 ? "subperiod " + std::to_string(w_) : "coupled subproblem";
  if (sol.status == SolveStatus::kInfeasible) throw std::runtime_error("recourse violated in " + where);
  if (sol.status == SolveStatus::kUnbounded) throw std::runtime_error("missing bounds in " + where);
  if (!sol.optimal()) {
    throw std::runtime_error(std::string("subproblem solve failed in ") + where + ": " + to_string(sol.status) +
                             (sol.message.empty() ? "" : " (" + sol.message + ")"));
  }
  warm_ = sol.basis;

  SubproblemResult out;
  out.status = sol.status;
  out.f = sol.objective;
  out.iterations = sol.iterations;
  out.pi.assign(m_, 0.0);
  for (int j = 0; j < m_; ++j) {
    if (y_copy_[j] >= 0) out.pi[j] = program_.dual_of(sol, y_copy_[j]);
  }
  for (int col : q_copy_) out.lambda.push_back(program_.dual_of(sol, col));
  if (keep_x) out.x.assign(sol.x.begin(), sol.x.begin() + num_x_);
  out.solve_ms = now_ms() - t0;
  return out;
}

BendersEngine::BendersEngine(const CompactBlocks& blocks, BendersVariant variant,
                             BendersOptions options, std::shared_ptr<const LpBackend> backend)
    : blocks_(blocks),
      variant_(variant),
      options_(std::move(options)),
      backend_(backend ? std::move(backend) : default_backend()),
      master_(blocks, variant == BendersVariant::kClassic ? 1 : blocks.num_subperiods(),
              variant == BendersVariant::kBudgetedMultiCut, options_.relax) {
  const int W = blocks.num_subperiods();
  warming_up_ = options_.lp_warmup && !options_.relax && master_.program().has_integers();
  if (variant == BendersVariant::kClassic) {
    subproblems_.push_back(Subproblem::coupled(blocks));
  } else {
    for (int w = 1; w <= W; ++w) subproblems_.emplace_back(blocks, w);
  }
  if (options_.dispatch_order.empty()) {
    options_.dispatch_order.resize(subproblems_.size());
    std::iota(options_.dispatch_order.begin(), options_.dispatch_order.end(), 0);
  } else {
    if (variant == BendersVariant::kClassic) {
      options_.dispatch_order = {0};
    } else {
      auto sorted = options_.dispatch_order;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < W; ++i) {
        if (sorted.size() != static_cast<std::size_t>(W) || sorted[i] != i + 1) {
          throw std::invalid_argument("dispatch order must be a permutation of 1..|W|");
        }
      }
      for (int& w : options_.dispatch_order) w -= 1;
    }
  }
  state_.best_q.assign(master_.has_budgets() ? W : 0, {});
  started_ms_ = now_ms();
}

BendersEngine::~BendersEngine() = default;

bool BendersEngine::step() {
  if (converged_) return true;
  const int K = blocks_.policy.num_rows();
  IterationRecord rec;
  rec.k = ++state_.k;

  const double master_start = now_ms();
  MilpOptions milp;
  milp.gap_tol = options_.mip_gap;
  milp.lp = options_.lp;
  const MasterSolution ms = master_.solve(milp, *backend_, warming_up_);
  rec.master_ms = now_ms() - master_start;
  if (ms.y.empty()) {
    throw std::runtime_error(std::string("master problem failed: ") + to_string(ms.status));
  }
  state_.lb = std::max(state_.lb, ms.bound);
  state_.y = ms.y;
  state_.q = ms.q;

  const std::vector<double> no_budget(K, 0.0);
  std::vector<SubproblemResult> results(subproblems_.size());
  detail::parallel_for(static_cast<int>(subproblems_.size()), options_.workers, [&](int i) {
    const int s = options_.dispatch_order[i];
    const auto& q = master_.has_budgets() ? state_.q[s] : no_budget;
    results[s] = subproblems_[s].solve(state_.y, q, *backend_, false, options_.lp);
  });

  double candidate = 0.0;
  for (int j = 0; j < blocks_.investment.index.size; ++j) candidate += blocks_.investment.c0[j] * state_.y[j];
  for (const auto& r : results) {
    candidate += r.f;
    rec.subproblem_ms.push_back(r.solve_ms);
  }
  const auto& integer = blocks_.investment.integer;
  bool integral = true;
  for (int j = 0; j < blocks_.investment.index.size && !options_.relax; ++j) {
    if (integer[j] && std::abs(state_.y[j] - std::round(state_.y[j])) > 1e-9) integral = false;
  }
  if (warming_up_) relaxed_ub_ = std::min(relaxed_ub_, candidate);
  if (integral && candidate < state_.ub) {
    state_.ub = candidate;
    state_.best_y = state_.y;
    state_.best_q = state_.q;
  }

  for (std::size_t s = 0; s < results.size(); ++s) {
    CutRecord cut;
    cut.w = variant_ == BendersVariant::kClassic ? 0 : static_cast<int>(s) + 1;
    cut.j = state_.k;
    cut.f = results[s].f;
    cut.pi = std::move(results[s].pi);
    cut.lambda = std::move(results[s].lambda);
    cut.y_anchor = state_.y;
    if (master_.has_budgets()) cut.q_anchor = state_.q[s];
    master_.add_cut(cut);
    if (options_.keep_cuts) cuts_.push_back(std::move(cut));
  }

  rec.ub = state_.ub;
  rec.lb = state_.lb;
  rec.gap = stopping_gap(state_.ub, state_.lb);
  rec.elapsed_ms = now_ms() - started_ms_;
  state_.trace.push_back(rec);
  converged_ = rec.gap <= options_.rel_tol;
  if (warming_up_ && stopping_gap(relaxed_ub_, state_.lb) <= options_.rel_tol) warming_up_ = false;
  return converged_;
}

BendersResult BendersEngine::run() {
  while (!converged_ && state_.k < options_.k_max) step();
  return finish();
}

BendersResult BendersEngine::finish() {
  BendersResult out;
  out.converged = converged_;
  out.iterations = state_.k;
  out.ub = state_.ub;
  out.lb = state_.lb;
  out.gap = stopping_gap(state_.ub, state_.lb);
  out.y = state_.best_y;
  out.q = state_.best_q;
  out.trace = state_.trace;
  out.cuts = cuts_;
  if (state_.best_y.empty()) return out;

  const int W = blocks_.num_subperiods();
  const int n = blocks_.x_index.size;
  const std::vector<double> no_budget(blocks_.policy.num_rows(), 0.0);
  std::vector<SubproblemResult> results(subproblems_.size());
  detail::parallel_for(static_cast<int>(subproblems_.size()), options_.workers, [&](int s) {
    const auto& q = master_.has_budgets() ? state_.best_q[s] : no_budget;
    results[s] = subproblems_[s].solve(state_.best_y, q, *backend_, true, options_.lp);
  });
  if (variant_ == BendersVariant::kClassic) {
    for (int w = 0; w < W; ++w) {
      out.x.emplace_back(results[0].x.begin() + w * n, results[0].x.begin() + (w + 1) * n);
    }
  } else {
    for (auto& r : results) out.x.push_back(std::move(r.x));
  }
  return out;
}

BendersResult run_benders(const CompactBlocks& blocks, const BendersOptions& options) {
  BendersEngine engine(blocks, BendersVariant::kBudgetedMultiCut, options);
  return engine.run();
}

BendersResult run_classic_benders(const CompactBlocks& blocks, const BendersOptions& options) {
  BendersEngine engine(blocks, BendersVariant::kClassic, options);
  return engine.run();
}

}  // namespace cep
