#include "cep/model/formulation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cep/core/validate.hpp"
#include "cep/runner/synthetic.hpp"
#include "cep/solver/milp.hpp"
#include "support/cases.hpp"

namespace cep {
namespace {

using testing::battery;
using testing::empty_case;
using testing::plain_thermal;
using testing::toy_case;

int count_family(const std::vector<RowFamily>& families, RowFamily f) {
  return static_cast<int>(std::count(families.begin(), families.end(), f));
}

// LP over the investment rows alone.
LinearProgram investment_program(const InvestmentBlock& inv, std::vector<double> cost) {
  LinearProgram lp;
  for (double c : cost) lp.add_column(c);
  for (int i = 0; i < inv.R.num_rows(); ++i) {
    const auto cols = inv.R.row_cols(i);
    const auto vals = inv.R.row_vals(i);
    lp.add_row(cols, vals, inv.sense[i], inv.r[i]);
  }
  return lp;
}

TEST(InvestmentBlock, ZeroBoundsForceZeroCapacity) {
  auto c = empty_case(1, 4);
  auto g = plain_thermal(c, "g");
  g.max_new_capacity = 0.0;
  g.existing_capacity = 0.0;
  c.clusters.push_back(g);
  const auto inv = build_investment_block(c);
  for (int target : {inv.index.new_units[0], inv.index.retired_units[0], inv.index.capacity[0]}) {
    std::vector<double> cost(inv.index.size, 0.0);
    cost[target] = -1.0;
    const auto sol = solve_lp(investment_program(inv, cost));
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.x[target], 0.0, 1e-12);
  }
}

TEST(InvestmentBlock, NonRetirableHasZeroRetirementRow) {
  auto c = empty_case(1, 4);
  auto g = plain_thermal(c, "g");
  g.no_retire = true;
  c.clusters.push_back(g);
  const auto inv = build_investment_block(c);
  ASSERT_EQ(count_family(inv.family, RowFamily::kNoRetirement), 1);
  const auto it = std::find(inv.family.begin(), inv.family.end(), RowFamily::kNoRetirement);
  const int row = static_cast<int>(it - inv.family.begin());
  EXPECT_EQ(inv.sense[row], RowSense::kEqual);
  EXPECT_EQ(inv.r[row], 0.0);
  ASSERT_EQ(inv.R.row_cols(row).size(), 1u);
  EXPECT_EQ(inv.R.row_cols(row)[0], inv.index.retired_units[0]);
}

TEST(InvestmentBlock, StorageClusterRowCount) {
  auto c = empty_case(1, 4);
  auto g = battery(c, "b");
  g.no_retire = true;
  c.clusters.push_back(g);
  const auto inv = build_investment_block(c);
  EXPECT_EQ(inv.R.num_rows(), 10);
  EXPECT_EQ(count_family(inv.family, RowFamily::kDurationLimit), 2);
  EXPECT_EQ(count_family(inv.family, RowFamily::kNoRetirement), 2);
  EXPECT_EQ(count_family(inv.family, RowFamily::kCapacityDefinition), 2);
}

TEST(InvestmentBlock, FixedCostVector) {
  auto c = empty_case(1, 4);
  auto g = battery(c, "b");
  g.fom_cost = 7.0;
  g.storage->energy_fom_cost = 3.0;
  c.clusters.push_back(g);
  ResourceCluster h;
  h.id = "h";
  h.zone = "z";
  h.kind = ResourceKind::kHydro;
  h.unit_size = 2.0;
  h.inv_cost = 100.0;
  h.fom_cost = 10.0;
  h.availability.assign(4, 1.0);
  h.hydro = HydroAttributes{5.0, std::vector<double>(4, 0.1), 4.0, 1.0};
  c.clusters.push_back(h);
  c.lines.push_back({"l", "z", "z2", 0.0, 10.0, 9.0});
  const auto inv = build_investment_block(c);
  const auto& ix = inv.index;
  EXPECT_DOUBLE_EQ(inv.c0[ix.new_units[0]], 20000.0 * 5.0);
  EXPECT_DOUBLE_EQ(inv.c0[ix.capacity[0]], 7.0);
  EXPECT_DOUBLE_EQ(inv.c0[ix.energy_new[0]], 5000.0 * 10.0);
  EXPECT_DOUBLE_EQ(inv.c0[ix.energy_capacity[0]], 3.0);
  EXPECT_DOUBLE_EQ(inv.c0[ix.new_units[1]], 100.0 * 2.0 + 4.0 * 5.0 * 2.0);
  EXPECT_DOUBLE_EQ(inv.c0[ix.capacity[1]], 10.0 + 1.0 * 5.0);
  EXPECT_DOUBLE_EQ(inv.c0[ix.line_new[0]], 9.0);
  EXPECT_DOUBLE_EQ(inv.c0[ix.retired_units[0]], 0.0);
  for (int j = 0; j < ix.size; ++j) {
    const bool unit_count = std::count(ix.new_units.begin(), ix.new_units.end(), j) ||
                            std::count(ix.retired_units.begin(), ix.retired_units.end(), j) ||
                            std::count(ix.energy_new.begin(), ix.energy_new.end(), j) ||
                            std::count(ix.energy_retired.begin(), ix.energy_retired.end(), j) ||
                            std::count(ix.line_new.begin(), ix.line_new.end(), j);
    EXPECT_EQ(static_cast<bool>(inv.integer[j]), unit_count) << ix.describe(c, j);
  }
}

TEST(OperationalBlock, TwoHourRampCount) {
  auto c = empty_case(1, 2);
  c.clusters.push_back(plain_thermal(c, "g"));
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto& b = blocks.block(1);
  EXPECT_EQ(count_family(b.family, RowFamily::kDemandBalance), 2);
  EXPECT_EQ(count_family(b.family, RowFamily::kRamp) + count_family(b.family, RowFamily::kRampWrap), 4);
  EXPECT_EQ(count_family(b.family, RowFamily::kRampWrap), 2);
}

TEST(OperationalBlock, StorageWrapLinksEnds) {
  auto c = empty_case(2, 4);
  c.clusters.push_back(battery(c, "b"));
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto& x = blocks.x_index;
  const auto& b = blocks.block(2);
  const auto it = std::find(b.family.begin(), b.family.end(), RowFamily::kStorageWrap);
  ASSERT_NE(it, b.family.end());
  EXPECT_EQ(count_family(b.family, RowFamily::kStorageWrap), 1);
  const int row = static_cast<int>(it - b.family.begin());
  EXPECT_EQ(b.sense[row], RowSense::kEqual);
  std::map<int, double> coef;
  for (std::size_t k = 0; k < b.A.row_cols(row).size(); ++k) coef[b.A.row_cols(row)[k]] = b.A.row_vals(row)[k];
  const int soc = x.state_of_charge[0];
  EXPECT_DOUBLE_EQ(coef[x.at(soc, 0)], 1.0);
  EXPECT_DOUBLE_EQ(coef[x.at(soc, 3)], -(1.0 - 0.01));
  EXPECT_DOUBLE_EQ(coef[x.at(x.charge[0], 0)], -0.9);
  EXPECT_DOUBLE_EQ(coef[x.at(x.generation[0], 0)], 1.0 / 0.9);
  EXPECT_EQ(coef.size(), 4u);
}

TEST(OperationalBlock, MinUpTimeWrapsCircularly) {
  auto c = empty_case(2, 8);
  auto g = plain_thermal(c, "uc");
  g.min_power = 0.4;
  g.uc = UnitCommitment{100.0, 3, 2};
  c.clusters.push_back(g);
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto& x = blocks.x_index;
  const auto& b = blocks.block(2);
  const auto it = std::find(b.family.begin(), b.family.end(), RowFamily::kMinUpTime);
  ASSERT_NE(it, b.family.end());
  const int row = static_cast<int>(it - b.family.begin());
  std::vector<int> starts;
  for (std::size_t k = 0; k < b.A.row_cols(row).size(); ++k) {
    const int j = b.A.row_cols(row)[k];
    if (j >= x.start[0] && j < x.start[0] + 8) {
      EXPECT_DOUBLE_EQ(b.A.row_vals(row)[k], -1.0);
      starts.push_back(j - x.start[0]);
    }
  }
  std::sort(starts.begin(), starts.end());
  EXPECT_EQ(starts, (std::vector<int>{0, 5, 6, 7}));
  EXPECT_EQ(b.sense[row], RowSense::kGreaterEqual);
  EXPECT_EQ(count_family(b.family, RowFamily::kMinUpTime), 8);
  EXPECT_EQ(count_family(b.family, RowFamily::kMinDownTime), 8);
}

TEST(OperationalBlock, CommitmentRampCoefficients) {
  auto c = empty_case(1, 3);
  auto g = plain_thermal(c, "uc");
  g.min_power = 0.3;
  g.ramp_up = 0.2;
  g.ramp_down = 0.5;
  g.availability = {1.0, 0.25, 1.0};
  g.uc = UnitCommitment{0.0, 0, 0};
  c.clusters.push_back(g);
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto& x = blocks.x_index;
  const auto& b = blocks.block(1);
  // The first interior ramp-up row is hour index 1 where sigma = 0.25.
  const auto it = std::find(b.family.begin(), b.family.end(), RowFamily::kCommitmentRamp);
  ASSERT_NE(it, b.family.end());
  const int row = static_cast<int>(it - b.family.begin());
  std::map<int, double> coef;
  for (std::size_t k = 0; k < b.A.row_cols(row).size(); ++k) coef[b.A.row_cols(row)[k]] = b.A.row_vals(row)[k];
  const double unit = 10.0;
  const double start_coef = std::min(0.25, std::max(0.3, 0.2));
  EXPECT_DOUBLE_EQ(coef[x.at(x.generation[0], 1)], 1.0);
  EXPECT_DOUBLE_EQ(coef[x.at(x.generation[0], 0)], -1.0);
  EXPECT_DOUBLE_EQ(coef[x.at(x.commit[0], 1)], -unit * 0.2);
  EXPECT_DOUBLE_EQ(coef[x.at(x.start[0], 1)], unit * 0.2 - unit * start_coef);
  EXPECT_DOUBLE_EQ(coef[x.at(x.shut[0], 1)], unit * 0.3);
}

TEST(OperationalBlock, ObjectiveWeights) {
  auto c = empty_case(2, 4);
  auto g = plain_thermal(c, "g");
  g.uc = UnitCommitment{70.0, 1, 1};
  c.clusters.push_back(g);
  c.policy.co2_penalty = 123.0;
  const auto blocks = build_blocks(c, Scenario::kCo2);
  const auto& x = blocks.x_index;
  const double alpha = 8736.0 / 2.0 / 4.0;
  const auto& b = blocks.block(1);
  EXPECT_DOUBLE_EQ(b.c[x.at(x.generation[0], 2)], 30.0 * alpha);
  EXPECT_DOUBLE_EQ(b.c[x.at(x.start[0], 2)], 70.0 * alpha);
  EXPECT_DOUBLE_EQ(b.c[x.at(x.nse(0, 0), 2)], 5000.0 * alpha);
  EXPECT_DOUBLE_EQ(b.c[x.co2_slack], 123.0);
  EXPECT_EQ(x.rps_slack, -1);
}

TEST(PolicyBlock, ReferenceHasNoRows) {
  const auto c = toy_case(Scenario::kRef);
  const auto blocks = build_blocks(c, Scenario::kRef);
  EXPECT_EQ(blocks.policy.num_rows(), 0);
  for (const auto& q : blocks.policy.Q) EXPECT_EQ(q.num_rows(), 0);
}

TEST(PolicyBlock, CapAndShareRightHandSides) {
  // 1 subperiod of 4 hours, weight 4, demand 250: weighted demand 1000 MWh.
  SystemCase c = empty_case(1, 4, 250.0);
  c.time = TimeStructure(4, {4.0});
  c.clusters.push_back(plain_thermal(c, "g"));
  ASSERT_DOUBLE_EQ(c.weighted_demand(), 1000.0);
  const auto co2 = build_blocks(c, Scenario::kCo2);
  ASSERT_EQ(co2.policy.num_rows(), 1);
  EXPECT_NEAR(co2.policy.e[0], 50.0, 1e-12);
  c.policy.rps_share = 0.7;
  const auto rps = build_blocks(c, Scenario::kRps);
  ASSERT_EQ(rps.policy.num_rows(), 1);
  EXPECT_NEAR(rps.policy.e[0], -700.0, 1e-9);
}

TEST(Assembly, ReferenceBudgetedMatchesMonolithic) {
  const auto c = toy_case(Scenario::kRef);
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto mono = assemble_monolithic(blocks, false);
  const auto budg = assemble_budgeted(blocks, false);
  EXPECT_EQ(mono.lp.num_cols(), budg.lp.num_cols());
  EXPECT_EQ(mono.lp.num_rows(), budg.lp.num_rows());
  EXPECT_EQ(mono.lp.row_index, budg.lp.row_index);
  EXPECT_EQ(mono.lp.rhs, budg.lp.rhs);
  EXPECT_TRUE(budg.q_offset.empty());
}

TEST(Assembly, ObjectiveDecomposesByBlock) {
  const auto c = toy_case(Scenario::kRef);
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto mono = assemble_monolithic(blocks, true);
  const auto sol = solve_lp(mono.lp);
  ASSERT_TRUE(sol.optimal());
  double total = 0.0;
  for (int j = 0; j < blocks.investment.index.size; ++j) total += blocks.investment.c0[j] * sol.x[j];
  for (int w = 1; w <= blocks.num_subperiods(); ++w) {
    const auto& b = blocks.block(w);
    for (int j = 0; j < blocks.x_index.size; ++j) total += b.c[j] * sol.x[mono.x_offset[w - 1] + j];
  }
  EXPECT_NEAR(total, sol.objective, 1e-9 * std::abs(sol.objective));
}

TEST(Assembly, BlocksAreDisjoint) {
  SyntheticOptions opt;
  opt.zones = 2;
  opt.subperiods = 3;
  opt.hydro = true;
  opt.scenario = Scenario::kCo2;
  const auto c = make_synthetic_case(opt);
  const auto blocks = build_blocks(c, Scenario::kCo2);
  const int m = blocks.investment.index.size;
  const int n = blocks.x_index.size;
  for (const auto& b : blocks.operations) {
    EXPECT_EQ(b.A.num_cols, n);
    EXPECT_EQ(b.B.num_cols, m);
  }
  const auto mono = assemble_monolithic(blocks, false);
  int row = blocks.investment.R.num_rows();
  for (int i = 0; i < row; ++i) {
    for (int j : mono.lp.row_cols(i)) EXPECT_LT(j, m);
  }
  for (int w = 0; w < blocks.num_subperiods(); ++w) {
    const int lo = mono.x_offset[w];
    for (int i = 0; i < blocks.operations[w].A.num_rows(); ++i, ++row) {
      for (int j : mono.lp.row_cols(row)) EXPECT_TRUE(j < m || (j >= lo && j < lo + n));
    }
  }
  ASSERT_EQ(row, mono.coupling_row);
  for (int w = 0; w < blocks.num_subperiods(); ++w) {
    for (int j : blocks.policy.Q[w].index) EXPECT_LT(j, n);
  }
  // Integrality only on investment columns.
  for (int j = m; j < mono.lp.num_cols(); ++j) EXPECT_FALSE(mono.lp.integer[j]);
}

TEST(Assembly, BudgetsFromFeasiblePointAreFeasible) {
  for (auto scenario : {Scenario::kRps, Scenario::kCo2}) {
    const auto c = toy_case(scenario);
    const auto blocks = build_blocks(c, scenario);
    const auto mono = assemble_monolithic(blocks, true);
    const auto sol = solve_lp(mono.lp);
    ASSERT_TRUE(sol.optimal());
    const int n = blocks.x_index.size;
    std::vector<std::vector<double>> xs;
    for (int off : mono.x_offset) xs.emplace_back(sol.x.begin() + off, sol.x.begin() + off + n);
    const auto q = budgets_from_point(blocks.policy, xs);
    ASSERT_EQ(q.size(), 2u);
    EXPECT_NEAR(q[0][0] + q[1][0], blocks.policy.e[0], 1e-9 * std::max(1.0, std::abs(blocks.policy.e[0])));
    EXPECT_DOUBLE_EQ(q[1][0], blocks.policy.Q[1].row_dot(0, xs[1]));
    EXPECT_LE(blocks.policy.Q[0].row_dot(0, xs[0]), q[0][0] + 1e-7);

    // The same point extended with these budgets satisfies every budgeted row.
    const auto budg = assemble_budgeted(blocks, true);
    std::vector<double> point(budg.lp.num_cols(), 0.0);
    std::copy(sol.x.begin(), sol.x.end(), point.begin());
    for (int w = 0; w < 2; ++w) point[budg.q_offset[w]] = q[w][0];
    for (int i = 0; i < budg.lp.num_rows(); ++i) {
      const double a = budg.lp.row_activity(i, point);
      const double tol = 1e-7 * std::max(1.0, std::abs(budg.lp.rhs[i]));
      switch (budg.lp.sense[i]) {
        case RowSense::kLessEqual: EXPECT_LE(a, budg.lp.rhs[i] + tol); break;
        case RowSense::kGreaterEqual: EXPECT_GE(a, budg.lp.rhs[i] - tol); break;
        case RowSense::kEqual: EXPECT_NEAR(a, budg.lp.rhs[i], tol); break;
      }
    }
  }
}

TEST(Assembly, BudgetedOptimumEqualsMonolithic) {
  for (auto scenario : {Scenario::kRps, Scenario::kCo2}) {
    for (bool relax : {true, false}) {
      const auto c = toy_case(scenario);
      const auto blocks = build_blocks(c, scenario);
      MilpOptions opt;
      opt.gap_tol = 1e-9;
      const auto mono = solve_milp(assemble_monolithic(blocks, relax).lp, opt);
      const auto budg = solve_milp(assemble_budgeted(blocks, relax).lp, opt);
      ASSERT_EQ(mono.status, SolveStatus::kOptimal);
      ASSERT_EQ(budg.status, SolveStatus::kOptimal);
      EXPECT_NEAR(mono.objective, budg.objective, 1e-6 * std::max(1.0, std::abs(mono.objective)));
    }
  }
}

TEST(Assembly, MilpMatchesInvestmentGridEnumeration) {
  // Two integer decisions with small ranges: enumerate every combination and
  // solve the dispatch LP at each point.
  auto c = empty_case(1, 4);
  c.demand = {{40, 60, 70, 50}};
  auto gas = plain_thermal(c, "gas");
  gas.unit_size = 15.0;
  gas.max_new_capacity = 90.0;
  auto pv = plain_thermal(c, "pv");
  pv.kind = ResourceKind::kVariable;
  pv.unit_size = 20.0;
  pv.max_new_capacity = 100.0;
  pv.var_cost = 0.0;
  pv.inv_cost = 20000.0;
  pv.availability = {0.2, 0.8, 0.9, 0.4};
  c.clusters = {gas, pv};
  ASSERT_TRUE(validate_case(c).ok());
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto program = assemble_monolithic(blocks, false);
  MilpOptions opt;
  opt.gap_tol = 0.0;
  const auto milp = solve_milp(program.lp, opt);
  ASSERT_EQ(milp.status, SolveStatus::kOptimal);

  const auto& ix = blocks.investment.index;
  double best = kInf;
  for (int a = 0; a <= 6; ++a) {
    for (int b = 0; b <= 5; ++b) {
      LinearProgram lp = program.lp;
      std::fill(lp.integer.begin(), lp.integer.end(), 0);
      for (int j : {ix.new_units[0], ix.new_units[1], ix.retired_units[0], ix.retired_units[1]}) {
        lp.lower[j] = lp.upper[j] = 0.0;
      }
      lp.lower[ix.new_units[0]] = lp.upper[ix.new_units[0]] = a;
      lp.lower[ix.new_units[1]] = lp.upper[ix.new_units[1]] = b;
      const auto sol = solve_lp(lp);
      if (sol.optimal()) best = std::min(best, sol.objective);
    }
  }
  EXPECT_NEAR(milp.objective, best, 1e-7 * std::abs(best));
}

TEST(Assembly, DispatchSatisfiesDemandBalance) {
  SyntheticOptions opt;
  opt.zones = 2;
  opt.hydro = true;
  const auto c = make_synthetic_case(opt);
  ASSERT_TRUE(validate_case(c).ok()) << validate_case(c).summary();
  const auto blocks = build_blocks(c, Scenario::kRef);
  const auto program = assemble_monolithic(blocks, true);
  const auto sol = solve_lp(program.lp);
  ASSERT_TRUE(sol.optimal());
  const auto& x = blocks.x_index;
  for (int w = 1; w <= c.time.num_subperiods(); ++w) {
    const int off = program.x_offset[w - 1];
    for (int z = 0; z < 2; ++z) {
      for (int i = 0; i < x.hours; ++i) {
        const int t = c.time.first_hour(w) + i;
        double supply = 0.0;
        for (std::size_t g = 0; g < c.clusters.size(); ++g) {
          if (c.clusters[g].zone != c.zones[z]) continue;
          supply += sol.x[off + x.at(x.generation[g], i)];
          if (x.charge[g] >= 0) supply -= sol.x[off + x.at(x.charge[g], i)];
        }
        const double f = sol.x[off + x.at(x.flow[0], i)];
        supply += z == 0 ? -f : f;
        for (int s = 0; s < x.num_segments; ++s) supply += sol.x[off + x.at(x.nse(z, s), i)];
        const double d = c.demand[z][t - 1];
        EXPECT_NEAR(supply, d, 1e-6 * std::max(1.0, d));
      }
    }
  }
}

TEST(Assembly, SizeReplicaCounts) {
  const auto c = make_size_replica();
  ASSERT_EQ(c.clusters.size(), 62u);
  ASSERT_EQ(c.num_uc_clusters(), 16);
  EXPECT_TRUE(validate_case(c).ok()) << validate_case(c).summary();
}

}  // namespace
}  // namespace cep
