#include "cep/runner/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "cep/model/formulation.hpp"
#include "cep/solver/milp.hpp"

namespace cep {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char* to_string(Method method) {
  switch (method) {
    case Method::kMonolithic: return "monolithic";
    case Method::kBenders: return "benders";
    case Method::kBendersClassic: return "benders-classic";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "monolithic") return Method::kMonolithic;
  if (text == "benders") return Method::kBenders;
  if (text == "benders-classic") return Method::kBendersClassic;
  throw std::invalid_argument("unknown method '" + text + "' (expected monolithic, benders or benders-classic)");
}

namespace {

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

double value_at(const std::vector<double>& v, int j) { return j < 0 ? 0.0 : v[j] + 0.0; }

// Fills investments, dispatch and every derived metric from y and x_w.
void describe_solution(const SystemCase& c, const CompactBlocks& blocks, const std::vector<double>& y,
                       const std::vector<std::vector<double>>& x, SolveReport& out) {
  const auto& iy = blocks.investment.index;
  const auto& ix = blocks.x_index;
  const int G = static_cast<int>(c.clusters.size());
  const int L = static_cast<int>(c.lines.size());
  const int Z = static_cast<int>(c.zones.size());
  const int S = static_cast<int>(c.segments.size());
  const int W = c.time.num_subperiods();
  const int T = c.time.total_hours();

  out.costs = {};
  for (int j = 0; j < iy.size; ++j) out.costs.fixed += blocks.investment.c0[j] * y[j];

  out.clusters.clear();
  for (int g = 0; g < G; ++g) {
    const auto& k = c.clusters[g];
    ClusterInvestment inv{k.id, k.zone, k.type};
    inv.new_units = value_at(y, iy.new_units[g]);
    inv.retired_units = value_at(y, iy.retired_units[g]);
    inv.capacity = value_at(y, iy.capacity[g]);
    if (k.is_storage()) inv.energy_capacity = value_at(y, iy.energy_capacity[g]);
    out.clusters.push_back(std::move(inv));
  }
  out.lines.clear();
  for (int l = 0; l < L; ++l) {
    out.lines.push_back({c.lines[l].id, value_at(y, iy.line_new[l]), value_at(y, iy.line_capacity[l])});
  }

  Dispatch& d = out.dispatch;
  d = {};
  auto series = [&](const std::vector<int>& base, std::vector<std::vector<double>>& dst) {
    dst.assign(base.size(), {});
    for (std::size_t e = 0; e < base.size(); ++e) {
      if (base[e] < 0) continue;
      dst[e].resize(T);
      for (int w = 1; w <= W; ++w) {
        const int t0 = c.time.first_hour(w);
        for (int i = 0; i < ix.hours; ++i) dst[e][t0 - 1 + i] = x[w - 1][ix.at(base[e], i)];
      }
    }
  };
  series(ix.generation, d.generation);
  series(ix.charge, d.charge);
  series(ix.state_of_charge, d.state_of_charge);
  series(ix.level, d.level);
  series(ix.spill, d.spill);
  series(ix.commit, d.commit);
  series(ix.start, d.start);
  series(ix.shut, d.shut);
  series(ix.flow, d.flow);
  std::vector<std::vector<double>> nse_flat;
  series(ix.curtailment, nse_flat);
  d.nse.assign(Z, std::vector<std::vector<double>>(S));
  for (int z = 0; z < Z; ++z) {
    for (int s = 0; s < S; ++s) d.nse[z][s] = std::move(nse_flat[z * S + s]);
  }
  const int slack = blocks.scenario == Scenario::kRps ? ix.rps_slack : ix.co2_slack;
  if (blocks.scenario != Scenario::kRef) {
    for (int w = 0; w < W; ++w) d.policy_slack.push_back(x[w][slack]);
  }

  out.emissions = 0.0;
  double qualifying = 0.0;
  for (int t = 1; t <= T; ++t) {
    const double alpha = c.time.alpha(t);
    for (int g = 0; g < G; ++g) {
      const auto& k = c.clusters[g];
      const double gen = d.generation[g][t - 1];
      const double charge = d.charge[g].empty() ? 0.0 : d.charge[g][t - 1];
      out.costs.variable += alpha * k.var_cost * (gen + charge);
      if (!d.start[g].empty()) out.costs.startup += alpha * k.uc->start_cost * d.start[g][t - 1];
      out.emissions += alpha * k.co2_rate * (gen + charge);
      if (k.rps) qualifying += alpha * gen;
    }
    for (int z = 0; z < Z; ++z) {
      for (int s = 0; s < S; ++s) out.costs.nse += alpha * c.segments[s].cost * d.nse[z][s][t - 1];
    }
  }
  const double penalty = blocks.scenario == Scenario::kRps ? c.policy.rps_penalty : c.policy.co2_penalty;
  for (double v : d.policy_slack) out.costs.policy_penalty += penalty * v;
  out.weighted_demand = c.weighted_demand();
  out.rps_share = out.weighted_demand > 0.0 ? qualifying / out.weighted_demand : 0.0;
}

void solve_monolithic(const CompactBlocks& blocks, const RunOptions& options, SolveReport& report,
                      std::vector<double>& y, std::vector<std::vector<double>>& x) {
  const auto program = assemble_monolithic(blocks, options.relax);
  MilpOptions milp;
  milp.gap_tol = options.mip_gap;
  const double start = now_ms();
  const auto sol = default_backend()->solve_milp(program.lp, milp, nullptr);
  if (!sol.has_incumbent()) {
    throw std::runtime_error(std::string("no solution (") + to_string(sol.status) + ")");
  }
  report.status = to_string(sol.status);
  report.converged = sol.status == SolveStatus::kOptimal;
  report.objective = sol.objective;
  report.lower_bound = std::min(sol.bound, sol.objective);
  report.gap = sol.gap;
  report.iterations = 1;
  IterationRecord rec;
  rec.k = 1;
  rec.ub = report.objective;
  rec.lb = report.lower_bound;
  rec.gap = report.gap;
  rec.elapsed_ms = now_ms() - start;
  rec.master_ms = rec.elapsed_ms;
  report.trace = {rec};

  const int m = blocks.investment.index.size;
  const int n = blocks.x_index.size;
  y.assign(sol.x.begin(), sol.x.begin() + m);
  for (int off : program.x_offset) x.emplace_back(sol.x.begin() + off, sol.x.begin() + off + n);
}

void solve_decomposed(const CompactBlocks& blocks, Method method, const RunOptions& options,
                      SolveReport& report, std::vector<double>& y, std::vector<std::vector<double>>& x) {
  BendersOptions bo;
  bo.rel_tol = options.rel_tol;
  bo.k_max = options.k_max;
  bo.mip_gap = options.mip_gap;
  bo.workers = options.workers;
  bo.relax = options.relax;
  bo.lp_warmup = options.lp_warmup;
  const auto result = method == Method::kBenders ? run_benders(blocks, bo) : run_classic_benders(blocks, bo);
  if (result.y.empty() || result.x.size() != static_cast<std::size_t>(blocks.num_subperiods())) {
    throw std::runtime_error("no investment plan with a finite upper bound");
  }
  report.status = result.converged ? "converged" : "iteration_limit";
  report.converged = result.converged;
  report.objective = result.ub;
  report.lower_bound = result.lb;
  report.gap = result.gap;
  report.iterations = result.iterations;
  report.trace = result.trace;
  y = result.y;
  x = result.x;
}

double number_or_inf(const json& v, double inf) { return v.is_null() ? inf : v.get<double>(); }

}  // namespace

SolveReport run(Method method, const SystemCase& c, Scenario scenario, const RunOptions& options) {
  SolveReport report;
  report.case_name = c.name;
  report.method = method;
  report.scenario = scenario;
  report.relax = options.relax;
  report.weeks = c.time.week_ids();
  report.weights = c.time.weights();

  const double start = now_ms();
  try {
    const auto blocks = build_blocks(c, scenario, options.workers);
    std::vector<double> y;
    std::vector<std::vector<double>> x;
    if (method == Method::kMonolithic) {
      solve_monolithic(blocks, options, report, y, x);
    } else {
      solve_decomposed(blocks, method, options, report, y, x);
    }
    describe_solution(c, blocks, y, x, report);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(to_string(method)) + ": " + e.what());
  }
  report.total_ms = now_ms() - start;
  return report;
}

CapacityMse compute_capacity_mse(const SolveReport& report, const SolveReport& reference) {
  std::map<std::string, const ClusterInvestment*> ref;
  for (const auto& k : reference.clusters) ref[k.id] = &k;
  std::set<std::string> seen;
  for (const auto& k : report.clusters) seen.insert(k.id);
  if (seen.size() != report.clusters.size() || ref.size() != reference.clusters.size() || seen.size() != ref.size()) {
    throw std::invalid_argument("reports cover different cluster sets");
  }
  CapacityMse out;
  for (const auto& k : report.clusters) {
    auto it = ref.find(k.id);
    if (it == ref.end()) throw std::invalid_argument("cluster '" + k.id + "' missing from the reference");
    const double diff = k.capacity - it->second->capacity;
    out.total += diff * diff;
    out.by_type[it->second->type] += diff * diff;
  }
  out.total = std::sqrt(out.total);
  for (auto& [type, v] : out.by_type) v = std::sqrt(v);
  return out;
}

void emit_trace(const SolveReport& report, const fs::path& path) {
  if (report.trace.empty()) throw std::invalid_argument("report has no iteration trace");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "iteration,elapsed_ms,ub,lb,gap\n";
  for (const auto& r : report.trace) {
    out << r.k << ',' << r.elapsed_ms << ',' << r.ub << ',' << r.lb << ',' << r.gap << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void emit_dispatch(const SolveReport& report, const SystemCase& c, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "hour,variable,entity,value\n";
  const auto& d = report.dispatch;
  auto emit = [&](const char* name, const std::vector<std::vector<double>>& s, auto&& label) {
    for (std::size_t e = 0; e < s.size(); ++e) {
      for (std::size_t t = 0; t < s[e].size(); ++t) {
        out << t + 1 << ',' << name << ',' << label(e) << ',' << s[e][t] << '\n';
      }
    }
  };
  auto cluster = [&](std::size_t g) { return c.clusters[g].id; };
  emit("generation", d.generation, cluster);
  emit("charge", d.charge, cluster);
  emit("state_of_charge", d.state_of_charge, cluster);
  emit("level", d.level, cluster);
  emit("spill", d.spill, cluster);
  emit("commit", d.commit, cluster);
  emit("start", d.start, cluster);
  emit("shut", d.shut, cluster);
  emit("flow", d.flow, [&](std::size_t l) { return c.lines[l].id; });
  for (std::size_t z = 0; z < d.nse.size(); ++z) {
    emit("nse", d.nse[z], [&](std::size_t s) { return c.zones[z] + "/" + c.segments[s].id; });
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json report_to_json(const SolveReport& r) {
  json j;
  j["case"] = r.case_name;
  j["method"] = to_string(r.method);
  j["scenario"] = to_string(r.scenario);
  j["relax"] = r.relax;
  j["weeks"] = r.weeks;
  j["weights"] = r.weights;
  j["status"] = r.status;
  j["converged"] = r.converged;
  j["objective"] = r.objective;
  j["lower_bound"] = r.lower_bound;
  j["gap"] = r.gap;
  j["iterations"] = r.iterations;
  j["costs"] = {{"fixed", r.costs.fixed},
                {"variable", r.costs.variable},
                {"non_served_energy", r.costs.nse},
                {"startup", r.costs.startup},
                {"policy_penalty", r.costs.policy_penalty},
                {"total", r.costs.total()}};
  j["emissions_t"] = r.emissions;
  j["rps_share"] = r.rps_share;
  j["weighted_demand_mwh"] = r.weighted_demand;
  j["policy_slack"] = r.dispatch.policy_slack;
  json clusters = json::array();
  for (const auto& k : r.clusters) {
    clusters.push_back({{"id", k.id},
                        {"zone", k.zone},
                        {"type", k.type},
                        {"new_units", k.new_units},
                        {"retired_units", k.retired_units},
                        {"capacity_mw", k.capacity},
                        {"energy_capacity_mwh", k.energy_capacity}});
  }
  json lines = json::array();
  for (const auto& l : r.lines) {
    lines.push_back({{"id", l.id}, {"new_capacity_mw", l.new_capacity}, {"capacity_mw", l.capacity}});
  }
  j["investments"] = {{"clusters", clusters}, {"lines", lines}};
  json trace = json::array();
  json elapsed = json::array();
  json master = json::array();
  json sub = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.k}, {"ub", t.ub}, {"lb", t.lb}, {"gap", t.gap}});
    elapsed.push_back(t.elapsed_ms);
    master.push_back(t.master_ms);
    sub.push_back(t.subproblem_ms);
  }
  j["trace"] = trace;
  j["timings"] = {{"total_ms", r.total_ms}, {"elapsed_ms", elapsed}, {"master_ms", master}, {"subproblem_ms", sub}};
  return j;
}

SolveReport report_from_json(const json& j) {
  SolveReport r;
  r.case_name = j.value("case", "");
  r.method = parse_method(j.at("method").get<std::string>());
  r.scenario = parse_scenario(j.at("scenario").get<std::string>());
  r.relax = j.value("relax", false);
  r.weeks = j.at("weeks").get<std::vector<int>>();
  r.weights = j.at("weights").get<std::vector<double>>();
  r.status = j.at("status").get<std::string>();
  r.converged = j.at("converged").get<bool>();
  r.objective = number_or_inf(j.at("objective"), kInf);
  r.lower_bound = number_or_inf(j.at("lower_bound"), -kInf);
  r.gap = number_or_inf(j.at("gap"), kInf);
  r.iterations = j.at("iterations").get<int>();
  const auto& costs = j.at("costs");
  r.costs = {costs.at("fixed").get<double>(), costs.at("variable").get<double>(),
             costs.at("non_served_energy").get<double>(), costs.at("startup").get<double>(),
             costs.at("policy_penalty").get<double>()};
  r.emissions = j.at("emissions_t").get<double>();
  r.rps_share = j.at("rps_share").get<double>();
  r.weighted_demand = j.at("weighted_demand_mwh").get<double>();
  r.dispatch.policy_slack = j.at("policy_slack").get<std::vector<double>>();
  for (const auto& k : j.at("investments").at("clusters")) {
    r.clusters.push_back({k.at("id").get<std::string>(), k.at("zone").get<std::string>(),
                          k.at("type").get<std::string>(), k.at("new_units").get<double>(),
                          k.at("retired_units").get<double>(), k.at("capacity_mw").get<double>(),
                          k.at("energy_capacity_mwh").get<double>()});
  }
  for (const auto& l : j.at("investments").at("lines")) {
    r.lines.push_back({l.at("id").get<std::string>(), l.at("new_capacity_mw").get<double>(),
                       l.at("capacity_mw").get<double>()});
  }
  const auto& timings = j.value("timings", json::object());
  const auto& elapsed = timings.value("elapsed_ms", json::array());
  const auto& master = timings.value("master_ms", json::array());
  const auto& sub = timings.value("subproblem_ms", json::array());
  const auto& trace = j.at("trace");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    IterationRecord t;
    t.k = trace[i].at("iteration").get<int>();
    t.ub = number_or_inf(trace[i].at("ub"), kInf);
    t.lb = number_or_inf(trace[i].at("lb"), -kInf);
    t.gap = number_or_inf(trace[i].at("gap"), kInf);
    if (i < elapsed.size()) t.elapsed_ms = elapsed[i].get<double>();
    if (i < master.size()) t.master_ms = master[i].get<double>();
    if (i < sub.size()) t.subproblem_ms = sub[i].get<std::vector<double>>();
    r.trace.push_back(t);
  }
  r.total_ms = timings.value("total_ms", 0.0);
  return r;
}

void write_report(const SolveReport& report, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SolveReport read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return report_from_json(json::parse(in));
}

}  // namespace cep
