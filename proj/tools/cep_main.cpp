#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>

#include "cep/core/validate.hpp"
#include "cep/model/formulation.hpp"
#include "cep/runner/case_io.hpp"
#include "cep/runner/report.hpp"
#include "cep/runner/synthetic.hpp"

namespace fs = std::filesystem;
using namespace cep;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

// "N" picks N weeks; a comma list names them. Weights are equal shares of the year.
SystemCase apply_weeks(const SystemCase& c, const std::string& spec, std::uint64_t seed) {
  if (spec.empty()) return c;
  if (spec.find(',') != std::string::npos) {
    std::vector<int> ids;
    for (const auto& item : CLI::detail::split(spec, ',')) ids.push_back(std::stoi(item));
    return select_weeks(c, ids, std::vector<double>(ids.size(), c.year_hours / ids.size()));
  }
  const int count = std::stoi(spec);
  if (seed == 0) return select_even_weeks(c, count);
  const auto& all = c.time.week_ids();
  if (count < 1 || count > static_cast<int>(all.size())) {
    throw std::invalid_argument("week count must lie in 1.." + std::to_string(all.size()));
  }
  std::vector<int> ids;
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(ids), count, rng);
  return select_weeks(c, ids, std::vector<double>(count, c.year_hours / count));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity expansion planning with Benders decomposition"};
  app.require_subcommand(1);

  std::string case_dir, out_dir = "out", method = "benders", scenario, weeks;
  RunOptions run_opts;
  std::uint64_t seed = 0;

  auto* run_cmd = app.add_subcommand("run", "Solve a case bundle and write report.json, trace.csv, dispatch.csv");
  run_cmd->add_option("--case", case_dir, "Case bundle directory")->required()->check(CLI::ExistingDirectory);
  run_cmd->add_option("--method", method, "monolithic, benders or benders-classic")
      ->check(CLI::IsMember({"monolithic", "benders", "benders-classic"}));
  run_cmd->add_option("--scenario", scenario, "ref, rps or co2 (default: manifest)")
      ->check(CLI::IsMember({"ref", "rps", "co2"}));
  run_cmd->add_option("--weeks", weeks, "Week count or comma separated week ids");
  run_cmd->add_flag("--relax", run_opts.relax, "Relax integrality of investments");
  run_cmd->add_option("--tol", run_opts.rel_tol, "Relative optimality gap")->check(CLI::PositiveNumber);
  run_cmd->add_option("--kmax", run_opts.k_max, "Iteration limit")->check(CLI::PositiveNumber);
  run_cmd->add_option("--mip-gap", run_opts.mip_gap, "Branch-and-bound gap")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--workers", run_opts.workers, "Subproblem threads")->check(CLI::PositiveNumber);
  bool no_warmup = false;
  run_cmd->add_flag("--no-warmup", no_warmup, "Start decomposed integer runs on the integer master");
  run_cmd->add_option("--seed", seed, "Random week sample when --weeks is a count (0: evenly spaced)");
  run_cmd->add_option("--out", out_dir, "Output directory");

  SyntheticOptions gen;
  bool replica = false, no_uc = false, no_storage = false;
  std::string gen_scenario = "ref";
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic case bundle");
  gen_cmd->add_option("--out", out_dir, "Output directory")->required();
  gen_cmd->add_option("--zones", gen.zones)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--weeks", gen.subperiods, "Subperiod count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--hours", gen.hours, "Hours per subperiod")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--scenario", gen_scenario)->check(CLI::IsMember({"ref", "rps", "co2"}));
  gen_cmd->add_flag("--hydro", gen.hydro);
  gen_cmd->add_flag("--no-uc", no_uc);
  gen_cmd->add_flag("--no-storage", no_storage);
  gen_cmd->add_flag("--replica", replica, "Full-year 2-zone, 62-cluster instance");

  auto* validate_cmd = app.add_subcommand("validate", "Load a bundle and report violations");
  validate_cmd->add_option("--case", case_dir)->required();

  std::string report_path, reference_path;
  auto* mse_cmd = app.add_subcommand("mse", "Capacity deviation between two reports");
  mse_cmd->add_option("report", report_path)->required()->check(CLI::ExistingFile);
  mse_cmd->add_option("reference", reference_path)->required()->check(CLI::ExistingFile);

  auto* size_cmd = app.add_subcommand("size", "Variable and constraint counts of the monolithic model");
  size_cmd->add_option("--case", case_dir)->required();
  size_cmd->add_option("--scenario", scenario)->check(CLI::IsMember({"ref", "rps", "co2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*run_cmd) {
      run_opts.lp_warmup = !no_warmup;
      const auto full = load_case(case_dir);
      const auto c = apply_weeks(full, weeks, seed);
      const Scenario sc = scenario.empty() ? c.policy.scenario : parse_scenario(scenario);
      const auto report = run(parse_method(method), c, sc, run_opts);
      fs::create_directories(out_dir);
      write_report(report, fs::path(out_dir) / "report.json");
      emit_trace(report, fs::path(out_dir) / "trace.csv");
      emit_dispatch(report, c, fs::path(out_dir) / "dispatch.csv");
      std::cout << report.status << " objective=" << report.objective << " gap=" << report.gap
                << " iterations=" << report.iterations << '\n';
      return report.converged ? kExitConverged : kExitNotConverged;
    }
    if (*gen_cmd) {
      gen.scenario = parse_scenario(gen_scenario);
      gen.unit_commitment = !no_uc;
      gen.storage = !no_storage;
      auto c = replica ? make_size_replica(gen.seed) : make_synthetic_case(gen);
      c.metadata["expected_clusters"] = std::to_string(c.clusters.size());
      c.metadata["expected_uc_clusters"] = std::to_string(c.num_uc_clusters());
      write_case(c, out_dir);
      std::cout << "wrote " << out_dir << '\n';
      return kExitConverged;
    }
    if (*validate_cmd) {
      const auto c = load_case(case_dir);
      std::cout << "ok: " << c.zones.size() << " zones, " << c.clusters.size() << " clusters ("
                << c.num_uc_clusters() << " committed), " << c.time.num_subperiods() << " subperiods of "
                << c.time.hours_per_subperiod() << " hours\n";
      return kExitConverged;
    }
    if (*mse_cmd) {
      const auto m = compute_capacity_mse(read_report(report_path), read_report(reference_path));
      nlohmann::ordered_json j;
      j["total_mw"] = m.total;
      j["by_type_mw"] = m.by_type;
      std::cout << j.dump(2) << '\n';
      return kExitConverged;
    }
    if (*size_cmd) {
      const auto c = load_case(case_dir);
      const Scenario sc = scenario.empty() ? c.policy.scenario : parse_scenario(scenario);
      const auto program = assemble_monolithic(c, sc, false);
      nlohmann::ordered_json j;
      j["variables"] = program.lp.num_cols();
      j["constraints"] = program.lp.num_rows();
      j["nonzeros"] = program.lp.num_nonzeros();
      std::cout << j.dump(2) << '\n';
      return kExitConverged;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
