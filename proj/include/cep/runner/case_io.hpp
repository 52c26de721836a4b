#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cep/core/system_case.hpp"

namespace cep {

// Parse or validation failure while reading a case bundle. `row` is the
// 1-based line number in `file`, 0 when the problem is not tied to a line.
class CaseFormatError : public std::runtime_error {
 public:
  CaseFormatError(std::string file, int row, const std::string& message);

  const std::string& file() const { return file_; }
  int row() const { return row_; }

 private:
  std::string file_;
  int row_;
};

// Case bundle layout (comma separated, one header line per table):
//   manifest.ini      [case] name, scenario, hours_per_subperiod, weights,
//                     week_ids, year_hours, rps_share, co2_intensity,
//                     rps_penalty, co2_penalty; [metadata] free-form keys
//   zones.csv         zone
//   resources.csv     id, zone, type, kind, rps, no_retire, unit_size,
//                     existing_capacity, max_new_capacity, min_power, ramp_up,
//                     ramp_down, co2_rate, var_cost, inv_cost, fom_cost,
//                     start_cost, min_up, min_down (blank: no commitment),
//                     energy_unit_size, existing_energy, max_new_energy,
//                     min_duration, max_duration, charge_efficiency,
//                     discharge_efficiency, self_discharge, energy_inv_cost,
//                     energy_fom_cost, reservoir_hours
//   transmission.csv  id, from, to, existing_capacity, max_new_capacity, cost
//   demand.csv        hour, one column per zone
//   availability.csv  hour, one column per resource id
//   inflows.csv       hour, one column per hydro resource id
//   segments.csv      id, cost, max_fraction
// Optional resource columns default to the SystemCase defaults. Metadata keys
// `expected_clusters` and `expected_uc_clusters` are checked against the
// loaded resources.
SystemCase load_case(const std::filesystem::path& dir);

// Writes every file of the bundle, creating `dir` if needed. Numbers use the
// shortest representation that reads back to the same double.
void write_case(const SystemCase& c, const std::filesystem::path& dir);

// Restricts hourly profiles to the listed source weeks (labels from
// c.time.week_ids()) and assigns them the given weights. Weights must be
// positive and sum to c.year_hours within 1e-6 relative.
SystemCase select_weeks(const SystemCase& c, const std::vector<int>& week_ids,
                        const std::vector<double>& weights);

// `count` evenly spaced weeks sharing the year equally.
SystemCase select_even_weeks(const SystemCase& c, int count);

}  // namespace cep
