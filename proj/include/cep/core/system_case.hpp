#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cep/core/time_structure.hpp"

namespace cep {

// Units: capacities in MW / MWh, costs in USD, emissions in tons.

enum class ResourceKind { kThermal, kVariable, kStorage, kHydro };

const char* to_string(ResourceKind kind);
std::optional<ResourceKind> parse_resource_kind(const std::string& text);

struct UnitCommitment {
  double start_cost = 0.0;  // USD per unit start
  int min_up = 0;           // hours
  int min_down = 0;         // hours

  bool operator==(const UnitCommitment&) const = default;
};

struct StorageAttributes {
  double energy_unit_size = 1.0;  // MWh per unit
  double existing_energy = 0.0;
  double max_new_energy = 0.0;
  double min_duration = 0.0;  // hours of energy per MW
  double max_duration = 0.0;
  double charge_efficiency = 1.0;
  double discharge_efficiency = 1.0;
  double self_discharge = 0.0;  // fraction per hour
  double energy_inv_cost = 0.0;  // USD/MWh-yr
  double energy_fom_cost = 0.0;  // USD/MWh-yr

  bool operator==(const StorageAttributes&) const = default;
};

struct HydroAttributes {
  double duration = 0.0;       // reservoir hours per MW
  std::vector<double> inflow;  // per hour, fraction of power capacity
  double energy_inv_cost = 0.0;
  double energy_fom_cost = 0.0;

  bool operator==(const HydroAttributes&) const = default;
};

struct ResourceCluster {
  std::string id;
  std::string zone;
  std::string type;  // technology label used for grouping (ng, solar, ...)
  ResourceKind kind = ResourceKind::kThermal;
  bool rps = false;
  bool no_retire = false;

  double unit_size = 1.0;  // MW per unit
  double existing_capacity = 0.0;
  double max_new_capacity = 0.0;
  std::vector<double> availability;  // sigma per hour

  double min_power = 0.0;
  double ramp_up = 1.0;
  double ramp_down = 1.0;
  double co2_rate = 0.0;   // t/MWh
  double var_cost = 0.0;   // USD/MWh
  double inv_cost = 0.0;   // USD/MW-yr
  double fom_cost = 0.0;   // USD/MW-yr

  std::optional<UnitCommitment> uc;
  std::optional<StorageAttributes> storage;
  std::optional<HydroAttributes> hydro;

  bool is_uc() const { return uc.has_value(); }
  bool is_storage() const { return kind == ResourceKind::kStorage; }
  bool is_hydro() const { return kind == ResourceKind::kHydro; }

  bool operator==(const ResourceCluster&) const = default;
};

struct TransmissionLine {
  std::string id;
  std::string from;
  std::string to;
  double existing_capacity = 0.0;
  double max_new_capacity = 0.0;
  double cost = 0.0;  // USD/MW-yr

  bool operator==(const TransmissionLine&) const = default;
};

struct ConsumerSegment {
  std::string id;
  double cost = 0.0;          // USD/MWh curtailed
  double max_fraction = 0.0;  // share of zonal demand

  bool operator==(const ConsumerSegment&) const = default;
};

enum class Scenario { kRef, kRps, kCo2 };

const char* to_string(Scenario scenario);
Scenario parse_scenario(const std::string& text);  // throws on unknown

struct PolicySpec {
  Scenario scenario = Scenario::kRef;
  double rps_share = 0.7;
  double co2_intensity = 0.05;  // t/MWh of weighted demand
  double rps_penalty = 5e4;     // USD per unit slack, every subperiod
  double co2_penalty = 5e4;

  bool operator==(const PolicySpec&) const = default;
};

struct SystemCase {
  std::string name;
  std::vector<std::string> zones;
  std::vector<ResourceCluster> clusters;
  std::vector<TransmissionLine> lines;
  std::vector<std::vector<double>> demand;  // [zone][hour-1]
  std::vector<ConsumerSegment> segments;
  PolicySpec policy;
  TimeStructure time;
  double year_hours = 8736.0;
  // Free-form manifest entries that are not interpreted by the model.
  std::map<std::string, std::string> metadata;

  int zone_index(const std::string& zone) const;  // -1 when absent
  int num_uc_clusters() const;
  // sum over hours and zones of alpha_t * d_{z,t}
  double weighted_demand() const;

  bool operator==(const SystemCase&) const = default;
};

}  // namespace cep
