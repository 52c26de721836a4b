#include "cep/runner/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cep {

namespace {

class Profiles {
 public:
  explicit Profiles(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  // Daylight bump repeating every `period` hours, with cloud noise.
  std::vector<double> solar(int hours, int period) {
    std::vector<double> out(hours);
    for (int t = 0; t < hours; ++t) {
      const double phase = (t % period + 0.5) / period;
      const double sun = std::max(0.0, std::sin(std::numbers::pi * (phase * 1.4 - 0.2)));
      out[t] = std::clamp(sun * uniform(0.6, 1.0), 0.0, 1.0);
    }
    return out;
  }

  // Autocorrelated random availability.
  std::vector<double> wind(int hours) {
    std::vector<double> out(hours);
    double level = uniform(0.2, 0.8);
    for (int t = 0; t < hours; ++t) {
      level = std::clamp(0.7 * level + 0.3 * uniform(0.0, 1.0), 0.02, 0.98);
      out[t] = level;
    }
    return out;
  }

  std::vector<double> demand(int hours, int period, double base) {
    std::vector<double> out(hours);
    for (int t = 0; t < hours; ++t) {
      const double phase = (t % period + 0.5) / period;
      out[t] = base * (1.0 + 0.25 * std::sin(2.0 * std::numbers::pi * phase) + uniform(-0.05, 0.05));
    }
    return out;
  }

  std::vector<double> inflow(int hours) {
    std::vector<double> out(hours);
    for (auto& v : out) v = uniform(0.2, 0.6);
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

ResourceCluster thermal(const std::string& zone, const std::string& type, int hours) {
  ResourceCluster g;
  g.id = zone + "_" + type;
  g.zone = zone;
  g.type = type;
  g.kind = ResourceKind::kThermal;
  g.availability.assign(hours, 1.0);
  return g;
}

ResourceCluster variable(const std::string& zone, const std::string& type, std::vector<double> profile) {
  ResourceCluster g;
  g.id = zone + "_" + type;
  g.zone = zone;
  g.type = type;
  g.kind = ResourceKind::kVariable;
  g.rps = true;
  g.availability = std::move(profile);
  return g;
}

std::vector<ConsumerSegment> default_segments() {
  return {{"seg1", 2000.0, 0.05}, {"seg2", 9000.0, 0.95}};
}

}  // namespace

SystemCase make_synthetic_case(const SyntheticOptions& o) {
  Profiles rand(o.seed);
  const int H = o.subperiods * o.hours;
  SystemCase c;
  c.name = "synthetic-" + std::to_string(o.seed);
  c.year_hours = o.year_hours;
  c.time = TimeStructure(o.hours, std::vector<double>(o.subperiods, o.year_hours / o.subperiods));
  c.segments = default_segments();
  c.policy.scenario = o.scenario;

  for (int z = 0; z < o.zones; ++z) {
    const std::string zone = "z" + std::to_string(z + 1);
    c.zones.push_back(zone);
    const double base = rand.uniform(500.0, 900.0);
    c.demand.push_back(rand.demand(H, o.hours, base));

    auto cc = thermal(zone, "ng_cc", H);
    cc.unit_size = 100.0;
    cc.existing_capacity = z == 0 ? 200.0 : 0.0;
    cc.max_new_capacity = 1500.0;
    cc.ramp_up = cc.ramp_down = 0.5;
    cc.co2_rate = 0.37;
    cc.var_cost = rand.uniform(22.0, 28.0);
    cc.inv_cost = 95000.0;
    cc.fom_cost = 12000.0;
    if (o.unit_commitment) {
      cc.min_power = 0.3;
      const int min_time = std::min(2, o.hours - 1);
      cc.uc = UnitCommitment{6000.0, min_time, min_time};
    }
    c.clusters.push_back(cc);

    auto ct = thermal(zone, "ng_ct", H);
    ct.unit_size = 50.0;
    ct.existing_capacity = 100.0;
    ct.max_new_capacity = 1000.0;
    ct.co2_rate = 0.55;
    ct.var_cost = rand.uniform(50.0, 60.0);
    ct.inv_cost = 70000.0;
    ct.fom_cost = 9000.0;
    c.clusters.push_back(ct);

    auto pv = variable(zone, "solar", rand.solar(H, o.hours));
    pv.unit_size = 10.0;
    pv.max_new_capacity = 3000.0;
    pv.inv_cost = rand.uniform(55000.0, 65000.0);
    pv.fom_cost = 15000.0;
    c.clusters.push_back(pv);

    auto wt = variable(zone, "wind", rand.wind(H));
    wt.unit_size = 10.0;
    wt.max_new_capacity = 3000.0;
    wt.inv_cost = rand.uniform(100000.0, 120000.0);
    wt.fom_cost = 35000.0;
    c.clusters.push_back(wt);

    if (o.storage) {
      ResourceCluster bat;
      bat.id = zone + "_battery";
      bat.zone = zone;
      bat.type = "battery";
      bat.kind = ResourceKind::kStorage;
      bat.unit_size = 10.0;
      bat.max_new_capacity = 1000.0;
      bat.availability.assign(H, 1.0);
      bat.var_cost = 2.0;
      bat.inv_cost = 30000.0;
      bat.fom_cost = 5000.0;
      StorageAttributes s;
      s.energy_unit_size = 10.0;
      s.max_new_energy = 6000.0;
      s.min_duration = 1.0;
      s.max_duration = 6.0;
      s.charge_efficiency = 0.92;
      s.discharge_efficiency = 0.92;
      s.self_discharge = 0.001;
      s.energy_inv_cost = 12000.0;
      s.energy_fom_cost = 2000.0;
      bat.storage = s;
      c.clusters.push_back(bat);
    }

    if (o.hydro) {
      ResourceCluster hy;
      hy.id = zone + "_hydro";
      hy.zone = zone;
      hy.type = "hydro";
      hy.kind = ResourceKind::kHydro;
      hy.rps = true;
      hy.no_retire = true;
      hy.unit_size = 50.0;
      hy.existing_capacity = 150.0;
      hy.max_new_capacity = 100.0;
      hy.availability.assign(H, 1.0);
      hy.min_power = 0.1;
      hy.var_cost = 1.0;
      hy.inv_cost = 150000.0;
      hy.fom_cost = 20000.0;
      hy.hydro = HydroAttributes{4.0, rand.inflow(H), 1000.0, 200.0};
      c.clusters.push_back(hy);
    }
  }

  for (int z = 0; z + 1 < o.zones; ++z) {
    TransmissionLine line;
    line.id = c.zones[z] + "_" + c.zones[z + 1];
    line.from = c.zones[z];
    line.to = c.zones[z + 1];
    line.existing_capacity = 100.0;
    line.max_new_capacity = 400.0;
    line.cost = 25000.0;
    c.lines.push_back(line);
  }
  return c;
}

SystemCase make_size_replica(std::uint64_t seed) {
  Profiles rand(seed);
  const int tau = 168;
  const int W = 52;
  const int H = tau * W;
  SystemCase c;
  c.name = "size-replica";
  c.time = TimeStructure(tau, std::vector<double>(W, static_cast<double>(tau)));
  c.segments = default_segments();
  c.metadata["expected_clusters"] = "62";
  c.metadata["expected_uc_clusters"] = "16";

  for (int z = 0; z < 2; ++z) {
    const std::string zone = "z" + std::to_string(z + 1);
    c.zones.push_back(zone);
    c.demand.push_back(rand.demand(H, 24, rand.uniform(20000.0, 30000.0)));
    auto add = [&](ResourceCluster g, int k) {
      g.id += "_" + std::to_string(k + 1);
      c.clusters.push_back(std::move(g));
    };
    for (int k = 0; k < 8; ++k) {
      auto g = thermal(zone, k < 5 ? "ng_cc" : "coal", H);
      g.unit_size = 250.0;
      g.existing_capacity = 1000.0;
      g.max_new_capacity = 5000.0;
      g.min_power = 0.3;
      g.ramp_up = g.ramp_down = 0.5;
      g.co2_rate = k < 5 ? 0.37 : 0.95;
      g.var_cost = 25.0 + k;
      g.inv_cost = 95000.0;
      g.fom_cost = 12000.0;
      g.uc = UnitCommitment{8000.0, 6, 6};
      add(std::move(g), k);
    }
    for (int k = 0; k < 6; ++k) {
      auto g = thermal(zone, k < 4 ? "ng_ct" : "nuclear", H);
      g.unit_size = 100.0;
      g.existing_capacity = 500.0;
      g.max_new_capacity = 3000.0;
      g.co2_rate = k < 4 ? 0.55 : 0.0;
      g.var_cost = k < 4 ? 55.0 + k : 8.0;
      g.inv_cost = k < 4 ? 70000.0 : 400000.0;
      g.fom_cost = 9000.0;
      add(std::move(g), k);
    }
    for (int k = 0; k < 10; ++k) {
      auto g = k < 5 ? variable(zone, "solar", rand.solar(H, 24)) : variable(zone, "wind", rand.wind(H));
      g.unit_size = 10.0;
      g.max_new_capacity = 20000.0;
      g.inv_cost = k < 5 ? 60000.0 : 110000.0;
      g.fom_cost = 20000.0;
      add(std::move(g), k);
    }
    for (int k = 0; k < 4; ++k) {
      ResourceCluster g;
      g.id = zone + "_battery";
      g.zone = zone;
      g.type = "battery";
      g.kind = ResourceKind::kStorage;
      g.unit_size = 10.0;
      g.max_new_capacity = 5000.0;
      g.availability.assign(H, 1.0);
      StorageAttributes s;
      s.energy_unit_size = 10.0;
      s.max_new_energy = 40000.0;
      s.min_duration = 1.0;
      s.max_duration = 8.0;
      s.charge_efficiency = s.discharge_efficiency = 0.92;
      g.storage = s;
      add(std::move(g), k);
    }
    for (int k = 0; k < 3; ++k) {
      ResourceCluster g;
      g.id = zone + "_hydro";
      g.zone = zone;
      g.type = "hydro";
      g.kind = ResourceKind::kHydro;
      g.rps = true;
      g.no_retire = true;
      g.unit_size = 50.0;
      g.existing_capacity = 500.0;
      g.availability.assign(H, 1.0);
      g.min_power = 0.1;
      g.hydro = HydroAttributes{6.0, rand.inflow(H), 0.0, 0.0};
      add(std::move(g), k);
    }
  }
  TransmissionLine line;
  line.id = "z1_z2";
  line.from = "z1";
  line.to = "z2";
  line.existing_capacity = 2000.0;
  line.max_new_capacity = 5000.0;
  line.cost = 25000.0;
  c.lines.push_back(line);
  return c;
}

}  // namespace cep
