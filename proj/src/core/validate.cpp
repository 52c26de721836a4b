#include "cep/core/validate.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cep {

namespace {

class Collector {
 public:
  void add(std::string code, std::string message) {
    report_.violations.push_back({std::move(code), std::move(message)});
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

void check_profile(Collector& out, const std::string& what, const std::vector<double>& profile,
                   int hours, double lo, double hi) {
  if (static_cast<int>(profile.size()) != hours) {
    out.add("profile_length", what + " has " + std::to_string(profile.size()) +
                                  " hours, expected " + std::to_string(hours));
    return;
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (!(profile[i] >= lo && profile[i] <= hi)) {
      out.add("range", what + " value at hour " + std::to_string(i + 1) + " outside [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return;
    }
  }
}

void check_cluster(Collector& out, const SystemCase& sc, const ResourceCluster& g) {
  const int hours = sc.time.total_hours();
  const int tau = sc.time.hours_per_subperiod();
  const std::string who = "cluster '" + g.id + "'";

  if (sc.zone_index(g.zone) < 0) {
    out.add("zone_ref", who + " references unknown zone '" + g.zone + "'");
  }
  if (!(g.unit_size > 0.0)) out.add("range", who + " unit size must be positive");
  if (g.existing_capacity < 0.0 || g.max_new_capacity < 0.0) {
    out.add("range", who + " capacities must be non-negative");
  }
  if (!in_unit_interval(g.min_power)) out.add("range", who + " min power outside [0,1]");
  if (g.ramp_up < 0.0 || g.ramp_down < 0.0) out.add("range", who + " negative ramp rate");
  check_profile(out, who + " availability", g.availability, hours, 0.0, 1.0);

  if (g.uc) {
    if (g.kind != ResourceKind::kThermal) {
      out.add("uc_attributes", who + " carries UC attributes but is not thermal");
    }
    if (g.uc->min_up < 0 || g.uc->min_down < 0 || g.uc->min_up >= tau ||
        g.uc->min_down >= tau) {
      out.add("uc_attributes", who + " min up/down times must lie in [0, tau)");
    }
  }

  if (g.is_storage() != g.storage.has_value()) {
    out.add("storage_attributes",
            who + (g.storage ? " has storage attributes but is not storage"
                             : " is storage but lacks storage attributes"));
  }
  if (g.storage) {
    const auto& s = *g.storage;
    if (s.min_duration > s.max_duration) {
      out.add("duration", who + " min duration exceeds max duration");
    }
    if (!(s.charge_efficiency > 0.0 && s.charge_efficiency <= 1.0) ||
        !(s.discharge_efficiency > 0.0 && s.discharge_efficiency <= 1.0)) {
      out.add("efficiency", who + " efficiencies must lie in (0,1]");
    }
    if (!(s.self_discharge >= 0.0 && s.self_discharge < 1.0)) {
      out.add("range", who + " self discharge outside [0,1)");
    }
    if (!(s.energy_unit_size > 0.0)) out.add("range", who + " energy unit size must be positive");
  }

  if (g.is_hydro() != g.hydro.has_value()) {
    out.add("hydro_attributes",
            who + (g.hydro ? " has hydro attributes but is not hydro"
                           : " is hydro but lacks hydro attributes"));
  }
  if (g.hydro) {
    if (g.hydro->duration < 0.0) out.add("range", who + " negative reservoir duration");
    check_profile(out, who + " inflow", g.hydro->inflow, hours, 0.0, 1e300);
  }
}

// Operational feasibility for any investment: NSE must be able to cover all
// demand, and must-run output (min power rows without commitment) must never
// be forced above what the zone can absorb or above availability.
void check_recourse(Collector& out, const SystemCase& sc) {
  double curtailable = 0.0;
  for (const auto& s : sc.segments) {
    if (!in_unit_interval(s.max_fraction) || s.cost < 0.0) {
      out.add("range", "segment '" + s.id + "' has invalid cost or fraction");
    }
    curtailable += s.max_fraction;
  }
  for (std::size_t z = 0; z < sc.zones.size(); ++z) {
    if (curtailable < 1.0 - 1e-12) {
      std::ostringstream msg;
      msg << "recourse not guaranteed in zone '" << sc.zones[z]
          << "': curtailable fractions sum to " << curtailable << " < 1";
      out.add("recourse", msg.str());
    }
  }

  for (std::size_t z = 0; z < sc.zones.size(); ++z) {
    double floor = 0.0;
    for (const auto& g : sc.clusters) {
      if (g.zone != sc.zones[z] || g.is_uc() || g.is_storage() || g.is_hydro()) continue;
      if (g.min_power <= 0.0) continue;
      floor += g.min_power * (g.existing_capacity + g.max_new_capacity);
      for (std::size_t t = 0; t < g.availability.size(); ++t) {
        if (g.availability[t] < g.min_power) {
          out.add("must_run", "cluster '" + g.id + "' min power exceeds availability at hour " +
                                  std::to_string(t + 1));
          break;
        }
      }
    }
    if (floor > 0.0 && z < sc.demand.size() && !sc.demand[z].empty()) {
      const double min_demand = *std::min_element(sc.demand[z].begin(), sc.demand[z].end());
      if (floor > min_demand) {
        out.add("must_run", "zone '" + sc.zones[z] +
                                "' must-run floor exceeds its minimum hourly demand");
      }
    }
  }
}

}  // namespace

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].message;
  }
  return out.str();
}

ValidationReport validate_case(const SystemCase& sc) {
  Collector out;
  if (sc.zones.empty()) {
    out.add("no_zones", "no zones");
    return out.take();
  }
  if (sc.time.num_subperiods() == 0) {
    out.add("time", "no subperiods");
    return out.take();
  }
  for (double rho : sc.time.weights()) {
    if (!(rho > 0.0)) out.add("time", "subperiod weights must be positive");
  }

  std::set<std::string> seen;
  for (const auto& zone : sc.zones) {
    if (!seen.insert(zone).second) out.add("duplicate_id", "duplicate zone '" + zone + "'");
  }
  seen.clear();
  for (const auto& g : sc.clusters) {
    if (!seen.insert(g.id).second) out.add("duplicate_id", "duplicate cluster '" + g.id + "'");
    check_cluster(out, sc, g);
  }
  seen.clear();
  for (const auto& l : sc.lines) {
    const std::string who = "line '" + l.id + "'";
    if (!seen.insert(l.id).second) out.add("duplicate_id", "duplicate " + who);
    if (sc.zone_index(l.from) < 0 || sc.zone_index(l.to) < 0) {
      out.add("zone_ref", who + " references an unknown zone");
    }
    if (l.from == l.to) out.add("line", who + " connects a zone to itself");
    if (l.existing_capacity < 0.0 || l.max_new_capacity < 0.0) {
      out.add("range", who + " capacities must be non-negative");
    }
  }

  if (sc.demand.size() != sc.zones.size()) {
    out.add("profile_length", "demand has " + std::to_string(sc.demand.size()) +
                                  " zone profiles, expected " + std::to_string(sc.zones.size()));
  } else {
    for (std::size_t z = 0; z < sc.zones.size(); ++z) {
      check_profile(out, "demand of zone '" + sc.zones[z] + "'", sc.demand[z],
                    sc.time.total_hours(), 0.0, 1e300);
    }
  }
  if (sc.segments.empty()) out.add("recourse", "no consumer segments: recourse not guaranteed");
  check_recourse(out, sc);

  const auto& p = sc.policy;
  if (!in_unit_interval(p.rps_share)) out.add("policy", "RPS share outside [0,1]");
  if (p.co2_intensity < 0.0) out.add("policy", "negative CO2 intensity");
  if (!(p.rps_penalty > 0.0) || !(p.co2_penalty > 0.0)) {
    out.add("policy", "policy penalties must be positive");
  }
  return out.take();
}

}  // namespace cep
