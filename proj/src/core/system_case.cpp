#include "cep/core/system_case.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace cep {

namespace {

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

}  // namespace

const char* to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::kThermal: return "thermal";
    case ResourceKind::kVariable: return "vre";
    case ResourceKind::kStorage: return "storage";
    case ResourceKind::kHydro: return "hydro";
  }
  return "?";
}

std::optional<ResourceKind> parse_resource_kind(const std::string& text) {
  const std::string key = lower(text);
  if (key == "thermal") return ResourceKind::kThermal;
  if (key == "vre") return ResourceKind::kVariable;
  if (key == "storage") return ResourceKind::kStorage;
  if (key == "hydro") return ResourceKind::kHydro;
  return std::nullopt;
}

const char* to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kRef: return "ref";
    case Scenario::kRps: return "rps";
    case Scenario::kCo2: return "co2";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text) {
  const std::string key = lower(text);
  if (key == "ref") return Scenario::kRef;
  if (key == "rps") return Scenario::kRps;
  if (key == "co2") return Scenario::kCo2;
  throw std::invalid_argument("unknown scenario '" + text + "' (expected ref, rps or co2)");
}

int SystemCase::zone_index(const std::string& zone) const {
  const auto it = std::find(zones.begin(), zones.end(), zone);
  return it == zones.end() ? -1 : static_cast<int>(it - zones.begin());
}

int SystemCase::num_uc_clusters() const {
  return static_cast<int>(
      std::count_if(clusters.begin(), clusters.end(), [](const auto& g) { return g.is_uc(); }));
}

double SystemCase::weighted_demand() const {
  double total = 0.0;
  for (const auto& profile : demand) {
    for (int t = 1; t <= time.total_hours() && t <= static_cast<int>(profile.size()); ++t) {
      total += time.alpha(t) * profile[t - 1];
    }
  }
  return total;
}

}  // namespace cep
