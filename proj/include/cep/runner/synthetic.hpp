#pragma once

#include <cstdint>

#include "cep/core/system_case.hpp"

namespace cep {

struct SyntheticOptions {
  int zones = 1;
  int subperiods = 2;
  int hours = 4;  // per subperiod
  std::uint64_t seed = 1;
  Scenario scenario = Scenario::kRef;
  bool unit_commitment = true;
  bool storage = true;
  bool hydro = false;
  double year_hours = 8736.0;
};

// Small randomized planning instance: per zone a committed combined-cycle
// cluster, a peaker, solar, wind and optionally a battery and a hydro cluster;
// zones are chained by lines. Subperiods share the year equally.
SystemCase make_synthetic_case(const SyntheticOptions& options);

// Full-year sized instance with 2 zones, 62 clusters of which 16 are
// committed, 52 subperiods of 168 hours, used for model-size checks.
SystemCase make_size_replica(std::uint64_t seed = 7);

}  // namespace cep
