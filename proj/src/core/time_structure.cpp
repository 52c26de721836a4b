#include "cep/core/time_structure.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace cep {

TimeStructure::TimeStructure(int hours_per_subperiod, std::vector<double> weights,
                             std::vector<int> week_ids)
    : hours_per_subperiod_(hours_per_subperiod),
      weights_(std::move(weights)),
      week_ids_(std::move(week_ids)) {
  if (hours_per_subperiod_ <= 0) {
    throw std::invalid_argument("hours per subperiod must be positive");
  }
  if (week_ids_.empty()) {
    week_ids_.resize(weights_.size());
    std::iota(week_ids_.begin(), week_ids_.end(), 1);
  }
  if (week_ids_.size() != weights_.size()) {
    throw std::invalid_argument("week id count does not match weight count");
  }
}

void TimeStructure::check_subperiod(int w) const {
  if (w < 1 || w > num_subperiods()) {
    throw std::out_of_range("subperiod " + std::to_string(w) + " outside 1.." +
                            std::to_string(num_subperiods()));
  }
}

double TimeStructure::weight(int w) const {
  check_subperiod(w);
  return weights_[w - 1];
}

int TimeStructure::first_hour(int w) const {
  check_subperiod(w);
  return (w - 1) * hours_per_subperiod_ + 1;
}

int TimeStructure::last_hour(int w) const {
  check_subperiod(w);
  return w * hours_per_subperiod_;
}

int TimeStructure::subperiod_of(int t) const {
  if (t < 1 || t > total_hours()) {
    throw std::out_of_range("hour " + std::to_string(t) + " belongs to no subperiod");
  }
  return (t - 1) / hours_per_subperiod_ + 1;
}

double TimeStructure::alpha(int t) const {
  return weights_[subperiod_of(t) - 1] / hours_per_subperiod_;
}

double TimeStructure::represented_hours() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

int circular_prev(int t, int n, int w, const TimeStructure& ts) {
  const int t0 = ts.first_hour(w);
  const int tau = ts.hours_per_subperiod();
  if (t < t0 || t > ts.last_hour(w)) {
    throw std::out_of_range("hour " + std::to_string(t) + " not in subperiod " +
                            std::to_string(w));
  }
  if (n < 0 || n >= tau) {
    throw std::out_of_range("step count " + std::to_string(n) + " outside [0, tau)");
  }
  const int offset = ((t - t0 - n) % tau + tau) % tau;
  return t0 + offset;
}

double timestep_weight(int t, const TimeStructure& ts) { return ts.alpha(t); }

}  // namespace cep
