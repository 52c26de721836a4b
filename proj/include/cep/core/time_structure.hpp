#pragma once

#include <vector>

namespace cep {

// Subperiod layout of a planning year. Subperiods are numbered 1..|W| and hours
// are 1-based global indices: subperiod w owns H_w = {(w-1)*tau+1, ..., w*tau}.
// Every subperiod has the same length tau.
class TimeStructure {
 public:
  TimeStructure() = default;

  // `weights` holds rho_w, the number of year hours each subperiod represents.
  // `week_ids` are the source-week labels (defaults to 1..|W|).
  TimeStructure(int hours_per_subperiod, std::vector<double> weights,
                std::vector<int> week_ids = {});

  int num_subperiods() const { return static_cast<int>(weights_.size()); }
  int hours_per_subperiod() const { return hours_per_subperiod_; }
  int total_hours() const { return num_subperiods() * hours_per_subperiod_; }

  double weight(int w) const;
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<int>& week_ids() const { return week_ids_; }

  int first_hour(int w) const;  // t0_w
  int last_hour(int w) const;   // t_w

  // Subperiod containing hour t; throws std::out_of_range for orphan hours.
  int subperiod_of(int t) const;

  // alpha_t = rho_w / tau for t in H_w.
  double alpha(int t) const;

  // Sum of rho_w.
  double represented_hours() const;

  bool operator==(const TimeStructure&) const = default;

 private:
  void check_subperiod(int w) const;

  int hours_per_subperiod_ = 0;
  std::vector<double> weights_;
  std::vector<int> week_ids_;
};

// g_{w,n}(t): the hour n steps before t when H_w is read as a circular array.
int circular_prev(int t, int n, int w, const TimeStructure& ts);

double timestep_weight(int t, const TimeStructure& ts);

}  // namespace cep
