#include "cep/core/time_structure.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <stdexcept>

namespace cep {
namespace {

TimeStructure uniform(int weeks, int tau, double rho) {
  return TimeStructure(tau, std::vector<double>(weeks, rho));
}

TEST(CircularPrev, WrapsToEndOfSubperiod) {
  const auto ts = uniform(3, 10, 10.0);
  EXPECT_EQ(circular_prev(11, 1, 2, ts), 20);
}

TEST(CircularPrev, ZeroStepsIsIdentity) {
  const auto ts = uniform(4, 7, 7.0);
  for (int t = 1; t <= ts.total_hours(); ++t) {
    EXPECT_EQ(circular_prev(t, 0, ts.subperiod_of(t), ts), t);
  }
}

TEST(CircularPrev, FullWeekWrap) {
  // Enumerate the circular array of H_1: stepping back 167 from hour 1 in a
  // 168-hour ring lands one hour ahead.
  const auto ts = uniform(1, 168, 168.0);
  std::vector<int> ring(168);
  for (int i = 0; i < 168; ++i) ring[i] = i + 1;
  const int expected = ring[(0 - 167 + 168) % 168];
  EXPECT_EQ(expected, 2);
  EXPECT_EQ(circular_prev(1, 167, 1, ts), expected);
}

TEST(CircularPrev, RejectsHourOutsideSubperiod) {
  const auto ts = uniform(2, 4, 4.0);
  EXPECT_THROW(circular_prev(5, 1, 1, ts), std::out_of_range);
  EXPECT_THROW(circular_prev(1, 4, 1, ts), std::out_of_range);
  EXPECT_THROW(circular_prev(1, -1, 1, ts), std::out_of_range);
}

TEST(CircularPrev, BijectionAndPeriodicity) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int tau = 1 + static_cast<int>(rng() % 30);
    const int weeks = 1 + static_cast<int>(rng() % 5);
    const auto ts = uniform(weeks, tau, tau);
    const int w = 1 + static_cast<int>(rng() % weeks);
    const int n = static_cast<int>(rng() % tau);
    std::set<int> image;
    for (int t = ts.first_hour(w); t <= ts.last_hour(w); ++t) {
      image.insert(circular_prev(t, n, w, ts));
      int s = t;
      if (tau > 1) {
        for (int k = 0; k < tau; ++k) s = circular_prev(s, 1, w, ts);
      }
      EXPECT_EQ(s, t);
    }
    EXPECT_EQ(static_cast<int>(image.size()), tau);
    EXPECT_EQ(*image.begin(), ts.first_hour(w));
    EXPECT_EQ(*image.rbegin(), ts.last_hour(w));
  }
}

TEST(TimestepWeight, FullYearIsOne) {
  const auto ts = uniform(52, 168, 168.0);
  EXPECT_DOUBLE_EQ(timestep_weight(1, ts), 1.0);
  EXPECT_DOUBLE_EQ(timestep_weight(8736, ts), 1.0);
  EXPECT_DOUBLE_EQ(ts.represented_hours(), 8736.0);
}

TEST(TimestepWeight, SingleRepresentativeWeek) {
  const auto ts = uniform(1, 168, 8736.0);
  EXPECT_DOUBLE_EQ(timestep_weight(100, ts), 52.0);
}

TEST(TimestepWeight, TwelveWeeks) {
  const auto ts = uniform(12, 168, 728.0);
  EXPECT_NEAR(timestep_weight(5, ts), 8736.0 / 12.0 / 168.0, 1e-15);
  EXPECT_NEAR(timestep_weight(5, ts), 4.333333333333333, 1e-12);
}

TEST(TimestepWeight, OrphanHourThrows) {
  const auto ts = uniform(2, 4, 4.0);
  EXPECT_THROW(timestep_weight(0, ts), std::out_of_range);
  EXPECT_THROW(timestep_weight(9, ts), std::out_of_range);
}

TEST(TimestepWeight, WeightsSumToRepresentedHours) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> weight(1.0, 500.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int weeks = 1 + static_cast<int>(rng() % 8);
    const int tau = 1 + static_cast<int>(rng() % 24);
    std::vector<double> rho(weeks);
    for (auto& r : rho) r = weight(rng);
    const TimeStructure ts(tau, rho);
    double sum = 0.0;
    for (int t = 1; t <= ts.total_hours(); ++t) sum += ts.alpha(t);
    EXPECT_NEAR(sum, ts.represented_hours(), 1e-9 * ts.represented_hours());
  }
}

}  // namespace
}  // namespace cep
