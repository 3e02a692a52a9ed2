// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "metrics.hpp"
#include "model.hpp"
#include "solver.hpp"
#include "support.hpp"

using namespace evcharge;
using evtest::ev;
using evtest::make_instance;

namespace {

ChargingInstance day_instance() {
  return make_instance(std::vector<double>(24, 1.5), 0.0, 0.0, 300.0, {ev(9, 16, 7, 7)});
}

}  // namespace

TEST(PowerProfile, ColumnSums) {
  auto inst = make_instance({1, 1}, 0, 0, 50, {ev(0, 1, 3, 7), ev(0, 1, 11, 7)});
  Schedule r(2, 2);
  r.rates() = {3, 0, 4, 7};
  EXPECT_EQ(power_profile(inst, r), (std::vector<double>{7, 7}));
  EXPECT_EQ(power_profile(inst, Schedule(2, 2)), (std::vector<double>{0, 0}));
}

TEST(ChargingTime, CompletionSemantics) {
  auto inst = day_instance();
  Schedule first(1, 24);
  first.at(0, 9) = 7;
  EXPECT_DOUBLE_EQ(charging_time(inst, first), 1.0);

  Schedule gap(1, 24);
  gap.at(0, 9) = 3.5;
  gap.at(0, 12) = 3.5;
  EXPECT_DOUBLE_EQ(charging_time(inst, gap), 4.0);
  EXPECT_DOUBLE_EQ(charging_time(inst, gap, kDefaultActiveKw, ChargingTimeMode::kActiveSlots),
                   2.0);
  EXPECT_DOUBLE_EQ(charging_time(inst, Schedule(1, 24)), 0.0);
}

TEST(ChargingTime, ThresholdAndSlotLength) {
  auto inst = make_instance(std::vector<double>(8, 1.0), 0, 0, 100, {ev(2, 7, 3, 7)}, 15);
  Schedule r(1, 8);
  r.at(0, 3) = 5;
  r.at(0, 6) = 5e-4;  // below the default threshold
  EXPECT_DOUBLE_EQ(charging_time(inst, r), 0.5);
  EXPECT_DOUBLE_EQ(charging_time(inst, r, 1e-4), 1.25);
  auto hours = completion_hours(inst, r);
  ASSERT_EQ(hours.size(), 1u);
  EXPECT_DOUBLE_EQ(hours[0], 0.5);
}

TEST(Summarize, Consistency) {
  auto inst = make_instance({1.1, 2.871, 1.7}, 1.0, 5.0, 20, {ev(0, 2, 10, 7), ev(1, 2, 5, 7)});
  auto r = solve(inst);
  auto m = summarize(inst, r.schedule);
  EXPECT_DOUBLE_EQ(m.total_cost, nominal_cost(inst, r.schedule));
  EXPECT_DOUBLE_EQ(m.total_charging_time_hours, charging_time(inst, r.schedule));
  EXPECT_EQ(m.per_slot_power_kw, power_profile(inst, r.schedule));
  for (std::size_t t = 0; t < 3; ++t) EXPECT_LE(m.per_slot_power_kw[t], 20.0 + 1e-6);

  auto zero = summarize(inst, Schedule(2, 3));
  EXPECT_EQ(zero.total_cost, 0.0);
  EXPECT_EQ(zero.total_charging_time_hours, 0.0);
  for (double p : zero.per_slot_power_kw) EXPECT_EQ(p, 0.0);
}
