// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_METRICS_HPP_
#define EVCHARGE_CORE_METRICS_HPP_

#include <vector>

#include "model.hpp"

namespace evcharge {

inline constexpr double kDefaultActiveKw = 1e-3;

enum class ChargingTimeMode {
  kCompletion,   // first window slot through last active slot, gaps included
  kActiveSlots,  // number of slots with an active rate
};

struct ScheduleMetrics {
  double total_cost = 0.0;
  double total_charging_time_hours = 0.0;
  std::vector<double> per_slot_power_kw;
  double active_threshold_kw = kDefaultActiveKw;
};

// Column sums sum_i r_it.
std::vector<double> power_profile(const ChargingInstance& instance,
                                  const Schedule& schedule);

// Hours summed over EVs. A slot is active when its rate exceeds eps_active
// (kW); EVs never active contribute zero.
double charging_time(const ChargingInstance& instance, const Schedule& schedule,
                     double eps_active = kDefaultActiveKw,
                     ChargingTimeMode mode = ChargingTimeMode::kCompletion);

// Per-EV completion hours in completion mode, indexed by EV.
std::vector<double> completion_hours(const ChargingInstance& instance,
                                     const Schedule& schedule,
                                     double eps_active = kDefaultActiveKw);

ScheduleMetrics summarize(const ChargingInstance& instance, const Schedule& schedule,
                          double eps_active = kDefaultActiveKw);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_METRICS_HPP_
