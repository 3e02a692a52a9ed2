// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "metrics.hpp"

#include "error.hpp"

namespace evcharge {

std::vector<double> power_profile(const ChargingInstance& instance,
                                  const Schedule& schedule) {
  if (schedule.num_evs() != instance.num_evs() ||
      schedule.num_slots() != instance.num_slots()) {
    throw ArgumentError("schedule dimensions do not match the instance");
  }
  std::vector<double> profile(static_cast<std::size_t>(instance.num_slots()), 0.0);
  for (int i = 0; i < instance.num_evs(); ++i) {
    for (int t = 0; t < instance.num_slots(); ++t) {
      profile[static_cast<std::size_t>(t)] += schedule.at(i, t);
    }
  }
  return profile;
}

std::vector<double> completion_hours(const ChargingInstance& instance,
                                     const Schedule& schedule, double eps_active) {
  if (!(eps_active > 0.0)) throw ArgumentError("eps_active must be positive");
  if (schedule.num_evs() != instance.num_evs() ||
      schedule.num_slots() != instance.num_slots()) {
    throw ArgumentError("schedule dimensions do not match the instance");
  }
  std::vector<double> hours(static_cast<std::size_t>(instance.num_evs()), 0.0);
  for (const auto& s : instance.sessions()) {
    int last_active = -1;
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      if (schedule.at(s.ev_index, t) > eps_active) last_active = t;
    }
    if (last_active >= 0) {
      hours[static_cast<std::size_t>(s.ev_index)] =
          (last_active - s.first_slot + 1) * instance.slot_hours();
    }
  }
  return hours;
}

double charging_time(const ChargingInstance& instance, const Schedule& schedule,
                     double eps_active, ChargingTimeMode mode) {
  if (mode == ChargingTimeMode::kCompletion) {
    double total = 0.0;
    for (double h : completion_hours(instance, schedule, eps_active)) total += h;
    return total;
  }
  if (!(eps_active > 0.0)) throw ArgumentError("eps_active must be positive");
  int active = 0;
  for (const auto& s : instance.sessions()) {
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      if (schedule.at(s.ev_index, t) > eps_active) ++active;
    }
  }
  return active * instance.slot_hours();
}

ScheduleMetrics summarize(const ChargingInstance& instance, const Schedule& schedule,
                          double eps_active) {
  ScheduleMetrics metrics;
  metrics.total_cost = nominal_cost(instance, schedule);
  metrics.total_charging_time_hours = charging_time(instance, schedule, eps_active);
  metrics.per_slot_power_kw = power_profile(instance, schedule);
  metrics.active_threshold_kw = eps_active;
  return metrics;
}

}  // namespace evcharge
