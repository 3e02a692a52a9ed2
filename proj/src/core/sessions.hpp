// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_SESSIONS_HPP_
#define EVCHARGE_CORE_SESSIONS_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "timeutil.hpp"

namespace evcharge {

// One EV visit. arrival < departure and energy_kwh > 0 for every Session
// returned by load_sessions or generate_synthetic.
struct Session {
  std::string session_id;
  Timestamp arrival;
  Timestamp departure;
  double energy_kwh = 0.0;
};

// A session mapped onto the slot grid. The window [first_slot, last_slot] is
// inclusive. rate_caps, when nonempty, holds one cap per window slot and
// overrides max_rate_kw.
struct DiscretizedSession {
  int ev_index = 0;
  std::string session_id;
  int first_slot = 0;
  int last_slot = 0;
  double demand_kwh = 0.0;
  double max_rate_kw = 0.0;
  std::vector<double> rate_caps;

  int window_slots() const { return last_slot - first_slot + 1; }
  double rate_cap(int slot) const {
    return rate_caps.empty()
               ? max_rate_kw
               : rate_caps[static_cast<std::size_t>(slot - first_slot)];
  }
  bool in_window(int slot) const {
    return slot >= first_slot && slot <= last_slot;
  }
};

// A CSV row that parsed but broke a Session invariant. row is the 1-based
// data row (the header is not counted).
struct LoadIssue {
  int row = 0;
  std::string session_id;
  std::string reason;
  std::string detail;
};

struct LoadResult {
  std::vector<Session> sessions;
  std::vector<LoadIssue> issues;
};

// Reads `session_id,arrival,departure,energy_kwh` CSV. Structural problems
// (header, field count, timestamp or number syntax) throw ParseError naming
// the row; invariant violations are collected into issues.
LoadResult load_sessions(std::istream& in);
LoadResult load_sessions_file(const std::string& path);

void write_sessions_csv(std::ostream& out, const std::vector<Session>& sessions);

enum class DemandPolicy { kReject, kClamp };

struct Rejection {
  std::string session_id;
  std::string reason;  // outside_horizon | infeasible_demand | clamped
  std::string detail;
  double removed_kwh = 0.0;  // demand dropped from the instance
};

struct DiscretizeResult {
  std::vector<DiscretizedSession> sessions;
  std::vector<Rejection> rejections;
};

struct SlotGrid {
  Timestamp horizon_start;
  int slot_minutes = 60;
  int num_slots = 24;

  double slot_hours() const { return slot_minutes / 60.0; }
};

// Windows use floor(arrival) / ceil(departure) - 1 so any partially occupied
// slot is usable. Sessions not overlapping the grid are rejected; partially
// overlapping ones are clipped. Demand above max_rate_kw * slot_hours * window
// is rejected or clamped to that bound according to policy.
DiscretizeResult discretize(const std::vector<Session>& sessions,
                            const SlotGrid& grid, double max_rate_kw,
                            DemandPolicy policy = DemandPolicy::kClamp);

// One JSON object per line: {"session_id","reason","detail"}.
void write_rejections_jsonl(std::ostream& out,
                            const std::vector<Rejection>& rejections);

struct SyntheticConfig {
  std::string date = "2018-04-25";
  // Relative arrival mass for each clock hour; arrival minute is uniform
  // inside the drawn hour.
  std::array<double, 24> arrival_hour_weights{};
  double stay_hours_min = 3.0;
  double stay_hours_max = 10.0;
  double energy_kwh_min = 5.0;
  double energy_kwh_max = 25.0;
  std::string id_prefix = "syn";

  static SyntheticConfig defaults();
};

SyntheticConfig parse_synthetic_config(const std::string& json_text);
std::string synthetic_config_to_json(const SyntheticConfig& config);
// Describes the sampling distributions; written next to generated files.
std::string synthetic_metadata_json(const SyntheticConfig& config,
                                    std::uint64_t seed, std::size_t n);

// Deterministic for a fixed (seed, n, config). Stays are uniform in
// [stay_hours_min, stay_hours_max] and demands uniform in
// [energy_kwh_min, energy_kwh_max], both rounded (minutes, 0.01 kWh).
std::vector<Session> generate_synthetic(std::uint64_t seed, std::size_t n,
                                        const SyntheticConfig& config =
                                            SyntheticConfig::defaults());

}  // namespace evcharge

#endif  // EVCHARGE_CORE_SESSIONS_HPP_
