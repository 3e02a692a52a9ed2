// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "sessions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace evcharge {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string row_prefix(int row) { return "row " + std::to_string(row) + ": "; }

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

std::string format_kwh(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

LoadResult load_sessions(std::istream& in) {
  LoadResult result;
  std::string line;
  bool have_header = false;
  int row = 0;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!have_header) {
      auto header = split_fields(view);
      static constexpr std::array<std::string_view, 4> kExpected = {
          "session_id", "arrival", "departure", "energy_kwh"};
      if (header.size() != kExpected.size() ||
          !std::equal(header.begin(), header.end(), kExpected.begin())) {
        throw ParseError(
            "session CSV header must be session_id,arrival,departure,energy_kwh");
      }
      have_header = true;
      continue;
    }
    ++row;
    auto fields = split_fields(view);
    if (fields.size() != 4) {
      throw ParseError(row_prefix(row) + "expected 4 fields, found " +
                       std::to_string(fields.size()));
    }
    Session session;
    session.session_id = std::string(fields[0]);
    auto arrival = parse_timestamp(fields[1]);
    if (!arrival) {
      throw ParseError(row_prefix(row) + "malformed arrival timestamp '" +
                       std::string(fields[1]) + "'");
    }
    auto departure = parse_timestamp(fields[2]);
    if (!departure) {
      throw ParseError(row_prefix(row) + "malformed departure timestamp '" +
                       std::string(fields[2]) + "'");
    }
    double energy = 0.0;
    auto [ptr, ec] = std::from_chars(fields[3].data(),
                                     fields[3].data() + fields[3].size(), energy);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size() ||
        !std::isfinite(energy)) {
      throw ParseError(row_prefix(row) + "malformed energy_kwh '" +
                       std::string(fields[3]) + "'");
    }
    session.arrival = *arrival;
    session.departure = *departure;
    session.energy_kwh = energy;

    if (session.session_id.empty()) {
      result.issues.push_back({row, session.session_id, "missing_id",
                               "session_id is empty"});
    } else if (session.departure <= session.arrival) {
      result.issues.push_back(
          {row, session.session_id, "departure_not_after_arrival",
           "departure " + format_timestamp(session.departure) +
               " is not after arrival " + format_timestamp(session.arrival)});
    } else if (!(session.energy_kwh > 0.0)) {
      result.issues.push_back({row, session.session_id, "nonpositive_energy",
                               "energy_kwh = " + format_kwh(energy)});
    } else {
      result.sessions.push_back(std::move(session));
    }
  }
  if (!have_header) throw ParseError("session CSV is missing its header row");
  return result;
}

LoadResult load_sessions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open session file: " + path);
  return load_sessions(in);
}

void write_sessions_csv(std::ostream& out, const std::vector<Session>& sessions) {
  out << "session_id,arrival,departure,energy_kwh\n";
  for (const auto& s : sessions) {
    char energy[32];
    std::snprintf(energy, sizeof energy, "%.2f", s.energy_kwh);
    out << s.session_id << ',' << format_timestamp(s.arrival) << ','
        << format_timestamp(s.departure) << ',' << energy << '\n';
  }
}

DiscretizeResult discretize(const std::vector<Session>& sessions,
                            const SlotGrid& grid, double max_rate_kw,
                            DemandPolicy policy) {
  if (grid.num_slots <= 0) throw ArgumentError("num_slots must be positive");
  if (grid.slot_minutes <= 0) throw ArgumentError("slot_minutes must be positive");
  if (!(max_rate_kw > 0.0)) throw ArgumentError("max_rate_kw must be positive");

  const long long slot_seconds = 60LL * grid.slot_minutes;
  const double slot_hours = grid.slot_hours();
  DiscretizeResult result;
  for (const auto& s : sessions) {
    const long long rel_a = (s.arrival - grid.horizon_start).count();
    const long long rel_d = (s.departure - grid.horizon_start).count();
    long long first = floor_div(rel_a, slot_seconds);
    long long last = ceil_div(rel_d, slot_seconds) - 1;
    if (last < 0 || first > grid.num_slots - 1 || last < first) {
      result.rejections.push_back(
          {s.session_id, "outside_horizon",
           "session " + format_timestamp(s.arrival) + " to " +
               format_timestamp(s.departure) + " does not overlap the horizon",
           s.energy_kwh});
      continue;
    }
    first = std::max<long long>(first, 0);
    last = std::min<long long>(last, grid.num_slots - 1);

    DiscretizedSession d;
    d.session_id = s.session_id;
    d.first_slot = static_cast<int>(first);
    d.last_slot = static_cast<int>(last);
    d.max_rate_kw = max_rate_kw;
    d.demand_kwh = s.energy_kwh;
    const double deliverable = max_rate_kw * slot_hours * d.window_slots();
    if (d.demand_kwh > deliverable) {
      const double excess = d.demand_kwh - deliverable;
      const std::string detail = "demand " + format_kwh(d.demand_kwh) +
                                 " kWh exceeds deliverable " +
                                 format_kwh(deliverable) + " kWh over " +
                                 std::to_string(d.window_slots()) + " slots";
      if (policy == DemandPolicy::kReject) {
        result.rejections.push_back(
            {s.session_id, "infeasible_demand", detail, d.demand_kwh});
        continue;
      }
      result.rejections.push_back(
          {s.session_id, "clamped", detail + "; clamped", excess});
      d.demand_kwh = deliverable;
    }
    d.ev_index = static_cast<int>(result.sessions.size());
    result.sessions.push_back(std::move(d));
  }
  return result;
}

void write_rejections_jsonl(std::ostream& out,
                            const std::vector<Rejection>& rejections) {
  for (const auto& r : rejections) {
    nlohmann::ordered_json line = {{"session_id", r.session_id},
                                   {"reason", r.reason},
                                   {"detail", r.detail}};
    out << line.dump() << '\n';
  }
}

SyntheticConfig SyntheticConfig::defaults() {
  SyntheticConfig config;
  // Workplace-style day: arrivals concentrated 09:00-12:00, tapering
  // through the afternoon, rare overnight.
  config.arrival_hour_weights = {0.1, 0.1, 0.1, 0.1, 0.1, 0.2, 0.5, 1.0,
                                 3.0, 8.0, 8.0, 6.0, 4.0, 4.0, 3.0, 2.0,
                                 2.0, 2.0, 1.5, 1.0, 0.5, 0.2, 0.1, 0.1};
  config.stay_hours_min = 3.0;
  config.stay_hours_max = 10.0;
  config.energy_kwh_min = 5.0;
  config.energy_kwh_max = 25.0;
  return config;
}

SyntheticConfig parse_synthetic_config(const std::string& json_text) {
  SyntheticConfig config = SyntheticConfig::defaults();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("generator config JSON: ") + e.what());
  }
  try {
    if (doc.contains("date")) config.date = doc["date"].get<std::string>();
    if (doc.contains("arrival_hour_weights")) {
      auto weights = doc["arrival_hour_weights"].get<std::vector<double>>();
      if (weights.size() != 24) {
        throw ValidationError("arrival_hour_weights must have 24 entries");
      }
      std::copy(weights.begin(), weights.end(),
                config.arrival_hour_weights.begin());
    }
    if (doc.contains("stay_hours_min")) config.stay_hours_min = doc["stay_hours_min"];
    if (doc.contains("stay_hours_max")) config.stay_hours_max = doc["stay_hours_max"];
    if (doc.contains("energy_kwh_min")) config.energy_kwh_min = doc["energy_kwh_min"];
    if (doc.contains("energy_kwh_max")) config.energy_kwh_max = doc["energy_kwh_max"];
    if (doc.contains("id_prefix")) config.id_prefix = doc["id_prefix"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generator config JSON: ") + e.what());
  }
  return config;
}

std::string synthetic_config_to_json(const SyntheticConfig& config) {
  nlohmann::ordered_json doc;
  doc["date"] = config.date;
  doc["arrival_hour_weights"] = config.arrival_hour_weights;
  doc["stay_hours_min"] = config.stay_hours_min;
  doc["stay_hours_max"] = config.stay_hours_max;
  doc["energy_kwh_min"] = config.energy_kwh_min;
  doc["energy_kwh_max"] = config.energy_kwh_max;
  doc["id_prefix"] = config.id_prefix;
  return doc.dump(2) + "\n";
}

std::string synthetic_metadata_json(const SyntheticConfig& config,
                                    std::uint64_t seed, std::size_t n) {
  nlohmann::ordered_json doc;
  doc["generator"] = "synthetic-day";
  doc["seed"] = seed;
  doc["count"] = n;
  doc["config"] = nlohmann::ordered_json::parse(synthetic_config_to_json(config));
  doc["distributions"] = {
      {"arrival", "clock hour ~ categorical(arrival_hour_weights), minute ~ "
                  "uniform{0..59}"},
      {"stay_hours", "uniform[stay_hours_min, stay_hours_max], rounded to the "
                     "minute"},
      {"energy_kwh", "uniform[energy_kwh_min, energy_kwh_max], rounded to "
                     "0.01"},
      {"rng", "std::mt19937_64 seeded with seed"}};
  return doc.dump(2) + "\n";
}

std::vector<Session> generate_synthetic(std::uint64_t seed, std::size_t n,
                                        const SyntheticConfig& config) {
  auto day = parse_timestamp(config.date + "T00:00:00");
  if (!day) throw ArgumentError("generator date must be YYYY-MM-DD");
  if (!(config.stay_hours_min > 0.0) ||
      config.stay_hours_max < config.stay_hours_min) {
    throw ArgumentError("stay hour bounds must satisfy 0 < min <= max");
  }
  if (!(config.energy_kwh_min > 0.0) ||
      config.energy_kwh_max < config.energy_kwh_min) {
    throw ArgumentError("energy bounds must satisfy 0 < min <= max");
  }
  double weight_sum = 0.0;
  for (double w : config.arrival_hour_weights) {
    if (w < 0.0) throw ArgumentError("arrival_hour_weights must be nonnegative");
    weight_sum += w;
  }
  if (!(weight_sum > 0.0)) throw ArgumentError("arrival_hour_weights sum to zero");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> hour_dist(config.arrival_hour_weights.begin(),
                                            config.arrival_hour_weights.end());
  std::uniform_int_distribution<int> minute_dist(0, 59);
  std::uniform_real_distribution<double> stay_dist(config.stay_hours_min,
                                                   config.stay_hours_max);
  std::uniform_real_distribution<double> energy_dist(config.energy_kwh_min,
                                                     config.energy_kwh_max);
  std::vector<Session> sessions;
  sessions.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int hour = hour_dist(rng);
    const int minute = minute_dist(rng);
    const double stay_hours = stay_dist(rng);
    const double energy = energy_dist(rng);

    Session s;
    char id[64];
    std::snprintf(id, sizeof id, "%s%04zu", config.id_prefix.c_str(), k + 1);
    s.session_id = id;
    s.arrival = *day + std::chrono::minutes(hour * 60 + minute);
    const long stay_minutes =
        std::max(1L, std::lround(stay_hours * 60.0));
    s.departure = s.arrival + std::chrono::minutes(stay_minutes);
    s.energy_kwh = std::max(0.01, std::round(energy * 100.0) / 100.0);
    sessions.push_back(std::move(s));
  }
  return sessions;
}

}  // namespace evcharge
