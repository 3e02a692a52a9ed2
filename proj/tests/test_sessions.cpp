// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "error.hpp"
#include "sessions.hpp"
#include "timeutil.hpp"

using namespace evcharge;

namespace {

Timestamp at(const char* text) { return *parse_timestamp(text); }

LoadResult load(const std::string& body) {
  std::istringstream in("session_id,arrival,departure,energy_kwh\n" + body);
  return load_sessions(in);
}

SlotGrid hourly_day() { return {at("2018-04-25T00:00"), 60, 24}; }

Session session(const char* id, const char* a, const char* d, double kwh) {
  return {id, at(a), at(d), kwh};
}

}  // namespace

TEST(LoadSessions, SingleRow) {
  auto r = load("s1,2018-04-25T09:00:00,2018-04-25T17:00:00,20.0\n");
  ASSERT_EQ(r.sessions.size(), 1u);
  EXPECT_TRUE(r.issues.empty());
  const auto& s = r.sessions[0];
  EXPECT_EQ(s.session_id, "s1");
  EXPECT_EQ(s.arrival, at("2018-04-25T09:00"));
  EXPECT_EQ(s.departure, at("2018-04-25T17:00"));
  EXPECT_DOUBLE_EQ(s.energy_kwh, 20.0);
}

TEST(LoadSessions, InvertedRowIsReportedWithItsRow) {
  auto r = load(
      "ok,2018-04-25T09:00:00,2018-04-25T10:00:00,5\n"
      "bad,2018-04-25T12:00:00,2018-04-25T11:00:00,5\n");
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].row, 2);
  EXPECT_EQ(r.issues[0].session_id, "bad");
  EXPECT_EQ(r.issues[0].reason, "departure_not_after_arrival");
  ASSERT_EQ(r.sessions.size(), 1u);
  EXPECT_EQ(r.sessions[0].session_id, "ok");
}

TEST(LoadSessions, OtherInvariants) {
  auto r = load(
      "z,2018-04-25T09:00:00,2018-04-25T10:00:00,0\n"
      "e,2018-04-25T09:00:00,2018-04-25T09:00:00,3\n"
      ",2018-04-25T09:00:00,2018-04-25T10:00:00,3\n");
  ASSERT_EQ(r.issues.size(), 3u);
  EXPECT_EQ(r.issues[0].reason, "nonpositive_energy");
  EXPECT_EQ(r.issues[1].reason, "departure_not_after_arrival");
  EXPECT_EQ(r.issues[2].reason, "missing_id");
  EXPECT_TRUE(r.sessions.empty());
}

TEST(LoadSessions, HeaderOnly) {
  auto r = load("");
  EXPECT_TRUE(r.sessions.empty());
  EXPECT_TRUE(r.issues.empty());
}

TEST(LoadSessions, ParseErrorsNameTheRow) {
  try {
    load("a,2018-04-25T09:00:00,2018-04-25T10:00:00,5\nb,tomorrow,2018-04-25T10:00:00,5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load("a,2018-04-25T09:00:00,2018-04-25T10:00:00\n"), ParseError);
  EXPECT_THROW(load("a,2018-04-25T09:00:00,2018-04-25T10:00:00,lots\n"), ParseError);
  std::istringstream wrong_header("id,start,end,kwh\n");
  EXPECT_THROW(load_sessions(wrong_header), ParseError);
  EXPECT_THROW(load_sessions_file("/nonexistent.csv"), IoError);
}

TEST(LoadSessions, CsvRoundTrip) {
  std::vector<Session> in = {session("x", "2018-04-25T08:05", "2018-04-25T09:55", 7.25),
                             session("y", "2018-04-25T22:00", "2018-04-26T01:30", 12)};
  std::ostringstream out;
  write_sessions_csv(out, in);
  std::istringstream back(out.str());
  auto r = load_sessions(back);
  ASSERT_EQ(r.sessions.size(), 2u);
  for (std::size_t k = 0; k < in.size(); ++k) {
    EXPECT_EQ(r.sessions[k].session_id, in[k].session_id);
    EXPECT_EQ(r.sessions[k].arrival, in[k].arrival);
    EXPECT_EQ(r.sessions[k].departure, in[k].departure);
    EXPECT_DOUBLE_EQ(r.sessions[k].energy_kwh, in[k].energy_kwh);
  }
}

TEST(Discretize, WholeHours) {
  auto r = discretize({session("a", "2018-04-25T09:00", "2018-04-25T11:00", 5)},
                      hourly_day(), 7.0);
  ASSERT_EQ(r.sessions.size(), 1u);
  EXPECT_EQ(r.sessions[0].first_slot, 9);
  EXPECT_EQ(r.sessions[0].last_slot, 10);
  EXPECT_TRUE(r.rejections.empty());
}

TEST(Discretize, PartialSlotsAreUsable) {
  auto r = discretize({session("a", "2018-04-25T08:30", "2018-04-25T09:30", 5)},
                      hourly_day(), 7.0);
  ASSERT_EQ(r.sessions.size(), 1u);
  EXPECT_EQ(r.sessions[0].first_slot, 8);
  EXPECT_EQ(r.sessions[0].last_slot, 9);
}

TEST(Discretize, OverDemandRejectOrClamp) {
  const auto s = session("big", "2018-04-25T09:00", "2018-04-25T11:00", 20);
  auto rejected = discretize({s}, hourly_day(), 7.0, DemandPolicy::kReject);
  EXPECT_TRUE(rejected.sessions.empty());
  ASSERT_EQ(rejected.rejections.size(), 1u);
  EXPECT_EQ(rejected.rejections[0].reason, "infeasible_demand");
  EXPECT_DOUBLE_EQ(rejected.rejections[0].removed_kwh, 20.0);

  auto clamped = discretize({s}, hourly_day(), 7.0, DemandPolicy::kClamp);
  ASSERT_EQ(clamped.sessions.size(), 1u);
  EXPECT_DOUBLE_EQ(clamped.sessions[0].demand_kwh, 14.0);
  ASSERT_EQ(clamped.rejections.size(), 1u);
  EXPECT_EQ(clamped.rejections[0].reason, "clamped");
  EXPECT_DOUBLE_EQ(clamped.rejections[0].removed_kwh, 6.0);
}

TEST(Discretize, OutsideAndClipped) {
  auto r = discretize({session("before", "2018-04-24T10:00", "2018-04-24T12:00", 5),
                       session("after", "2018-04-26T00:00", "2018-04-26T02:00", 5),
                       session("night", "2018-04-25T22:30", "2018-04-26T03:00", 5),
                       session("early", "2018-04-24T23:00", "2018-04-25T02:00", 5)},
                      hourly_day(), 7.0);
  ASSERT_EQ(r.sessions.size(), 2u);
  EXPECT_EQ(r.sessions[0].session_id, "night");
  EXPECT_EQ(r.sessions[0].first_slot, 22);
  EXPECT_EQ(r.sessions[0].last_slot, 23);
  EXPECT_EQ(r.sessions[1].first_slot, 0);
  EXPECT_EQ(r.sessions[1].last_slot, 1);
  ASSERT_EQ(r.rejections.size(), 2u);
  EXPECT_EQ(r.rejections[0].reason, "outside_horizon");
  EXPECT_EQ(r.rejections[1].session_id, "after");
}

TEST(Discretize, BadGrid) {
  EXPECT_THROW(discretize({}, {at("2018-04-25T00:00"), 60, 0}, 7.0), ArgumentError);
  EXPECT_THROW(discretize({}, {at("2018-04-25T00:00"), 0, 24}, 7.0), ArgumentError);
}

// Accepted demand plus the itemized removals reproduces the input demand.
TEST(Discretize, DemandIsPreserved) {
  std::mt19937_64 rng(3);
  for (auto policy : {DemandPolicy::kClamp, DemandPolicy::kReject}) {
    for (int trial = 0; trial < 25; ++trial) {
      auto sessions = generate_synthetic(rng(), 40);
      const SlotGrid grid{at("2018-04-25T06:00"), 30, 28};
      auto r = discretize(sessions, grid, 5.0, policy);
      double in = 0.0, kept = 0.0, removed = 0.0;
      for (const auto& s : sessions) in += s.energy_kwh;
      for (const auto& d : r.sessions) {
        kept += d.demand_kwh;
        EXPECT_LE(d.demand_kwh, d.max_rate_kw * grid.slot_hours() * d.window_slots());
      }
      for (const auto& x : r.rejections) removed += x.removed_kwh;
      EXPECT_NEAR(kept + removed, in, 1e-9);
    }
  }
}

TEST(Synthetic, EmptyAndDeterministic) {
  EXPECT_TRUE(generate_synthetic(5, 0).empty());
  auto a = generate_synthetic(42, 50);
  auto b = generate_synthetic(42, 50);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].session_id, b[k].session_id);
    EXPECT_EQ(a[k].arrival, b[k].arrival);
    EXPECT_EQ(a[k].departure, b[k].departure);
    EXPECT_EQ(a[k].energy_kwh, b[k].energy_kwh);
  }
  auto c = generate_synthetic(43, 50);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) differs |= a[k].arrival != c[k].arrival;
  EXPECT_TRUE(differs);
}

TEST(Synthetic, SessionsAreValidAndBounded) {
  const auto config = SyntheticConfig::defaults();
  for (const auto& s : generate_synthetic(9, 500)) {
    EXPECT_LT(s.arrival, s.departure);
    const double stay = (s.departure - s.arrival).count() / 3600.0;
    EXPECT_GE(stay, config.stay_hours_min - 1.0 / 60);
    EXPECT_LE(stay, config.stay_hours_max + 1.0 / 60);
    EXPECT_GE(s.energy_kwh, config.energy_kwh_min);
    EXPECT_LE(s.energy_kwh, config.energy_kwh_max);
  }
}

// The default profile puts (sum of 06-20 weights) / (total) of the mass in
// 06:00-20:00; with n = 100 at least 80 arrivals must land there.
TEST(Synthetic, DefaultProfileConcentratesDaytime) {
  const auto config = SyntheticConfig::defaults();
  double day = 0.0, total = 0.0;
  for (int h = 0; h < 24; ++h) {
    total += config.arrival_hour_weights[static_cast<std::size_t>(h)];
    if (h >= 6 && h < 20) day += config.arrival_hour_weights[static_cast<std::size_t>(h)];
  }
  EXPECT_GT(day / total, 0.9);
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    int daytime = 0;
    for (const auto& s : generate_synthetic(seed, 100)) {
      const int m = minute_of_day(s.arrival);
      daytime += (m >= 6 * 60 && m < 20 * 60) ? 1 : 0;
    }
    EXPECT_GE(daytime, 80) << "seed " << seed;
  }
}

TEST(Synthetic, ConfigJson) {
  auto config = parse_synthetic_config(R"({"date":"2019-01-02","energy_kwh_max":9})");
  EXPECT_EQ(config.date, "2019-01-02");
  EXPECT_DOUBLE_EQ(config.energy_kwh_max, 9.0);
  EXPECT_DOUBLE_EQ(config.energy_kwh_min, 5.0);
  auto back = parse_synthetic_config(synthetic_config_to_json(config));
  EXPECT_EQ(back.arrival_hour_weights, config.arrival_hour_weights);
  for (const auto& s : generate_synthetic(1, 20, config)) {
    EXPECT_LE(s.energy_kwh, 9.0);
    EXPECT_EQ(format_timestamp(s.arrival).substr(0, 10), "2019-01-02");
  }
  EXPECT_THROW(parse_synthetic_config("[1,"), ParseError);
  EXPECT_THROW(parse_synthetic_config(R"({"arrival_hour_weights":[1,2]})"), ValidationError);
  auto bad = SyntheticConfig::defaults();
  bad.stay_hours_min = 0;
  EXPECT_THROW(generate_synthetic(1, 3, bad), ArgumentError);
}

TEST(Rejections, Jsonl) {
  std::ostringstream out;
  write_rejections_jsonl(out, {{"a", "clamped", "d1", 1.0}, {"b", "outside_horizon", "d2", 2.0}});
  EXPECT_EQ(out.str(),
            "{\"session_id\":\"a\",\"reason\":\"clamped\",\"detail\":\"d1\"}\n"
            "{\"session_id\":\"b\",\"reason\":\"outside_horizon\",\"detail\":\"d2\"}\n");
}
