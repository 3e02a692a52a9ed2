// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_TIMEUTIL_HPP_
#define EVCHARGE_CORE_TIMEUTIL_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace evcharge {

// Wall-clock timestamps are naive local time (the tariff is defined on local
// clock minutes), stored as seconds on the sys_seconds axis.
using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM[:SS]" (a space may replace the 'T'). A trailing
// 'Z' is tolerated and ignored; numeric UTC offsets are rejected.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Inverse of parse_timestamp, always with seconds.
std::string format_timestamp(Timestamp ts);

Timestamp midnight_of(Timestamp ts);

// Minutes since local midnight, in [0, 1440).
int minute_of_day(Timestamp ts);

// Parses "HH:MM" with 00:00 <= value <= 24:00.
std::optional<int> parse_clock_minutes(std::string_view text);

std::string format_clock_minutes(int minutes);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_TIMEUTIL_HPP_
