// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "timeutil.hpp"

#include <cstdio>

namespace evcharge {
namespace {

bool read_digits(std::string_view text, std::size_t pos, std::size_t count,
                 int& value) {
  if (pos + count > text.size()) return false;
  value = 0;
  for (std::size_t k = 0; k < count; ++k) {
    char ch = text[pos + k];
    if (ch < '0' || ch > '9') return false;
    value = value * 10 + (ch - '0');
  }
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  int y, mo, d, h, mi, s = 0;
  if (!read_digits(text, 0, 4, y) || text.size() < 16) return std::nullopt;
  if (text[4] != '-' || text[7] != '-') return std::nullopt;
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  if (text[13] != ':') return std::nullopt;
  if (!read_digits(text, 5, 2, mo) || !read_digits(text, 8, 2, d) ||
      !read_digits(text, 11, 2, h) || !read_digits(text, 14, 2, mi)) {
    return std::nullopt;
  }
  if (text.size() == 19) {
    if (text[16] != ':' || !read_digits(text, 17, 2, s)) return std::nullopt;
  } else if (text.size() != 16) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  auto day_start = floor<days>(ts);
  year_month_day ymd{day_start};
  hh_mm_ss<seconds> tod{ts - day_start};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()),
                static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf;
}

Timestamp midnight_of(Timestamp ts) {
  return std::chrono::floor<std::chrono::days>(ts);
}

int minute_of_day(Timestamp ts) {
  using namespace std::chrono;
  return static_cast<int>(floor<minutes>(ts - midnight_of(ts)).count());
}

std::optional<int> parse_clock_minutes(std::string_view text) {
  int h, m;
  if (text.size() == 4) {
    // "H:MM"
    if (!read_digits(text, 0, 1, h) || text[1] != ':' ||
        !read_digits(text, 2, 2, m)) {
      return std::nullopt;
    }
  } else if (text.size() == 5) {
    if (!read_digits(text, 0, 2, h) || text[2] != ':' ||
        !read_digits(text, 3, 2, m)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  if (m > 59) return std::nullopt;
  int total = h * 60 + m;
  if (total > 1440) return std::nullopt;
  return total;
}

std::string format_clock_minutes(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

}  // namespace evcharge
