// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tariff.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace evcharge {

Tariff::Tariff(std::vector<TariffBand> bands, double default_price)
    : bands_(std::move(bands)), default_price_(default_price) {
  if (!(default_price_ > 0.0)) {
    throw ValidationError("tariff default_price must be positive");
  }
  for (const auto& band : bands_) {
    if (band.start_minute < 0 || band.end_minute > kMinutesPerDay ||
        band.start_minute >= band.end_minute) {
      throw ValidationError("tariff band " +
                            format_clock_minutes(band.start_minute) + "-" +
                            format_clock_minutes(band.end_minute) +
                            " is not a valid interval of the day");
    }
    if (!(band.price > 0.0)) {
      throw ValidationError("tariff band price must be positive");
    }
  }
  std::sort(bands_.begin(), bands_.end(),
            [](const TariffBand& a, const TariffBand& b) {
              return a.start_minute < b.start_minute;
            });
  for (std::size_t k = 1; k < bands_.size(); ++k) {
    if (bands_[k].start_minute < bands_[k - 1].end_minute) {
      throw ValidationError("tariff bands overlap at " +
                            format_clock_minutes(bands_[k].start_minute));
    }
  }
  minute_price_.assign(kMinutesPerDay, default_price_);
  for (const auto& band : bands_) {
    std::fill(minute_price_.begin() + band.start_minute,
              minute_price_.begin() + band.end_minute, band.price);
  }
}

Tariff Tariff::vietnam() {
  constexpr double kOffPeak = 1.100;
  constexpr double kPeak = 2.871;
  constexpr double kNormal = 1.700;
  return Tariff(
      {
          {0, 9 * 60, kOffPeak},
          {9 * 60 + 30, 11 * 60 + 30, kPeak},
          {11 * 60 + 30, 17 * 60, kNormal},
          {17 * 60, 20 * 60, kPeak},
          {20 * 60, 22 * 60, kNormal},
          {22 * 60, 24 * 60, kOffPeak},
      },
      kNormal);
}

double Tariff::price_at(int minute) const {
  if (minute < 0 || minute >= kMinutesPerDay) {
    throw ArgumentError("minute of day out of range: " +
                        std::to_string(minute));
  }
  return minute_price_[static_cast<std::size_t>(minute)];
}

std::vector<double> build_price_vector(const Tariff& tariff,
                                       Timestamp horizon_start,
                                       int slot_minutes, int num_slots) {
  if (slot_minutes <= 0 || kMinutesPerDay % slot_minutes != 0) {
    throw ArgumentError("slot_minutes must be a positive divisor of 1440, got " +
                        std::to_string(slot_minutes));
  }
  if (num_slots < 0) throw ArgumentError("num_slots must be nonnegative");
  if ((horizon_start.time_since_epoch().count() % 60) != 0) {
    throw ArgumentError("horizon_start must fall on a whole minute");
  }
  const int first_minute = minute_of_day(horizon_start);
  std::vector<double> prices(static_cast<std::size_t>(num_slots));
  for (int t = 0; t < num_slots; ++t) {
    double sum = 0.0;
    const long base = static_cast<long>(first_minute) +
                      static_cast<long>(t) * slot_minutes;
    for (int m = 0; m < slot_minutes; ++m) {
      sum += tariff.price_at(static_cast<int>((base + m) % kMinutesPerDay));
    }
    prices[static_cast<std::size_t>(t)] = sum / slot_minutes;
  }
  return prices;
}

Tariff parse_tariff_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("tariff JSON: ") + e.what());
  }
  try {
    std::vector<TariffBand> bands;
    for (const auto& item : doc.at("bands")) {
      const auto start_text = item.at("start").get<std::string>();
      const auto end_text = item.at("end").get<std::string>();
      auto start = parse_clock_minutes(start_text);
      auto end = parse_clock_minutes(end_text);
      if (!start || !end) {
        throw ParseError("tariff band has malformed clock time: " +
                         start_text + "-" + end_text);
      }
      bands.push_back({*start, *end, item.at("price").get<double>()});
    }
    return Tariff(std::move(bands), doc.at("default_price").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tariff JSON: ") + e.what());
  }
}

Tariff load_tariff_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tariff file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_tariff_json(buffer.str());
}

std::string tariff_to_json(const Tariff& tariff) {
  nlohmann::ordered_json doc;
  doc["bands"] = nlohmann::ordered_json::array();
  for (const auto& band : tariff.bands()) {
    doc["bands"].push_back({{"start", format_clock_minutes(band.start_minute)},
                            {"end", format_clock_minutes(band.end_minute)},
                            {"price", band.price}});
  }
  doc["default_price"] = tariff.default_price();
  return doc.dump(2) + "\n";
}

}  // namespace evcharge
