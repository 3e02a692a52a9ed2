// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_TARIFF_HPP_
#define EVCHARGE_CORE_TARIFF_HPP_

#include <string>
#include <vector>

#include "timeutil.hpp"

namespace evcharge {

inline constexpr int kMinutesPerDay = 1440;

// Half-open interval [start_minute, end_minute) of a day with one price in
// thousand VND per kWh.
struct TariffBand {
  int start_minute = 0;
  int end_minute = 0;
  double price = 0.0;
};

// Piecewise-constant time-of-use schedule over a 24 h cycle. Minutes not
// covered by a band are charged at default_price. Immutable once built.
class Tariff {
 public:
  // Throws ValidationError on inverted, out-of-range or overlapping bands and
  // non-positive prices.
  Tariff(std::vector<TariffBand> bands, double default_price);

  // Off-peak / peak / normal tariff for low-voltage business customers in
  // Vietnam, in thousand VND/kWh. 09:00-09:30 is not covered by any band and
  // takes the normal rate.
  static Tariff vietnam();

  // 0 <= minute < 1440, otherwise ArgumentError.
  double price_at(int minute) const;

  const std::vector<TariffBand>& bands() const { return bands_; }
  double default_price() const { return default_price_; }

 private:
  std::vector<TariffBand> bands_;  // sorted by start_minute
  double default_price_;
  std::vector<double> minute_price_;  // dense lookup, 1440 entries
};

// Nominal price of each slot: the minute-weighted mean of price_at over the
// slot's minutes, wrapping across midnight. slot_minutes must divide 1440 and
// horizon_start must fall on a whole minute.
std::vector<double> build_price_vector(const Tariff& tariff,
                                       Timestamp horizon_start,
                                       int slot_minutes, int num_slots);

// JSON document: {"bands": [{"start": "HH:MM", "end": "HH:MM", "price": x}],
//                 "default_price": x}
Tariff parse_tariff_json(const std::string& text);
Tariff load_tariff_file(const std::string& path);
std::string tariff_to_json(const Tariff& tariff);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_TARIFF_HPP_
