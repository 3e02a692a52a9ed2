// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Helpers shared by the unit tests and the acceptance runner. Nothing here
// calls into the solver, so the oracles stay independent of it.

#ifndef EVCHARGE_TESTS_SUPPORT_HPP_
#define EVCHARGE_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "model.hpp"
#include "sessions.hpp"
#include "timeutil.hpp"

namespace evtest {

using evcharge::ChargingInstance;
using evcharge::DiscretizedSession;

inline evcharge::Timestamp day_start() {
  return *evcharge::parse_timestamp("2018-04-25T00:00:00");
}

inline DiscretizedSession ev(int first, int last, double demand, double max_rate,
                             std::vector<double> caps = {}) {
  DiscretizedSession s;
  s.session_id = "ev" + std::to_string(first) + "_" + std::to_string(last);
  s.first_slot = first;
  s.last_slot = last;
  s.demand_kwh = demand;
  s.max_rate_kw = max_rate;
  s.rate_caps = std::move(caps);
  return s;
}

inline ChargingInstance make_instance(std::vector<double> prices, double alpha, double rho,
                                      double capacity,
                                      std::vector<DiscretizedSession> evs,
                                      int slot_minutes = 60) {
  const int tau = static_cast<int>(prices.size());
  return ChargingInstance(day_start(), slot_minutes, tau, std::move(prices), alpha, rho,
                          std::vector<double>(static_cast<std::size_t>(tau), capacity),
                          std::move(evs));
}

// Random instance with n <= max_evs, tau <= max_slots that is feasible by
// construction: demands and capacities are derived from a random point inside
// the box.
inline ChargingInstance random_tiny_instance(std::mt19937_64& rng, double alpha, double rho,
                                             int max_evs = 3, int max_slots = 4) {
  std::uniform_int_distribution<int> n_dist(1, max_evs);
  std::uniform_int_distribution<int> tau_dist(2, max_slots);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = n_dist(rng);
  const int tau = tau_dist(rng);
  const std::array<int, 3> slot_choices{15, 30, 60};
  const int slot_minutes = slot_choices[std::uniform_int_distribution<int>(0, 2)(rng)];
  const double dh = slot_minutes / 60.0;

  std::vector<double> prices(static_cast<std::size_t>(tau));
  for (auto& p : prices) p = 1.0 + 2.0 * unit(rng);

  std::vector<DiscretizedSession> evs;
  std::vector<double> column(static_cast<std::size_t>(tau), 0.0);
  for (int i = 0; i < n; ++i) {
    int a = std::uniform_int_distribution<int>(0, tau - 1)(rng);
    int b = std::uniform_int_distribution<int>(0, tau - 1)(rng);
    if (a > b) std::swap(a, b);
    const double max_rate = 1.0 + 6.0 * unit(rng);
    std::vector<double> caps;
    if (unit(rng) < 0.3) {
      for (int t = a; t <= b; ++t) caps.push_back(max_rate * (0.3 + 0.7 * unit(rng)));
    }
    auto s = ev(a, b, 0.0, max_rate, caps);
    s.session_id = "r" + std::to_string(i);
    double energy = 0.0;
    for (int t = a; t <= b; ++t) {
      const double r = s.rate_cap(t) * unit(rng);
      energy += r * dh;
      column[static_cast<std::size_t>(t)] += r;
    }
    s.demand_kwh = energy;
    evs.push_back(std::move(s));
  }
  std::vector<double> capacity(static_cast<std::size_t>(tau));
  for (int t = 0; t < tau; ++t) {
    // Sometimes tight, sometimes slack.
    const double slack = unit(rng) < 0.4 ? 0.0 : 5.0 * unit(rng);
    capacity[static_cast<std::size_t>(t)] = column[static_cast<std::size_t>(t)] + slack + 0.05;
  }
  return ChargingInstance(day_start(), slot_minutes, tau, std::move(prices), alpha, rho,
                          std::move(capacity), std::move(evs));
}

// Projection of v onto {0 <= x <= u, x1 + x2 + x3 = b} by a grid search
// that zooms in on the best point. One coordinate is eliminated through the
// budget and the other two are gridded; this is repeated with each
// coordinate eliminated in turn so that any face of the feasible set is
// axis-aligned (and so hit exactly by grid points) in at least one chart.
inline std::array<double, 3> grid_project3(const std::array<double, 3>& v,
                                           const std::array<double, 3>& u, double b) {
  std::array<double, 3> best_x{};
  double best_d = std::numeric_limits<double>::infinity();
  for (int chart = 0; chart < 3; ++chart) {
    const int p = (chart + 1) % 3, q = (chart + 2) % 3;
    auto point = [&](double xp, double xq, std::array<double, 3>& x) {
      x[p] = xp;
      x[q] = xq;
      x[chart] = b - xp - xq;
      return x[chart] >= -1e-15 && x[chart] <= u[chart] + 1e-15;
    };
    auto dist = [&](const std::array<double, 3>& x) {
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d += (x[k] - v[k]) * (x[k] - v[k]);
      return d;
    };
    double lo_p = 0.0, hi_p = u[p], lo_q = 0.0, hi_q = u[q];
    constexpr int kPoints = 81;
    for (int level = 0; level < 60; ++level) {
      const double hp = (hi_p - lo_p) / (kPoints - 1);
      const double hq = (hi_q - lo_q) / (kPoints - 1);
      double level_d = std::numeric_limits<double>::infinity();
      std::array<double, 3> level_x{};
      for (int i = 0; i < kPoints; ++i) {
        for (int j = 0; j < kPoints; ++j) {
          std::array<double, 3> x;
          if (!point(lo_p + hp * i, lo_q + hq * j, x)) continue;
          const double d = dist(x);
          if (d < level_d) {
            level_d = d;
            level_x = x;
          }
        }
      }
      if (!std::isfinite(level_d)) break;
      if (level_d < best_d) {
        best_d = level_d;
        best_x = level_x;
      }
      lo_p = std::max(0.0, level_x[p] - 4 * hp);
      hi_p = std::min(u[p], level_x[p] + 4 * hp);
      lo_q = std::max(0.0, level_x[q] - 4 * hq);
      hi_q = std::min(u[q], level_x[q] + 4 * hq);
      if (hp < 1e-13 && hq < 1e-13) break;
    }
  }
  return best_x;
}

}  // namespace evtest

#endif  // EVCHARGE_TESTS_SUPPORT_HPP_
