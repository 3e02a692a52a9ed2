// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_ORACLE_HPP_
#define EVCHARGE_CORE_ORACLE_HPP_

#include "model.hpp"

namespace evcharge {

struct OracleResult {
  Schedule schedule;
  double objective = 0.0;
  long long evaluations = 0;
};

inline constexpr int kOracleMaxEvs = 3;
inline constexpr int kOracleMaxSlots = 4;

// Brute-force reference solver for tiny instances (n <= 3, tau <= 4). Each
// EV's last window slot is eliminated through its energy budget; the
// remaining coordinates are searched exhaustively on a grid_points-per-axis
// grid (coarsened so the grid has at most ~2e6 points). The best point is
// then refined by a compass search over budget-preserving exchange moves
// with a halving step. If no grid point is feasible the search starts from a
// max-flow point instead. Evaluates the objective from first principles
// rather than through the model helpers. Throws ArgumentError for larger
// instances and ValidationError when the instance has no feasible point.
OracleResult oracle_solve(const ChargingInstance& instance, int grid_points = 9);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_ORACLE_HPP_
