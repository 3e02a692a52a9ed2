// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_HARNESS_HPP_
#define EVCHARGE_CORE_HARNESS_HPP_

#include <cstdint>
#include <vector>

#include "metrics.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace evcharge {

// Grid used when no alphas are given.
inline const std::vector<double> kDefaultAlphaGrid = {0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0};

struct SweepEntry {
  double alpha = 0.0;
  SolveReport report;
  Schedule schedule;
  ScheduleMetrics metrics;
};

// Parallel lists share one length and follow the input alpha order,
// including entries whose solve did not converge.
struct SweepResult {
  std::vector<double> alphas;
  std::vector<double> costs;
  std::vector<double> charging_times;
  std::vector<double> objectives;
  std::vector<SolveStatus> statuses;
  std::vector<SweepEntry> entries;
};

// One independent solve per alpha with everything else fixed. A failed solve
// is recorded with its status and never aborts the sweep.
SweepResult sweep_alpha(const ChargingInstance& base, const std::vector<double>& alphas,
                        const SolverConfig& config = {},
                        double eps_active = kDefaultActiveKw);

struct TradeoffPoint {
  double alpha = 0.0;
  double cost = 0.0;
  double time = 0.0;
  bool pareto = false;
  bool duplicate = false;  // same outcome as an earlier point
};

// Converged entries only, sorted by alpha. Dominated points have
// pareto == false.
std::vector<TradeoffPoint> tradeoff_curve(const SweepResult& sweep);

struct MonteCarloReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_gap = 0.0;    // max(realized - bound); <= 0 when the bound holds
  double tightness = 0.0;  // max(realized / bound)
  double rho = 0.0;
  std::uint64_t seed = 0;
  bool directed = false;
};

// Samples price deviations e with ||e|| <= rho and checks the robust bound
// for each. Even samples lie on the sphere ||e|| = rho, odd ones inside it
// (radius rho * u^(1/tau)). With directed set, every third sample is instead
// a small jitter of the direction aligned with the delivered energy profile,
// which makes the bound approach equality for one EV. Sample k uses its own
// generator derived from (seed, k).
MonteCarloReport monte_carlo_bound(const ChargingInstance& instance,
                                   const Schedule& schedule, std::size_t samples,
                                   std::uint64_t seed, bool directed = false);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_HARNESS_HPP_
