// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "error.hpp"

namespace evcharge {

SweepResult sweep_alpha(const ChargingInstance& base, const std::vector<double>& alphas,
                        const SolverConfig& config, double eps_active) {
  if (alphas.empty()) throw ArgumentError("sweep needs at least one alpha");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ArgumentError("sweep alphas must be finite and nonnegative");
    }
  }
  SweepResult sweep;
  for (double alpha : alphas) {
    const ChargingInstance instance = base.with_alpha(alpha);
    SweepEntry entry;
    entry.alpha = alpha;
    try {
      auto solved = solve(instance, config);
      entry.report = std::move(solved.report);
      entry.schedule = std::move(solved.schedule);
    } catch (const Error& e) {
      entry.report.status = SolveStatus::kIterLimit;
      entry.report.detail = e.what();
      entry.schedule = Schedule(instance.num_evs(), instance.num_slots(),
                                instance.fingerprint());
    }
    entry.metrics = summarize(instance, entry.schedule, eps_active);
    sweep.alphas.push_back(alpha);
    sweep.costs.push_back(entry.metrics.total_cost);
    sweep.charging_times.push_back(entry.metrics.total_charging_time_hours);
    sweep.objectives.push_back(entry.report.objective);
    sweep.statuses.push_back(entry.report.status);
    sweep.entries.push_back(std::move(entry));
  }
  return sweep;
}

std::vector<TradeoffPoint> tradeoff_curve(const SweepResult& sweep) {
  std::vector<TradeoffPoint> points;
  for (std::size_t k = 0; k < sweep.alphas.size(); ++k) {
    if (sweep.statuses[k] != SolveStatus::kConverged) continue;
    points.push_back({sweep.alphas[k], sweep.costs[k], sweep.charging_times[k], true, false});
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const TradeoffPoint& a, const TradeoffPoint& b) {
                     return a.alpha < b.alpha;
                   });
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (close(points[j].cost, points[k].cost) && close(points[j].time, points[k].time)) {
        points[k].duplicate = true;
        points[k].pareto = false;
        break;
      }
    }
  }
  for (auto& p : points) {
    if (p.duplicate) continue;
    for (const auto& q : points) {
      const bool no_worse = (q.cost <= p.cost || close(q.cost, p.cost)) &&
                            (q.time <= p.time || close(q.time, p.time));
      const bool better = (q.cost < p.cost && !close(q.cost, p.cost)) ||
                          (q.time < p.time && !close(q.time, p.time));
      if (no_worse && better) {
        p.pareto = false;
        break;
      }
    }
  }
  return points;
}

MonteCarloReport monte_carlo_bound(const ChargingInstance& instance,
                                   const Schedule& schedule, std::size_t samples,
                                   std::uint64_t seed, bool directed) {
  if (samples < 1) throw ArgumentError("monte carlo needs at least one sample");
  const int tau = instance.num_slots();
  const double rho = instance.rho();
  const double dh = instance.slot_hours();

  // Direction that makes e^T (dh sum_i r_i) largest.
  std::vector<double> aligned(static_cast<std::size_t>(tau), 0.0);
  for (int i = 0; i < schedule.num_evs(); ++i) {
    for (int t = 0; t < tau; ++t) aligned[static_cast<std::size_t>(t)] += dh * schedule.at(i, t);
  }
  double aligned_norm = std::sqrt(
      std::inner_product(aligned.begin(), aligned.end(), aligned.begin(), 0.0));
  if (aligned_norm > 0.0) {
    for (double& a : aligned) a /= aligned_norm;
  }

  MonteCarloReport report;
  report.samples = samples;
  report.rho = rho;
  report.seed = seed;
  report.directed = directed;
  report.max_gap = -std::numeric_limits<double>::infinity();
  report.tightness = -std::numeric_limits<double>::infinity();
  std::vector<double> e(static_cast<std::size_t>(tau));
  for (std::size_t k = 0; k < samples; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(k) >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t kind = directed ? k % 3 : k % 2;
    for (double& v : e) v = gauss(rng);
    double radius = rho;
    if (kind == 1) {
      radius = rho * std::pow(unit(rng), 1.0 / tau);
    } else if (kind == 2 && aligned_norm > 0.0) {
      // k == 2 is the exact alignment; later ones jitter around it.
      const double jitter = k == 2 ? 0.0 : 0.05 * unit(rng) / std::sqrt(static_cast<double>(tau));
      for (std::size_t t = 0; t < e.size(); ++t) e[t] = aligned[t] + jitter * e[t];
    }
    double norm = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
    for (double& v : e) v = norm > 0.0 ? v * (radius / norm) : 0.0;
    // Guard the ball constraint against round-off in the rescaling.
    norm = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
    if (norm > rho) {
      for (double& v : e) v *= rho / norm;
    }

    const auto check = worst_case_bound_check(instance, schedule, e);
    if (!check.holds) ++report.violations;
    report.max_gap = std::max(report.max_gap, check.realized_cost - check.bound);
    const double ratio = check.bound != 0.0 ? check.realized_cost / check.bound
                                            : (check.realized_cost == 0.0 ? 1.0 : 0.0);
    report.tightness = std::max(report.tightness, ratio);
  }
  return report;
}

}  // namespace evcharge
