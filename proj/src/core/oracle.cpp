// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"

namespace evcharge {
namespace {

constexpr long long kMaxGrid = 2'000'000;
constexpr double kTol = 1e-9;

struct Free {
  int ev;
  int slot;
  double upper;
};

class Reduced {
 public:
  explicit Reduced(const ChargingInstance& inst) : inst_(inst) {
    for (const auto& s : inst.sessions()) {
      for (int t = s.first_slot; t < s.last_slot; ++t) {
        vars_.push_back({s.ev_index, t, s.rate_cap(t)});
      }
    }
  }

  int dims() const { return static_cast<int>(vars_.size()); }
  const Free& var(int j) const { return vars_[static_cast<std::size_t>(j)]; }

  // Expands a reduced point into a full n x tau matrix. Returns false if the
  // eliminated coordinates or the station capacity are violated.
  bool expand(const std::vector<double>& x, std::vector<double>& r) const {
    const int tau = inst_.num_slots();
    r.assign(static_cast<std::size_t>(inst_.num_evs() * tau), 0.0);
    for (int j = 0; j < dims(); ++j) {
      r[static_cast<std::size_t>(var(j).ev * tau + var(j).slot)] = x[static_cast<std::size_t>(j)];
    }
    const double dh = inst_.slot_hours();
    for (const auto& s : inst_.sessions()) {
      double used = 0.0;
      for (int t = s.first_slot; t < s.last_slot; ++t) {
        used += r[static_cast<std::size_t>(s.ev_index * tau + t)];
      }
      const double last = s.demand_kwh / dh - used;
      if (last < -kTol || last > s.rate_cap(s.last_slot) + kTol) return false;
      r[static_cast<std::size_t>(s.ev_index * tau + s.last_slot)] = last;
    }
    for (int t = 0; t < tau; ++t) {
      double sum = 0.0;
      for (int i = 0; i < inst_.num_evs(); ++i) sum += r[static_cast<std::size_t>(i * tau + t)];
      if (sum > inst_.capacity()[static_cast<std::size_t>(t)] + kTol) return false;
    }
    return true;
  }

  // pi_t dh r - alpha (tau - t + 1)/tau r summed, plus rho sum_i ||dh r_i||.
  double objective(const std::vector<double>& r) const {
    const int tau = inst_.num_slots();
    const double dh = inst_.slot_hours();
    double linear = 0.0;
    double penalty = 0.0;
    for (int i = 0; i < inst_.num_evs(); ++i) {
      double sq = 0.0;
      for (int t = 0; t < tau; ++t) {
        const double rate = r[static_cast<std::size_t>(i * tau + t)];
        const double weight = static_cast<double>(tau - t) / tau;  // (tau-(t+1)+1)/tau
        linear += (inst_.prices()[static_cast<std::size_t>(t)] * dh -
                   inst_.alpha() * weight) * rate;
        sq += dh * rate * dh * rate;
      }
      penalty += std::sqrt(sq);
    }
    return linear + inst_.rho() * penalty;
  }

 private:
  const ChargingInstance& inst_;
  std::vector<Free> vars_;
};

// Feasible point by max-flow on source -> EV -> slot -> sink. Independent of
// the splitting solver; used when no grid point is feasible (tight
// capacities leave slivers the grid can miss).
bool max_flow_point(const ChargingInstance& inst, std::vector<double>& r) {
  const int n = inst.num_evs(), tau = inst.num_slots();
  const int nodes = n + tau + 2, src = n + tau, sink = n + tau + 1;
  std::vector<std::vector<double>> cap(static_cast<std::size_t>(nodes),
                                       std::vector<double>(static_cast<std::size_t>(nodes), 0.0));
  auto at = [&](int a, int b) -> double& {
    return cap[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  };
  double need = 0.0;
  for (const auto& s : inst.sessions()) {
    at(src, s.ev_index) = s.demand_kwh / inst.slot_hours();
    need += at(src, s.ev_index);
    for (int t = s.first_slot; t <= s.last_slot; ++t) at(s.ev_index, n + t) = s.rate_cap(t);
  }
  for (int t = 0; t < tau; ++t) at(n + t, sink) = inst.capacity()[static_cast<std::size_t>(t)];
  const auto original = cap;
  double flow = 0.0;
  while (true) {
    std::vector<int> prev(static_cast<std::size_t>(nodes), -1);
    prev[static_cast<std::size_t>(src)] = src;
    std::vector<int> queue{src};
    for (std::size_t q = 0; q < queue.size() && prev[static_cast<std::size_t>(sink)] < 0; ++q) {
      for (int b = 0; b < nodes; ++b) {
        if (prev[static_cast<std::size_t>(b)] < 0 && at(queue[q], b) > kTol) {
          prev[static_cast<std::size_t>(b)] = queue[q];
          queue.push_back(b);
        }
      }
    }
    if (prev[static_cast<std::size_t>(sink)] < 0) break;
    double push = std::numeric_limits<double>::infinity();
    for (int b = sink; b != src; b = prev[static_cast<std::size_t>(b)]) {
      push = std::min(push, at(prev[static_cast<std::size_t>(b)], b));
    }
    for (int b = sink; b != src; b = prev[static_cast<std::size_t>(b)]) {
      at(prev[static_cast<std::size_t>(b)], b) -= push;
      at(b, prev[static_cast<std::size_t>(b)]) += push;
    }
    flow += push;
  }
  if (flow < need - 1e-7 * (1.0 + need)) return false;
  r.assign(static_cast<std::size_t>(n * tau), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < tau; ++t) {
      const double used = original[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + t)] -
                          cap[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + t)];
      r[static_cast<std::size_t>(i * tau + t)] = std::max(0.0, used);
    }
  }
  return true;
}

// Budget-preserving moves: each EV either stays put or shifts one unit of
// rate from slot b to slot a of its window. Edges of the feasible polytope
// (a bounded transportation problem) are cycles that visit each EV at most
// once, so they are all of this form.
std::vector<std::vector<double>> exchange_moves(const ChargingInstance& inst) {
  const int tau = inst.num_slots();
  std::vector<std::vector<double>> moves{
      std::vector<double>(static_cast<std::size_t>(inst.num_evs() * tau), 0.0)};
  for (const auto& s : inst.sessions()) {
    const std::size_t count = moves.size();
    for (std::size_t m = 0; m < count; ++m) {
      for (int a = s.first_slot; a <= s.last_slot; ++a) {
        for (int b = s.first_slot; b <= s.last_slot; ++b) {
          if (a == b) continue;
          auto move = moves[m];
          move[static_cast<std::size_t>(s.ev_index * tau + a)] = 1.0;
          move[static_cast<std::size_t>(s.ev_index * tau + b)] = -1.0;
          moves.push_back(std::move(move));
        }
      }
    }
  }
  moves.erase(moves.begin());  // the all-zero move
  return moves;
}

bool within_bounds(const ChargingInstance& inst, const std::vector<double>& r) {
  const int tau = inst.num_slots();
  for (const auto& s : inst.sessions()) {
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      const double v = r[static_cast<std::size_t>(s.ev_index * tau + t)];
      if (v < 0.0 || v > s.rate_cap(t)) return false;
    }
  }
  for (int t = 0; t < tau; ++t) {
    double sum = 0.0;
    for (int i = 0; i < inst.num_evs(); ++i) sum += r[static_cast<std::size_t>(i * tau + t)];
    if (sum > inst.capacity()[static_cast<std::size_t>(t)] + kTol) return false;
  }
  return true;
}

}  // namespace

OracleResult oracle_solve(const ChargingInstance& instance, int grid_points) {
  if (instance.num_evs() > kOracleMaxEvs || instance.num_slots() > kOracleMaxSlots) {
    throw ArgumentError("instance too large for the oracle (n <= 3, tau <= 4)");
  }
  if (grid_points < 2) throw ArgumentError("oracle grid_points must be at least 2");

  const Reduced reduced(instance);
  const int d = reduced.dims();
  long long g = grid_points;
  if (d > 0) {
    while (g > 2 && std::pow(static_cast<double>(g), d) > static_cast<double>(kMaxGrid)) --g;
  }

  OracleResult result;
  std::vector<double> x(static_cast<std::size_t>(d), 0.0);
  std::vector<double> r, best_r;
  double best = std::numeric_limits<double>::infinity();
  std::vector<long long> digit(static_cast<std::size_t>(d), 0);
  while (true) {
    for (int j = 0; j < d; ++j) {
      x[static_cast<std::size_t>(j)] =
          reduced.var(j).upper * static_cast<double>(digit[static_cast<std::size_t>(j)]) /
          static_cast<double>(g - 1);
    }
    ++result.evaluations;
    if (reduced.expand(x, r)) {
      const double value = reduced.objective(r);
      if (value < best) {
        best = value;
        best_r = r;
      }
    }
    int j = 0;
    while (j < d && ++digit[static_cast<std::size_t>(j)] == g) {
      digit[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == d) break;
  }
  if (best_r.empty()) {
    if (!max_flow_point(instance, best_r)) throw ValidationError("oracle: instance is infeasible");
    best = reduced.objective(best_r);
  }
  // The eliminated coordinates may sit a few ulps outside their bounds.
  for (const auto& s : instance.sessions()) {
    auto& v = best_r[static_cast<std::size_t>(s.ev_index * instance.num_slots() + s.last_slot)];
    v = std::clamp(v, 0.0, s.rate_cap(s.last_slot));
  }

  // Compass refinement along the exchange moves with a halving step.
  const auto moves = exchange_moves(instance);
  double scale = 0.0;
  for (const auto& s : instance.sessions()) {
    for (int t = s.first_slot; t <= s.last_slot; ++t) scale = std::max(scale, s.rate_cap(t));
  }
  std::vector<double> trial;
  for (double h = scale / static_cast<double>(g - 1); h > 1e-13 * (1.0 + scale); h *= 0.5) {
    for (int sweep = 0; sweep < 10000; ++sweep) {
      double step_best = best;
      std::vector<double> step_r;
      for (const auto& move : moves) {
        trial = best_r;
        for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += h * move[k];
        ++result.evaluations;
        if (!within_bounds(instance, trial)) continue;
        const double value = reduced.objective(trial);
        if (value < step_best) {
          step_best = value;
          step_r = trial;
        }
      }
      if (step_r.empty()) break;
      best = step_best;
      best_r = std::move(step_r);
    }
  }

  result.schedule = Schedule(instance.num_evs(), instance.num_slots(), instance.fingerprint());
  result.schedule.rates() = best_r;
  result.objective = reduced.objective(result.schedule.rates());
  return result;
}

}  // namespace evcharge
