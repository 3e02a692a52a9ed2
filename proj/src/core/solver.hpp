// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_SOLVER_HPP_
#define EVCHARGE_CORE_SOLVER_HPP_

#include <optional>
#include <span>
#include <string>

#include "model.hpp"

namespace evcharge {

struct SolverConfig {
  double step_size = 1.0;       // initial ADMM penalty
  int max_iters = 50000;
  double tol_primal = 1e-6;     // on rates normalized by the largest rate cap
  double tol_dual = 1e-6;
  double over_relaxation = 1.6; // in [1, 1.8]
  bool adaptive_step = true;    // residual balancing

  // Throws ArgumentError when a field is out of range.
  void validate() const;
};

enum class SolveStatus { kConverged, kIterLimit, kInfeasible };

const char* to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::kIterLimit;
  int iterations = 0;
  double objective = 0.0;
  double nominal_cost = 0.0;
  double fast_term = 0.0;     // y^F, enters the objective times alpha
  double penalty_term = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double final_step_size = 0.0;
  std::string detail;
};

struct SolveResult {
  Schedule schedule;
  SolveReport report;
};

// Euclidean projection of v onto {x : 0 <= x <= upper, sum x = budget},
// found by bisection on the shift mu of x(mu) = clip(v - mu, 0, upper) and
// finished in closed form on the free coordinates. out may alias v.
// Throws ArgumentError unless 0 <= budget <= sum(upper).
void project_box_budget(std::span<const double> v, std::span<const double> upper,
                        double budget, std::span<double> out);

// Projection onto the halfspace {x : sum x <= cap}, in place.
void project_capacity(std::span<double> column, double cap);

// prox of kappa * ||.||_2: max(0, 1 - kappa / ||v||) v. out may alias v.
void group_soft_threshold(std::span<const double> v, double kappa,
                          std::span<double> out);

// A slot range whose capacity cannot cover the demand of the EVs confined to
// it. Sufficient (not necessary) evidence of infeasibility.
std::optional<std::string> infeasibility_certificate(const ChargingInstance& instance);

// Consensus ADMM over three blocks: linear term plus row-norm prox, per-EV
// box/budget projection, per-slot capacity projection. The returned schedule
// is the consensus iterate pushed onto the feasible set by alternating
// (Dykstra) projections. Single-threaded and deterministic.
SolveResult solve(const ChargingInstance& instance,
                  const SolverConfig& config = {},
                  const Schedule* initial = nullptr);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_SOLVER_HPP_
