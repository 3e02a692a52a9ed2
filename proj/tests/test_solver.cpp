// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "solver.hpp"
#include "support.hpp"
#include "tariff.hpp"

using namespace evcharge;
using evtest::ev;
using evtest::make_instance;

TEST(Solve, CheapestSlotTakesTheDemand) {
  auto inst = make_instance({1, 2}, 0.0, 0.0, 1000.0, {ev(0, 1, 7, 7)});
  auto r = solve(inst);
  ASSERT_EQ(r.report.status, SolveStatus::kConverged) << r.report.detail;
  EXPECT_NEAR(r.schedule.at(0, 0), 7.0, 1e-4);
  EXPECT_NEAR(r.schedule.at(0, 1), 0.0, 1e-4);
  EXPECT_NEAR(r.report.objective, 7.0, 1e-4);
}

TEST(Solve, FastTermBreaksPriceTies) {
  for (double alpha : {0.1, 1.0, 5.0}) {
    auto inst = make_instance({1.5, 1.5}, alpha, 0.0, 1000.0, {ev(0, 1, 7, 7)});
    auto r = solve(inst);
    ASSERT_EQ(r.report.status, SolveStatus::kConverged);
    EXPECT_NEAR(r.schedule.at(0, 0), 7.0, 1e-4) << alpha;
    EXPECT_NEAR(r.schedule.at(0, 1), 0.0, 1e-4) << alpha;
  }
}

TEST(Solve, ForcedPointIsReturnedExactly) {
  auto base = make_instance({1, 3, 2}, 0.0, 0.0, 10.0,
                            {ev(0, 2, 15, 5), ev(1, 2, 10, 5)});
  for (double alpha : {0.0, 1.0, 10.0}) {
    for (double rho : {0.0, 5.0, 100.0}) {
      auto r = solve(base.with_alpha(alpha).with_rho(rho));
      ASSERT_EQ(r.report.status, SolveStatus::kConverged);
      EXPECT_TRUE(check_schedule(base, r.schedule).ok);
      for (int t = 0; t < 3; ++t) EXPECT_NEAR(r.schedule.at(0, t), 5.0, 1e-6);
      EXPECT_EQ(r.schedule.at(1, 0), 0.0);
      EXPECT_NEAR(r.schedule.at(1, 1), 5.0, 1e-6);
    }
  }
}

TEST(Solve, ReportTermsAddUp) {
  auto prices = build_price_vector(Tariff::vietnam(), evtest::day_start(), 60, 24);
  auto inst = make_instance(prices, 2.0, 5.0, 12.0,
                            {ev(7, 15, 20, 7), ev(8, 18, 25, 7), ev(10, 21, 12, 7)});
  auto r = solve(inst);
  ASSERT_EQ(r.report.status, SolveStatus::kConverged);
  EXPECT_NEAR(r.report.nominal_cost, nominal_cost(inst, r.schedule), 1e-9);
  EXPECT_NEAR(r.report.fast_term, fast_objective(inst, r.schedule), 1e-9);
  EXPECT_NEAR(r.report.penalty_term, robust_penalty(inst, r.schedule), 1e-9);
  EXPECT_NEAR(r.report.objective,
              r.report.nominal_cost + 2.0 * r.report.fast_term + r.report.penalty_term, 1e-9);
  EXPECT_LE(r.report.primal_residual, 1e-6);
  EXPECT_LE(r.report.dual_residual, 1e-6);
  EXPECT_TRUE(check_schedule(inst, r.schedule).ok);
  for (double p : power_profile(inst, r.schedule)) EXPECT_LE(p, 12.0 + 1e-6);
}

// The objective is convex, so the solver's optimum must not be beaten by any
// feasible point; random feasible points come from the instance generator.
TEST(Solve, NoRandomFeasiblePointDoesBetter) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = evtest::random_tiny_instance(rng, 2 * unit(rng), 3 * unit(rng), 4, 6);
    auto r = solve(inst);
    ASSERT_EQ(r.report.status, SolveStatus::kConverged);
    ASSERT_TRUE(check_schedule(inst, r.schedule).ok);
    const double best = total_objective(inst, r.schedule);
    // Convex combinations with the optimum stay feasible; midpoint convexity
    // along the segment to a perturbed feasible point is checked too.
    for (int k = 0; k < 20; ++k) {
      Schedule y = r.schedule;
      const int i = static_cast<int>(rng() % static_cast<unsigned>(inst.num_evs()));
      const auto& s = inst.session(i);
      if (s.window_slots() < 2) continue;
      const int a = s.first_slot + static_cast<int>(rng() % static_cast<unsigned>(s.window_slots()));
      const int b = s.first_slot + static_cast<int>(rng() % static_cast<unsigned>(s.window_slots()));
      if (a == b) continue;
      // Shift energy from a to b, as far as the box and capacity allow.
      double room_cap = inst.capacity()[static_cast<std::size_t>(b)];
      for (int j = 0; j < inst.num_evs(); ++j) room_cap -= y.at(j, b);
      const double shift = unit(rng) * std::min({y.at(i, a), s.rate_cap(b) - y.at(i, b),
                                                 std::max(0.0, room_cap)});
      if (shift <= 0) continue;
      y.at(i, a) -= shift;
      y.at(i, b) += shift;
      EXPECT_GE(total_objective(inst, y), best - 1e-6 * (1 + std::abs(best)));
      Schedule mid = y;
      for (std::size_t q = 0; q < mid.rates().size(); ++q) {
        mid.rates()[q] = 0.5 * (y.rates()[q] + r.schedule.rates()[q]);
      }
      EXPECT_LE(total_objective(inst, mid),
                0.5 * (total_objective(inst, y) + best) + 1e-9 * (1 + std::abs(best)));
    }
  }
}

TEST(Solve, InfeasibleCapacityIsCertified) {
  auto inst = make_instance({1, 1, 1, 1}, 1.0, 5.0, 15.0,
                            {ev(1, 2, 12, 7), ev(1, 2, 12, 7), ev(1, 2, 12, 7)});
  auto cert = infeasibility_certificate(inst);
  ASSERT_TRUE(cert.has_value());
  auto r = solve(inst);
  EXPECT_EQ(r.report.status, SolveStatus::kInfeasible);
  EXPECT_FALSE(r.report.detail.empty());
  EXPECT_EQ(r.report.iterations, 0);
}

TEST(Solve, FeasibleInstancesHaveNoCertificate) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = evtest::random_tiny_instance(rng, 1.0, 1.0, 4, 8);
    EXPECT_FALSE(infeasibility_certificate(inst).has_value());
  }
}

TEST(Solve, IterationLimitIsReported) {
  auto prices = build_price_vector(Tariff::vietnam(), evtest::day_start(), 60, 24);
  auto inst = make_instance(prices, 1.0, 5.0, 10.0,
                            {ev(7, 15, 20, 7), ev(8, 18, 25, 7), ev(10, 21, 12, 7)});
  SolverConfig config;
  config.max_iters = 3;
  auto r = solve(inst, config);
  EXPECT_EQ(r.report.status, SolveStatus::kIterLimit);
  EXPECT_EQ(r.report.iterations, 3);
}

TEST(Solve, EmptyInstance) {
  auto inst = make_instance({1, 2, 3}, 1.0, 5.0, 10.0, {});
  auto r = solve(inst);
  EXPECT_EQ(r.report.status, SolveStatus::kConverged);
  EXPECT_DOUBLE_EQ(r.report.objective, 0.0);
}

TEST(Solve, ZeroDemandEvGetsNothing) {
  auto inst = make_instance({1, 2, 3}, 1.0, 5.0, 10.0, {ev(0, 2, 0, 7), ev(0, 2, 5, 7)});
  auto r = solve(inst);
  ASSERT_EQ(r.report.status, SolveStatus::kConverged);
  for (int t = 0; t < 3; ++t) EXPECT_EQ(r.schedule.at(0, t), 0.0);
}

TEST(Solve, Deterministic) {
  auto prices = build_price_vector(Tariff::vietnam(), evtest::day_start(), 60, 24);
  auto inst = make_instance(prices, 1.0, 5.0, 12.0,
                            {ev(7, 15, 20, 7), ev(8, 18, 25, 7), ev(10, 21, 12, 7)});
  auto a = solve(inst);
  auto b = solve(inst);
  EXPECT_EQ(a.schedule.rates(), b.schedule.rates());
  EXPECT_EQ(a.report.iterations, b.report.iterations);
}

TEST(Solve, WarmStartFromOptimum) {
  auto prices = build_price_vector(Tariff::vietnam(), evtest::day_start(), 60, 24);
  auto inst = make_instance(prices, 1.0, 5.0, 12.0, {ev(7, 15, 20, 7), ev(8, 18, 25, 7)});
  auto cold = solve(inst);
  auto warm = solve(inst, {}, &cold.schedule);
  ASSERT_EQ(warm.report.status, SolveStatus::kConverged);
  EXPECT_NEAR(warm.report.objective, cold.report.objective, 1e-5 * std::abs(cold.report.objective));
  Schedule wrong(1, 24);
  EXPECT_THROW(solve(inst, {}, &wrong), ArgumentError);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.step_size = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.over_relaxation = 2.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.tol_dual = -1;
  EXPECT_THROW(c.validate(), ArgumentError);
  EXPECT_STREQ(to_string(SolveStatus::kIterLimit), "IterLimit");
}
