// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "error.hpp"
#include "solver.hpp"
#include "support.hpp"

using namespace evcharge;

namespace {

using Vec = std::vector<double>;

Vec box_budget(const Vec& v, const Vec& upper, double budget) {
  Vec out(v.size());
  project_box_budget(v, upper, budget, out);
  return out;
}

double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

}  // namespace

TEST(ProjectBoxBudget, AnalyticCases) {
  EXPECT_EQ(box_budget({0, 0}, {7, 7}, 7), (Vec{3.5, 3.5}));
  EXPECT_EQ(box_budget({10, 0}, {7, 7}, 7), (Vec{7, 0}));
  EXPECT_EQ(box_budget({-3, 12, 0.5}, {7, 2, 4}, 13), (Vec{7, 2, 4}));
  EXPECT_EQ(box_budget({1, 2, 3}, {7, 7, 7}, 0), (Vec{0, 0, 0}));
  EXPECT_EQ(box_budget({}, {}, 0), Vec{});
}

TEST(ProjectBoxBudget, RejectsUnreachableBudget) {
  Vec out(2);
  EXPECT_THROW(project_box_budget(Vec{0, 0}, Vec{1, 1}, 2.5, out), ArgumentError);
  EXPECT_THROW(project_box_budget(Vec{0, 0}, Vec{1, 1}, -0.1, out), ArgumentError);
  EXPECT_THROW(project_box_budget(Vec{0, 0}, Vec{1}, 1, out), ArgumentError);
}

TEST(ProjectBoxBudget, InPlace) {
  Vec v{10, 0};
  project_box_budget(v, Vec{7, 7}, 7, v);
  EXPECT_EQ(v, (Vec{7, 0}));
}

// Agreement with an independent grid search on the 3-d feasible triangle.
TEST(ProjectBoxBudget, MatchesGridOracle3d) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 3> v, u;
    for (int k = 0; k < 3; ++k) {
      v[k] = -6.0 + 18.0 * unit(rng);
      u[k] = 0.5 + 6.5 * unit(rng);
    }
    const double b = (u[0] + u[1] + u[2]) * unit(rng);
    const auto expect = evtest::grid_project3(v, u, b);
    const auto got = box_budget({v[0], v[1], v[2]}, {u[0], u[1], u[2]}, b);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(got[k], expect[k], 1e-6) << "trial " << trial;
    }
  }
}

// Projections onto convex sets are firmly nonexpansive; in particular
// ||P(a) - P(b)|| <= ||a - b||. Also checks feasibility and the variational
// inequality <v - P(v), y - P(v)> <= 0 for random feasible y.
TEST(ProjectBoxBudget, NonexpansiveAndOptimal) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    Vec upper(n), a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      upper[k] = 0.1 + 7 * unit(rng);
      a[k] = -10 + 20 * unit(rng);
      b[k] = -10 + 20 * unit(rng);
    }
    const double total = std::accumulate(upper.begin(), upper.end(), 0.0);
    const double budget = total * unit(rng);
    const Vec pa = box_budget(a, upper, budget);
    const Vec pb = box_budget(b, upper, budget);
    EXPECT_LE(dist2(pa, pb), dist2(a, b) * (1 + 1e-12) + 1e-18);
    EXPECT_NEAR(std::accumulate(pa.begin(), pa.end(), 0.0), budget, 1e-9 * (1 + budget));
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_GE(pa[k], 0.0);
      EXPECT_LE(pa[k], upper[k]);
    }
    // A random feasible point y: another projection.
    Vec c(n);
    for (auto& x : c) x = -10 + 20 * unit(rng);
    const Vec y = box_budget(c, upper, budget);
    double inner = 0.0;
    for (std::size_t k = 0; k < n; ++k) inner += (a[k] - pa[k]) * (y[k] - pa[k]);
    EXPECT_LE(inner, 1e-9);
  }
}

TEST(ProjectCapacity, AnalyticCases) {
  Vec interior{100, 199};
  project_capacity(interior, 300);
  EXPECT_EQ(interior, (Vec{100, 199}));
  Vec two{200, 200};
  project_capacity(two, 300);
  EXPECT_EQ(two, (Vec{150, 150}));
  Vec one{400};
  project_capacity(one, 300);
  EXPECT_EQ(one, (Vec{300}));
}

TEST(ProjectCapacity, NonexpansiveAndOnBoundary) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    Vec a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = 20 * unit(rng);
      b[k] = 20 * unit(rng);
    }
    const double cap = 5 + 60 * unit(rng);
    Vec pa = a, pb = b;
    project_capacity(pa, cap);
    project_capacity(pb, cap);
    EXPECT_LE(dist2(pa, pb), dist2(a, b) * (1 + 1e-12) + 1e-18);
    const double s = std::accumulate(pa.begin(), pa.end(), 0.0);
    EXPECT_LE(s, cap + 1e-9);
    if (std::accumulate(a.begin(), a.end(), 0.0) > cap) {
      EXPECT_NEAR(s, cap, 1e-9);
    }
  }
}

TEST(GroupSoftThreshold, AnalyticCases) {
  Vec out(2);
  group_soft_threshold(Vec{3, 4}, 5, out);
  EXPECT_EQ(out, (Vec{0, 0}));
  group_soft_threshold(Vec{3, 4}, 2.5, out);
  EXPECT_EQ(out, (Vec{1.5, 2.0}));
  group_soft_threshold(Vec{3, 4}, 0, out);
  EXPECT_EQ(out, (Vec{3, 4}));
  group_soft_threshold(Vec{0, 0}, 1, out);
  EXPECT_EQ(out, (Vec{0, 0}));
}

// x = prox(v) iff v - x lies in kappa * subdifferential of ||.|| at x.
TEST(GroupSoftThreshold, SubgradientCondition) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    Vec v(n);
    for (auto& x : v) x = -5 + 10 * unit(rng);
    const double norm_v = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    const double kappa = 2.0 * norm_v * unit(rng);
    Vec x(n);
    group_soft_threshold(v, kappa, x);
    const double norm_x = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (norm_x == 0.0) {
      EXPECT_LE(norm_v, kappa + 1e-9);
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        EXPECT_NEAR(v[k] - x[k], kappa * x[k] / norm_x, 1e-9);
      }
    }
  }
}

TEST(GroupSoftThreshold, Nonexpansive) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vec a(5), b(5), pa(5), pb(5);
    for (auto& x : a) x = unit(rng);
    for (auto& x : b) x = unit(rng);
    const double kappa = std::abs(unit(rng));
    group_soft_threshold(a, kappa, pa);
    group_soft_threshold(b, kappa, pb);
    EXPECT_LE(dist2(pa, pb), dist2(a, b) * (1 + 1e-12) + 1e-18);
  }
}
