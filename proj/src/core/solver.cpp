// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "error.hpp"

namespace evcharge {

void SolverConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ArgumentError("step_size must be positive");
  }
  if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) {
    throw ArgumentError("tolerances must be positive");
  }
  if (!(over_relaxation >= 1.0 && over_relaxation <= 1.8)) {
    throw ArgumentError("over_relaxation must lie in [1, 1.8]");
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "Converged";
    case SolveStatus::kIterLimit: return "IterLimit";
    case SolveStatus::kInfeasible: return "Infeasible";
  }
  return "Unknown";
}

void project_box_budget(std::span<const double> v, std::span<const double> upper,
                        double budget, std::span<double> out) {
  const std::size_t n = v.size();
  if (upper.size() != n || out.size() != n) {
    throw ArgumentError("project_box_budget: size mismatch");
  }
  double upper_sum = 0.0;
  double upper_max = 0.0;
  for (double u : upper) {
    if (!(u >= 0.0)) throw ArgumentError("project_box_budget: negative upper bound");
    upper_sum += u;
    upper_max = std::max(upper_max, u);
  }
  const double slack = 1e-12 * std::max(1.0, upper_sum);
  if (!(budget >= -slack) || budget > upper_sum + slack) {
    throw ArgumentError("project_box_budget: budget outside [0, sum(upper)]");
  }
  if (n == 0) return;
  if (budget >= upper_sum) {
    std::copy(upper.begin(), upper.end(), out.begin());
    return;
  }
  if (budget <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }

  auto clipped_sum = [&](double mu) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::clamp(v[j] - mu, 0.0, upper[j]);
    return s;
  };
  double lo = *std::min_element(v.begin(), v.end()) - upper_max;
  double hi = *std::max_element(v.begin(), v.end());
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (clipped_sum(mid) > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Coordinates pinned at a bound over the whole bracket are fixed; the rest
  // share one shift solved exactly.
  double fixed = 0.0;
  double free_sum = 0.0;
  int free_count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (v[j] - hi >= upper[j]) {
      fixed += upper[j];
    } else if (v[j] - lo <= 0.0) {
      // contributes zero
    } else {
      free_sum += v[j];
      ++free_count;
    }
  }
  double mu = 0.5 * (lo + hi);
  if (free_count > 0) {
    const double exact = (free_sum - (budget - fixed)) / free_count;
    if (std::isfinite(exact)) mu = exact;
  }
  std::vector<double> x(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::clamp(v[j] - mu, 0.0, upper[j]);
    total += x[j];
  }
  // Round-off cleanup: spread the remaining gap over coordinates with room.
  for (int pass = 0; pass < 3 && total != budget; ++pass) {
    const double gap = budget - total;
    int room = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if ((gap > 0.0 && x[j] < upper[j]) || (gap < 0.0 && x[j] > 0.0)) ++room;
    }
    if (room == 0) break;
    total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if ((gap > 0.0 && x[j] < upper[j]) || (gap < 0.0 && x[j] > 0.0)) {
        x[j] = std::clamp(x[j] + gap / room, 0.0, upper[j]);
      }
      total += x[j];
    }
  }
  std::copy(x.begin(), x.end(), out.begin());
}

void project_capacity(std::span<double> column, double cap) {
  if (column.empty()) return;
  double sum = 0.0;
  for (double x : column) sum += x;
  if (sum <= cap) return;
  const double shift = (sum - cap) / static_cast<double>(column.size());
  for (double& x : column) x -= shift;
}

void group_soft_threshold(std::span<const double> v, double kappa,
                          std::span<double> out) {
  if (out.size() != v.size()) throw ArgumentError("group_soft_threshold: size mismatch");
  if (!(kappa >= 0.0)) throw ArgumentError("group_soft_threshold: kappa must be >= 0");
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm <= kappa) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double factor = 1.0 - kappa / norm;
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = factor * v[j];
}

std::optional<std::string> infeasibility_certificate(const ChargingInstance& instance) {
  const int tau = instance.num_slots();
  const double dh = instance.slot_hours();
  for (int a = 0; a < tau; ++a) {
    double available = 0.0;
    for (int b = a; b < tau; ++b) {
      available += instance.capacity()[static_cast<std::size_t>(b)] * dh;
      double required = 0.0;
      for (const auto& s : instance.sessions()) {
        if (s.first_slot >= a && s.last_slot <= b) required += s.demand_kwh;
      }
      if (required > available * (1.0 + 1e-9) + 1e-9) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "slots %d..%d: confined demand %.6g kWh exceeds station "
                      "capacity %.6g kWh",
                      a, b, required, available);
        return std::string(buf);
      }
    }
  }
  return std::nullopt;
}

namespace {

// Decision variables are the in-window entries only, stored EV by EV and
// scaled by the largest rate cap so residuals are comparable across
// instances.
struct Layout {
  int tau = 0;
  double rate_scale = 1.0;
  std::vector<std::size_t> row_begin;   // n + 1 offsets
  std::vector<double> upper;            // scaled rate caps
  std::vector<double> budget;           // scaled L_i / dh per EV
  std::vector<std::size_t> col_begin;   // tau + 1 offsets into col_entries
  std::vector<std::size_t> col_entries; // flat indices present in each slot
  std::vector<double> capacity;         // scaled C_t
};

Layout make_layout(const ChargingInstance& instance) {
  Layout layout;
  layout.tau = instance.num_slots();
  double scale = 0.0;
  for (const auto& s : instance.sessions()) {
    for (int t = s.first_slot; t <= s.last_slot; ++t) scale = std::max(scale, s.rate_cap(t));
  }
  layout.rate_scale = scale > 0.0 ? scale : 1.0;
  const double dh = instance.slot_hours();
  layout.row_begin.push_back(0);
  std::vector<std::vector<std::size_t>> per_slot(static_cast<std::size_t>(layout.tau));
  for (const auto& s : instance.sessions()) {
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      per_slot[static_cast<std::size_t>(t)].push_back(layout.upper.size());
      layout.upper.push_back(s.rate_cap(t) / layout.rate_scale);
    }
    layout.row_begin.push_back(layout.upper.size());
    layout.budget.push_back(s.demand_kwh / dh / layout.rate_scale);
  }
  layout.col_begin.push_back(0);
  for (const auto& entries : per_slot) {
    layout.col_entries.insert(layout.col_entries.end(), entries.begin(), entries.end());
    layout.col_begin.push_back(layout.col_entries.size());
  }
  for (double c : instance.capacity()) layout.capacity.push_back(c / layout.rate_scale);
  return layout;
}

std::span<double> row_of(const Layout& layout, std::vector<double>& x, std::size_t i) {
  return {x.data() + layout.row_begin[i], layout.row_begin[i + 1] - layout.row_begin[i]};
}

std::span<const double> row_of(const Layout& layout, const std::vector<double>& x,
                               std::size_t i) {
  return {x.data() + layout.row_begin[i], layout.row_begin[i + 1] - layout.row_begin[i]};
}

void project_all_box_budget(const Layout& layout, const std::vector<double>& v,
                            std::vector<double>& out) {
  const std::size_t n = layout.budget.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> upper{layout.upper.data() + layout.row_begin[i],
                                  layout.row_begin[i + 1] - layout.row_begin[i]};
    project_box_budget(row_of(layout, v, i), upper, layout.budget[i],
                       row_of(layout, out, i));
  }
}

void project_all_capacity(const Layout& layout, const std::vector<double>& v,
                          std::vector<double>& out, std::vector<double>& scratch) {
  out = v;
  for (int t = 0; t < layout.tau; ++t) {
    const auto begin = layout.col_begin[static_cast<std::size_t>(t)];
    const auto end = layout.col_begin[static_cast<std::size_t>(t) + 1];
    scratch.resize(end - begin);
    for (auto k = begin; k < end; ++k) scratch[k - begin] = v[layout.col_entries[k]];
    project_capacity(scratch, layout.capacity[static_cast<std::size_t>(t)]);
    for (auto k = begin; k < end; ++k) out[layout.col_entries[k]] = scratch[k - begin];
  }
}

double max_capacity_excess(const Layout& layout, const std::vector<double>& x) {
  double worst = 0.0;
  for (int t = 0; t < layout.tau; ++t) {
    double sum = 0.0;
    for (auto k = layout.col_begin[static_cast<std::size_t>(t)];
         k < layout.col_begin[static_cast<std::size_t>(t) + 1]; ++k) {
      sum += x[layout.col_entries[k]];
    }
    worst = std::max(worst, sum - layout.capacity[static_cast<std::size_t>(t)]);
  }
  return worst;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Dykstra's alternating projections between the per-EV sets and the
// capacity halfspaces. Ends on a per-EV projection, so boxes and budgets hold
// to round-off; returns the remaining capacity excess (scaled units).
double polish_feasible(const Layout& layout, const std::vector<double>& start,
                       std::vector<double>& x) {
  const std::size_t m = start.size();
  std::vector<double> p(m, 0.0), q(m, 0.0), y(m), tmp(m), scratch;
  x.resize(m);
  project_all_box_budget(layout, start, x);
  double excess = max_capacity_excess(layout, x);
  for (int iter = 0; iter < 20000 && excess > 1e-12; ++iter) {
    for (std::size_t k = 0; k < m; ++k) tmp[k] = x[k] + p[k];
    project_all_capacity(layout, tmp, y, scratch);
    for (std::size_t k = 0; k < m; ++k) {
      p[k] = tmp[k] - y[k];
      tmp[k] = y[k] + q[k];
    }
    project_all_box_budget(layout, tmp, x);
    for (std::size_t k = 0; k < m; ++k) q[k] = tmp[k] - x[k];
    excess = max_capacity_excess(layout, x);
  }
  return excess;
}

}  // namespace

SolveResult solve(const ChargingInstance& instance, const SolverConfig& config,
                  const Schedule* initial) {
  config.validate();
  const int n = instance.num_evs();
  const int tau = instance.num_slots();
  SolveResult result{Schedule(n, tau, instance.fingerprint()), {}};
  SolveReport& report = result.report;
  report.final_step_size = config.step_size;

  if (auto certificate = infeasibility_certificate(instance)) {
    report.status = SolveStatus::kInfeasible;
    report.detail = *certificate;
    return result;
  }

  const Layout layout = make_layout(instance);
  const std::size_t m = layout.upper.size();
  const double dh = instance.slot_hours();
  const double scale = layout.rate_scale;

  // Objective in scaled variables, normalized so the largest coefficient is
  // at most one.
  std::vector<double> coeff(m);
  const Schedule c = linear_coefficients(instance);
  for (int i = 0; i < n; ++i) {
    const auto& s = instance.session(i);
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      coeff[layout.row_begin[static_cast<std::size_t>(i)] +
            static_cast<std::size_t>(t - s.first_slot)] = c.at(i, t);
    }
  }
  double coeff_max = instance.rho() * dh;
  for (double v : coeff) coeff_max = std::max(coeff_max, std::abs(v));
  const double obj_scale = coeff_max > 0.0 ? coeff_max * scale : 1.0;
  for (double& v : coeff) v *= scale / obj_scale;
  const double kappa = instance.rho() * dh * scale / obj_scale;

  std::vector<double> z(m, 0.0);
  if (initial != nullptr) {
    if (initial->num_evs() != n || initial->num_slots() != tau) {
      throw ArgumentError("initial schedule dimensions do not match the instance");
    }
    for (int i = 0; i < n; ++i) {
      const auto& s = instance.session(i);
      for (int t = s.first_slot; t <= s.last_slot; ++t) {
        z[layout.row_begin[static_cast<std::size_t>(i)] +
          static_cast<std::size_t>(t - s.first_slot)] = initial->at(i, t) / scale;
      }
    }
  } else {
    // Uniform spread of each budget over its window.
    for (std::size_t i = 0; i < layout.budget.size(); ++i) {
      auto row = row_of(layout, z, i);
      for (double& v : row) v = layout.budget[i] / static_cast<double>(row.size());
    }
  }

  std::vector<double> x1(m), x2(m), x3(m), u1(m, 0.0), u2(m, 0.0), u3(m, 0.0);
  std::vector<double> v(m), z_prev(m), scratch, best_z = z;
  double beta = config.step_size;
  const double relax = config.over_relaxation;
  double best_score = std::numeric_limits<double>::infinity();
  double best_primal = 0.0, best_dual = 0.0;
  int iter = 0;
  bool converged = (m == 0);
  double primal = 0.0, dual = 0.0;

  while (!converged && iter < config.max_iters) {
    ++iter;
    // (a) linear term + group norm
    for (std::size_t k = 0; k < m; ++k) v[k] = z[k] - u1[k] - coeff[k] / beta;
    for (std::size_t i = 0; i < layout.budget.size(); ++i) {
      group_soft_threshold(row_of(layout, v, i), kappa / beta, row_of(layout, x1, i));
    }
    // (b) per-EV box and energy budget
    for (std::size_t k = 0; k < m; ++k) v[k] = z[k] - u2[k];
    project_all_box_budget(layout, v, x2);
    // (c) per-slot capacity
    for (std::size_t k = 0; k < m; ++k) v[k] = z[k] - u3[k];
    project_all_capacity(layout, v, x3, scratch);

    z_prev = z;
    for (std::size_t k = 0; k < m; ++k) {
      x1[k] = relax * x1[k] + (1.0 - relax) * z_prev[k];
      x2[k] = relax * x2[k] + (1.0 - relax) * z_prev[k];
      x3[k] = relax * x3[k] + (1.0 - relax) * z_prev[k];
      z[k] = (x1[k] + u1[k] + x2[k] + u2[k] + x3[k] + u3[k]) / 3.0;
    }
    primal = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double d1 = x1[k] - z[k], d2 = x2[k] - z[k], d3 = x3[k] - z[k];
      u1[k] += d1;
      u2[k] += d2;
      u3[k] += d3;
      primal = std::max({primal, std::abs(d1), std::abs(d2), std::abs(d3)});
    }
    dual = beta * max_abs_diff(z, z_prev);

    const double score = std::max(primal / config.tol_primal, dual / config.tol_dual);
    if (score < best_score) {
      best_score = score;
      best_z = z;
      best_primal = primal;
      best_dual = dual;
    }
    if (primal <= config.tol_primal && dual <= config.tol_dual) {
      converged = true;
      break;
    }
    if (config.adaptive_step && iter % 25 == 0) {
      double factor = 1.0;
      if (primal > 10.0 * dual && beta < 1e6) {
        factor = 2.0;
      } else if (dual > 10.0 * primal && beta > 1e-6) {
        factor = 0.5;
      }
      if (factor != 1.0) {
        beta *= factor;
        for (std::size_t k = 0; k < m; ++k) {
          u1[k] /= factor;
          u2[k] /= factor;
          u3[k] /= factor;
        }
      }
    }
  }

  const std::vector<double>& chosen = converged ? z : best_z;
  report.iterations = iter;
  report.primal_residual = converged ? primal : best_primal;
  report.dual_residual = converged ? dual : best_dual;
  report.final_step_size = beta;
  report.status = converged ? SolveStatus::kConverged : SolveStatus::kIterLimit;

  std::vector<double> feasible;
  polish_feasible(layout, chosen, feasible);
  for (int i = 0; i < n; ++i) {
    const auto& s = instance.session(i);
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      result.schedule.at(i, t) =
          feasible[layout.row_begin[static_cast<std::size_t>(i)] +
                   static_cast<std::size_t>(t - s.first_slot)] * scale;
    }
  }

  const auto feas = check_schedule(instance, result.schedule);
  if (!feas.ok && report.status == SolveStatus::kConverged) {
    report.status = SolveStatus::kIterLimit;
    report.detail = "feasibility polish did not reach tolerance: " + feas.problems.front();
  } else if (report.status == SolveStatus::kIterLimit && report.detail.empty()) {
    report.detail = "iteration limit reached; returning the best iterate";
  }

  report.nominal_cost = nominal_cost(instance, result.schedule);
  report.fast_term = fast_objective(instance, result.schedule);
  report.penalty_term = robust_penalty(instance, result.schedule);
  report.objective = report.nominal_cost + instance.alpha() * report.fast_term +
                     report.penalty_term;
  return result;
}

}  // namespace evcharge
