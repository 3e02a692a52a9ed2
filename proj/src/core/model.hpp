// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_MODEL_HPP_
#define EVCHARGE_CORE_MODEL_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sessions.hpp"
#include "tariff.hpp"
#include "timeutil.hpp"

namespace evcharge {

// Uniform feasibility tolerance, in instance units (kW, kWh).
inline constexpr double kFeasTol = 1e-6;

// A fully discretized robust charging problem
//
//   min  sum_t pi_t dh sum_i r_it - alpha sum_t w_t sum_i r_it
//        + rho sum_i || dh r_i ||_2
//   s.t. 0 <= r_it <= s_it inside EV i's window, r_it = 0 outside,
//        sum_t r_it dh = L_i, sum_i r_it <= C_t,
//
// with w_t = (tau - t + 1) / tau for 1-based t. Immutable after
// construction; the constructor validates every field.
class ChargingInstance {
 public:
  ChargingInstance(Timestamp horizon_start, int slot_minutes, int num_slots,
                   std::vector<double> prices, double alpha, double rho,
                   std::vector<double> capacity,
                   std::vector<DiscretizedSession> sessions);

  int num_evs() const { return static_cast<int>(sessions_.size()); }
  int num_slots() const { return num_slots_; }
  int slot_minutes() const { return slot_minutes_; }
  double slot_hours() const { return slot_minutes_ / 60.0; }
  Timestamp horizon_start() const { return horizon_start_; }
  double alpha() const { return alpha_; }
  double rho() const { return rho_; }
  const std::vector<double>& prices() const { return prices_; }
  const std::vector<double>& capacity() const { return capacity_; }
  const std::vector<double>& fast_weights() const { return fast_weights_; }
  const std::vector<DiscretizedSession>& sessions() const { return sessions_; }
  const DiscretizedSession& session(int i) const {
    return sessions_[static_cast<std::size_t>(i)];
  }
  const std::string& fingerprint() const { return fingerprint_; }

  ChargingInstance with_alpha(double alpha) const;
  ChargingInstance with_rho(double rho) const;

 private:
  Timestamp horizon_start_;
  int slot_minutes_;
  int num_slots_;
  std::vector<double> prices_;
  double alpha_;
  double rho_;
  std::vector<double> capacity_;
  std::vector<DiscretizedSession> sessions_;
  std::vector<double> fast_weights_;
  std::string fingerprint_;
};

// Dense n x tau allocation in kW, row-major by EV.
class Schedule {
 public:
  Schedule() = default;
  Schedule(int num_evs, int num_slots, std::string fingerprint = {});

  int num_evs() const { return num_evs_; }
  int num_slots() const { return num_slots_; }
  double& at(int ev, int slot) { return rates_[index(ev, slot)]; }
  double at(int ev, int slot) const { return rates_[index(ev, slot)]; }
  std::span<const double> row(int ev) const {
    return {rates_.data() + index(ev, 0), static_cast<std::size_t>(num_slots_)};
  }
  std::span<double> row(int ev) {
    return {rates_.data() + index(ev, 0), static_cast<std::size_t>(num_slots_)};
  }
  const std::vector<double>& rates() const { return rates_; }
  std::vector<double>& rates() { return rates_; }
  const std::string& instance_fingerprint() const { return fingerprint_; }
  void set_instance_fingerprint(std::string fp) { fingerprint_ = std::move(fp); }

 private:
  std::size_t index(int ev, int slot) const {
    return static_cast<std::size_t>(ev) * static_cast<std::size_t>(num_slots_) +
           static_cast<std::size_t>(slot);
  }
  int num_evs_ = 0;
  int num_slots_ = 0;
  std::vector<double> rates_;
  std::string fingerprint_;
};

// c_it = pi_t dh - alpha w_t inside the window; 0 outside (those entries are
// not decision variables).
Schedule linear_coefficients(const ChargingInstance& instance);

// y^C: sum_t pi_t dh sum_i r_it.
double nominal_cost(const ChargingInstance& instance, const Schedule& schedule);
// y^F: -sum_t w_t sum_i r_it (nonpositive for nonnegative r).
double fast_objective(const ChargingInstance& instance, const Schedule& schedule);
// rho sum_i ||dh r_i||_2.
double robust_penalty(const ChargingInstance& instance, const Schedule& schedule);
// nominal_cost + alpha * fast_objective + robust_penalty.
double total_objective(const ChargingInstance& instance, const Schedule& schedule);

struct BoundCheck {
  double realized_cost = 0.0;
  double bound = 0.0;
  bool holds = false;
};

// Cost of the schedule under prices pi_hat + e against the robust bound
// nominal_cost + robust_penalty. Rejects ||e||_2 > rho.
BoundCheck worst_case_bound_check(const ChargingInstance& instance,
                                  const Schedule& schedule,
                                  std::span<const double> perturbation);

struct FeasibilityReport {
  bool ok = true;
  double max_box_violation = 0.0;
  int window_nonzeros = 0;
  double max_energy_error = 0.0;
  double max_capacity_violation = 0.0;
  std::vector<std::string> problems;
};

// Box, window zeros (exact), energy budgets and capacity, all at eps.
FeasibilityReport check_schedule(const ChargingInstance& instance,
                                 const Schedule& schedule,
                                 double eps = kFeasTol);

// Parameters for turning sessions plus a tariff into an instance. An empty
// horizon_start means midnight of the earliest arrival; num_slots == 0 means
// one day. capacity_kw of length 1 is broadcast over the horizon.
struct InstanceParams {
  std::optional<Timestamp> horizon_start;
  int slot_minutes = 60;
  int num_slots = 0;
  double alpha = 1.0;
  double rho = 5.0;
  std::vector<double> capacity_kw{300.0};
  double max_rate_kw = 7.0;
  DemandPolicy policy = DemandPolicy::kClamp;
};

struct BuiltInstance {
  ChargingInstance instance;
  std::vector<Rejection> rejections;
  SlotGrid grid;
};

BuiltInstance build_instance(const InstanceParams& params, const Tariff& tariff,
                             const std::vector<Session>& sessions);

// Instance JSON: {num_slots, slot_minutes, horizon_start, alpha, rho,
// capacity_kw (scalar or array), max_rate_kw, tariff_file, sessions_file}.
// Relative file paths resolve against the JSON file's directory; a missing
// tariff_file selects the built-in Vietnam preset.
struct InstanceFile {
  InstanceParams params;
  std::string tariff_file;
  std::string sessions_file;
};

InstanceFile parse_instance_json(const std::string& text,
                                 const std::string& base_dir);
BuiltInstance load_instance_file(const std::string& path);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_MODEL_HPP_
