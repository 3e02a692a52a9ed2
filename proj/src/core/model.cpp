// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "digest.hpp"
#include "error.hpp"

namespace evcharge {
namespace {

void require_dims(const ChargingInstance& instance, const Schedule& schedule) {
  if (schedule.num_evs() != instance.num_evs() ||
      schedule.num_slots() != instance.num_slots()) {
    throw ArgumentError(
        "schedule is " + std::to_string(schedule.num_evs()) + "x" +
        std::to_string(schedule.num_slots()) + " but instance is " +
        std::to_string(instance.num_evs()) + "x" +
        std::to_string(instance.num_slots()));
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ChargingInstance::ChargingInstance(Timestamp horizon_start, int slot_minutes,
                                   int num_slots, std::vector<double> prices,
                                   double alpha, double rho,
                                   std::vector<double> capacity,
                                   std::vector<DiscretizedSession> sessions)
    : horizon_start_(horizon_start),
      slot_minutes_(slot_minutes),
      num_slots_(num_slots),
      prices_(std::move(prices)),
      alpha_(alpha),
      rho_(rho),
      capacity_(std::move(capacity)),
      sessions_(std::move(sessions)) {
  if (num_slots_ <= 0) throw ValidationError("num_slots must be positive");
  if (slot_minutes_ <= 0) throw ValidationError("slot_minutes must be positive");
  if (prices_.size() != static_cast<std::size_t>(num_slots_)) {
    throw ValidationError("price vector length must equal num_slots");
  }
  if (capacity_.size() != static_cast<std::size_t>(num_slots_)) {
    throw ValidationError("capacity vector length must equal num_slots");
  }
  for (double p : prices_) {
    if (!std::isfinite(p)) throw ValidationError("prices must be finite");
  }
  for (double c : capacity_) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ValidationError("capacity entries must be positive");
    }
  }
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) {
    throw ValidationError("alpha must be a finite nonnegative number");
  }
  if (!(rho_ >= 0.0) || !std::isfinite(rho_)) {
    throw ValidationError("rho must be a finite nonnegative number");
  }
  const double dh = slot_hours();
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    auto& s = sessions_[i];
    s.ev_index = static_cast<int>(i);
    if (s.first_slot < 0 || s.last_slot < s.first_slot ||
        s.last_slot >= num_slots_) {
      throw ValidationError("session " + s.session_id +
                            " has a window outside the horizon");
    }
    if (!s.rate_caps.empty() &&
        s.rate_caps.size() != static_cast<std::size_t>(s.window_slots())) {
      throw ValidationError("session " + s.session_id +
                            " rate_caps length must match its window");
    }
    double deliverable = 0.0;
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      if (!(s.rate_cap(t) > 0.0)) {
        throw ValidationError("session " + s.session_id +
                              " has a nonpositive rate cap");
      }
      deliverable += s.rate_cap(t) * dh;
    }
    if (!(s.demand_kwh >= 0.0) ||
        s.demand_kwh > deliverable * (1.0 + 1e-12)) {
      throw ValidationError("session " + s.session_id + " demand " +
                            fmt(s.demand_kwh) + " kWh is not deliverable (max " +
                            fmt(deliverable) + " kWh)");
    }
  }
  fast_weights_.resize(static_cast<std::size_t>(num_slots_));
  for (int t = 0; t < num_slots_; ++t) {
    fast_weights_[static_cast<std::size_t>(t)] =
        static_cast<double>(num_slots_ - t) / num_slots_;
  }

  DigestBuilder digest;
  digest.add(static_cast<long long>(horizon_start_.time_since_epoch().count()))
      .add(static_cast<long long>(slot_minutes_))
      .add(static_cast<long long>(num_slots_))
      .add(alpha_)
      .add(rho_);
  for (double p : prices_) digest.add(p);
  for (double c : capacity_) digest.add(c);
  for (const auto& s : sessions_) {
    digest.add(s.session_id)
        .add(static_cast<long long>(s.first_slot))
        .add(static_cast<long long>(s.last_slot))
        .add(s.demand_kwh)
        .add(s.max_rate_kw);
    for (double cap : s.rate_caps) digest.add(cap);
  }
  fingerprint_ = digest.hex().substr(0, 16);
}

ChargingInstance ChargingInstance::with_alpha(double alpha) const {
  return ChargingInstance(horizon_start_, slot_minutes_, num_slots_, prices_,
                          alpha, rho_, capacity_, sessions_);
}

ChargingInstance ChargingInstance::with_rho(double rho) const {
  return ChargingInstance(horizon_start_, slot_minutes_, num_slots_, prices_,
                          alpha_, rho, capacity_, sessions_);
}

Schedule::Schedule(int num_evs, int num_slots, std::string fingerprint)
    : num_evs_(num_evs),
      num_slots_(num_slots),
      rates_(static_cast<std::size_t>(num_evs) * static_cast<std::size_t>(num_slots),
             0.0),
      fingerprint_(std::move(fingerprint)) {
  if (num_evs < 0 || num_slots < 0) {
    throw ArgumentError("schedule dimensions must be nonnegative");
  }
}

Schedule linear_coefficients(const ChargingInstance& instance) {
  Schedule c(instance.num_evs(), instance.num_slots(), instance.fingerprint());
  const double dh = instance.slot_hours();
  const auto& prices = instance.prices();
  const auto& w = instance.fast_weights();
  for (const auto& s : instance.sessions()) {
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      const auto k = static_cast<std::size_t>(t);
      c.at(s.ev_index, t) = prices[k] * dh - instance.alpha() * w[k];
    }
  }
  return c;
}

double nominal_cost(const ChargingInstance& instance, const Schedule& schedule) {
  require_dims(instance, schedule);
  const double dh = instance.slot_hours();
  double total = 0.0;
  for (int t = 0; t < instance.num_slots(); ++t) {
    double column = 0.0;
    for (int i = 0; i < instance.num_evs(); ++i) column += schedule.at(i, t);
    total += instance.prices()[static_cast<std::size_t>(t)] * dh * column;
  }
  return total;
}

double fast_objective(const ChargingInstance& instance, const Schedule& schedule) {
  require_dims(instance, schedule);
  double total = 0.0;
  for (int t = 0; t < instance.num_slots(); ++t) {
    double column = 0.0;
    for (int i = 0; i < instance.num_evs(); ++i) column += schedule.at(i, t);
    total += instance.fast_weights()[static_cast<std::size_t>(t)] * column;
  }
  return -total;
}

double robust_penalty(const ChargingInstance& instance, const Schedule& schedule) {
  require_dims(instance, schedule);
  if (instance.rho() == 0.0) return 0.0;
  const double dh = instance.slot_hours();
  double total = 0.0;
  for (int i = 0; i < instance.num_evs(); ++i) {
    double sq = 0.0;
    for (double r : schedule.row(i)) sq += (dh * r) * (dh * r);
    total += std::sqrt(sq);
  }
  return instance.rho() * total;
}

double total_objective(const ChargingInstance& instance, const Schedule& schedule) {
  return nominal_cost(instance, schedule) +
         instance.alpha() * fast_objective(instance, schedule) +
         robust_penalty(instance, schedule);
}

BoundCheck worst_case_bound_check(const ChargingInstance& instance,
                                  const Schedule& schedule,
                                  std::span<const double> perturbation) {
  require_dims(instance, schedule);
  if (perturbation.size() != static_cast<std::size_t>(instance.num_slots())) {
    throw ArgumentError("perturbation length must equal num_slots");
  }
  double norm_sq = 0.0;
  for (double e : perturbation) norm_sq += e * e;
  const double rho = instance.rho();
  if (std::sqrt(norm_sq) > rho * (1.0 + 1e-12) + 1e-300) {
    throw ArgumentError("perturbation norm exceeds rho");
  }
  const double dh = instance.slot_hours();
  BoundCheck check;
  double realized = 0.0;
  for (int i = 0; i < instance.num_evs(); ++i) {
    for (int t = 0; t < instance.num_slots(); ++t) {
      const auto k = static_cast<std::size_t>(t);
      realized += (instance.prices()[k] + perturbation[k]) * dh * schedule.at(i, t);
    }
  }
  check.realized_cost = realized;
  check.bound = nominal_cost(instance, schedule) + robust_penalty(instance, schedule);
  check.holds = check.realized_cost <= check.bound + 1e-9;
  return check;
}

FeasibilityReport check_schedule(const ChargingInstance& instance,
                                 const Schedule& schedule, double eps) {
  require_dims(instance, schedule);
  FeasibilityReport report;
  const double dh = instance.slot_hours();
  for (const auto& s : instance.sessions()) {
    double delivered = 0.0;
    for (int t = 0; t < instance.num_slots(); ++t) {
      const double r = schedule.at(s.ev_index, t);
      if (!s.in_window(t)) {
        if (r != 0.0) ++report.window_nonzeros;
        continue;
      }
      const double violation = std::max(-r, r - s.rate_cap(t));
      report.max_box_violation = std::max(report.max_box_violation, violation);
      delivered += r * dh;
    }
    report.max_energy_error =
        std::max(report.max_energy_error, std::abs(delivered - s.demand_kwh));
  }
  for (int t = 0; t < instance.num_slots(); ++t) {
    double column = 0.0;
    for (int i = 0; i < instance.num_evs(); ++i) column += schedule.at(i, t);
    report.max_capacity_violation =
        std::max(report.max_capacity_violation,
                 column - instance.capacity()[static_cast<std::size_t>(t)]);
  }
  if (report.max_box_violation > eps) {
    report.problems.push_back("rate bounds violated by " + fmt(report.max_box_violation));
  }
  if (report.window_nonzeros > 0) {
    report.problems.push_back(std::to_string(report.window_nonzeros) +
                              " nonzero rates outside charging windows");
  }
  if (report.max_energy_error > eps) {
    report.problems.push_back("energy budget missed by " + fmt(report.max_energy_error));
  }
  if (report.max_capacity_violation > eps) {
    report.problems.push_back("station capacity exceeded by " +
                              fmt(report.max_capacity_violation));
  }
  report.ok = report.problems.empty();
  return report;
}

BuiltInstance build_instance(const InstanceParams& params, const Tariff& tariff,
                             const std::vector<Session>& sessions) {
  if (params.slot_minutes <= 0 || kMinutesPerDay % params.slot_minutes != 0) {
    throw ArgumentError("slot_minutes must be a positive divisor of 1440");
  }
  if (!(params.alpha >= 0.0)) throw ArgumentError("alpha must be nonnegative");
  if (!(params.rho >= 0.0)) throw ArgumentError("rho must be nonnegative");
  if (!(params.max_rate_kw > 0.0)) throw ArgumentError("max_rate_kw must be positive");
  SlotGrid grid;
  if (params.horizon_start) {
    grid.horizon_start = *params.horizon_start;
  } else {
    if (sessions.empty()) {
      throw ArgumentError("horizon_start is required when there are no sessions");
    }
    Timestamp earliest = sessions.front().arrival;
    for (const auto& s : sessions) earliest = std::min(earliest, s.arrival);
    grid.horizon_start = midnight_of(earliest);
  }
  grid.slot_minutes = params.slot_minutes;
  grid.num_slots =
      params.num_slots > 0 ? params.num_slots : kMinutesPerDay / params.slot_minutes;
  if (params.num_slots < 0) throw ArgumentError("num_slots must be nonnegative");

  std::vector<double> capacity;
  if (params.capacity_kw.size() == 1) {
    capacity.assign(static_cast<std::size_t>(grid.num_slots), params.capacity_kw[0]);
  } else if (params.capacity_kw.size() == static_cast<std::size_t>(grid.num_slots)) {
    capacity = params.capacity_kw;
  } else {
    throw ArgumentError("capacity_kw must be a scalar or have num_slots entries");
  }
  for (double c : capacity) {
    if (!(c > 0.0)) throw ArgumentError("capacity_kw entries must be positive");
  }

  auto prices = build_price_vector(tariff, grid.horizon_start, grid.slot_minutes,
                                   grid.num_slots);
  auto discretized = discretize(sessions, grid, params.max_rate_kw, params.policy);
  ChargingInstance instance(grid.horizon_start, grid.slot_minutes, grid.num_slots,
                            std::move(prices), params.alpha, params.rho,
                            std::move(capacity), std::move(discretized.sessions));
  return {std::move(instance), std::move(discretized.rejections), grid};
}

InstanceFile parse_instance_json(const std::string& text,
                                 const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  InstanceFile file;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
    return path.lexically_normal().string();
  };
  try {
    auto& params = file.params;
    if (doc.contains("num_slots")) params.num_slots = doc["num_slots"].get<int>();
    if (doc.contains("slot_minutes")) params.slot_minutes = doc["slot_minutes"].get<int>();
    if (doc.contains("horizon_start")) {
      const auto text_ts = doc["horizon_start"].get<std::string>();
      auto ts = parse_timestamp(text_ts);
      if (!ts) throw ParseError("instance JSON: malformed horizon_start '" + text_ts + "'");
      params.horizon_start = *ts;
    }
    if (doc.contains("alpha")) params.alpha = doc["alpha"].get<double>();
    if (doc.contains("rho")) params.rho = doc["rho"].get<double>();
    if (doc.contains("capacity_kw")) {
      const auto& cap = doc["capacity_kw"];
      params.capacity_kw = cap.is_array() ? cap.get<std::vector<double>>()
                                          : std::vector<double>{cap.get<double>()};
    }
    if (doc.contains("max_rate_kw")) params.max_rate_kw = doc["max_rate_kw"].get<double>();
    if (doc.contains("demand_policy")) {
      const auto policy = doc["demand_policy"].get<std::string>();
      if (policy == "reject") {
        params.policy = DemandPolicy::kReject;
      } else if (policy == "clamp") {
        params.policy = DemandPolicy::kClamp;
      } else {
        throw ParseError("instance JSON: demand_policy must be reject or clamp");
      }
    }
    if (doc.contains("tariff_file")) file.tariff_file = resolve(doc["tariff_file"].get<std::string>());
    file.sessions_file = resolve(doc.at("sessions_file").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  return file;
}

BuiltInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto file = parse_instance_json(
      buffer.str(), std::filesystem::path(path).parent_path().string());
  Tariff tariff = file.tariff_file.empty() ? Tariff::vietnam()
                                           : load_tariff_file(file.tariff_file);
  auto loaded = load_sessions_file(file.sessions_file);
  if (!loaded.issues.empty()) {
    const auto& first = loaded.issues.front();
    throw ValidationError("session file " + file.sessions_file + " row " +
                          std::to_string(first.row) + " (" + first.session_id +
                          "): " + first.detail);
  }
  return build_instance(file.params, tariff, loaded.sessions);
}

}  // namespace evcharge
