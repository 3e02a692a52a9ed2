// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_IO_HPP_
#define EVCHARGE_CORE_IO_HPP_

#include <string>
#include <vector>

#include "harness.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace evcharge {

// %.12g, so files are stable byte for byte on one platform.
std::string format_number(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// `ev_index,slot,kw`, one line per in-window entry.
std::string schedule_to_csv(const ChargingInstance& instance, const Schedule& schedule);
// Compact JSON carrying the instance fingerprint and the dense rate matrix.
std::string schedule_to_json(const ChargingInstance& instance, const Schedule& schedule);
// Inverse of schedule_to_json; rejects a fingerprint that differs from the
// instance's.
Schedule schedule_from_json(const ChargingInstance& instance, const std::string& text);

std::string report_to_json(const SolveReport& report);

std::string metrics_csv_header();
std::string metrics_csv_row(const ChargingInstance& instance,
                            const ScheduleMetrics& metrics, const SolveReport& report);

std::string sweep_to_csv(const SweepResult& sweep);
std::string tradeoff_to_csv(const std::vector<TradeoffPoint>& points);
std::string profile_to_csv(const std::vector<double>& profile);
std::string montecarlo_to_json(const MonteCarloReport& report);

// File stem for an alpha value, e.g. "profile_0.25".
std::string profile_stem(double alpha);

// Writes sweep.csv, tradeoff.csv and profile_<alpha>.csv for every converged
// entry, each with an SVG plot alongside.
void write_sweep_outputs(const std::string& dir, const SweepResult& sweep);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal self-contained SVG chart; scatter draws markers only.
std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<PlotSeries>& series,
                       bool scatter = false);

}  // namespace evcharge

#endif  // EVCHARGE_CORE_IO_HPP_
