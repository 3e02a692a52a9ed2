// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace evcharge {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // avoid "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string schedule_to_csv(const ChargingInstance& instance, const Schedule& schedule) {
  std::ostringstream out;
  out << "ev_index,slot,kw\n";
  for (const auto& s : instance.sessions()) {
    for (int t = s.first_slot; t <= s.last_slot; ++t) {
      out << s.ev_index << ',' << t << ',' << format_number(schedule.at(s.ev_index, t))
          << '\n';
    }
  }
  return out.str();
}

std::string schedule_to_json(const ChargingInstance& instance, const Schedule& schedule) {
  nlohmann::ordered_json doc;
  doc["fingerprint"] = instance.fingerprint();
  doc["num_evs"] = instance.num_evs();
  doc["num_slots"] = instance.num_slots();
  doc["slot_minutes"] = instance.slot_minutes();
  doc["horizon_start"] = format_timestamp(instance.horizon_start());
  auto ids = nlohmann::ordered_json::array();
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < schedule.num_evs(); ++i) {
    ids.push_back(instance.session(i).session_id);
    rows.push_back(std::vector<double>(schedule.row(i).begin(), schedule.row(i).end()));
  }
  doc["session_ids"] = ids;
  doc["rates_kw"] = rows;
  return doc.dump() + "\n";
}

Schedule schedule_from_json(const ChargingInstance& instance, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schedule JSON: ") + e.what());
  }
  try {
    if (doc.at("fingerprint").get<std::string>() != instance.fingerprint()) {
      throw ValidationError("schedule fingerprint does not match the instance");
    }
    Schedule schedule(instance.num_evs(), instance.num_slots(), instance.fingerprint());
    const auto& rows = doc.at("rates_kw");
    if (rows.size() != static_cast<std::size_t>(instance.num_evs())) {
      throw ValidationError("schedule row count does not match the instance");
    }
    for (int i = 0; i < instance.num_evs(); ++i) {
      auto row = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (row.size() != static_cast<std::size_t>(instance.num_slots())) {
        throw ValidationError("schedule row length does not match the instance");
      }
      std::copy(row.begin(), row.end(), schedule.row(i).begin());
    }
    return schedule;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schedule JSON: ") + e.what());
  }
}

std::string report_to_json(const SolveReport& report) {
  nlohmann::ordered_json doc;
  doc["status"] = to_string(report.status);
  doc["iterations"] = report.iterations;
  doc["objective"] = report.objective;
  doc["nominal_cost"] = report.nominal_cost;
  doc["fast_term"] = report.fast_term;
  doc["penalty_term"] = report.penalty_term;
  doc["primal_residual"] = report.primal_residual;
  doc["dual_residual"] = report.dual_residual;
  doc["final_step_size"] = report.final_step_size;
  doc["detail"] = report.detail;
  return doc.dump(2) + "\n";
}

std::string metrics_csv_header() {
  return "alpha,rho,status,total_cost,total_charging_time_hours,objective,"
         "active_threshold_kw,peak_power_kw\n";
}

std::string metrics_csv_row(const ChargingInstance& instance,
                            const ScheduleMetrics& metrics, const SolveReport& report) {
  double peak = 0.0;
  for (double p : metrics.per_slot_power_kw) peak = std::max(peak, p);
  std::ostringstream out;
  out << format_number(instance.alpha()) << ',' << format_number(instance.rho()) << ','
      << to_string(report.status) << ',' << format_number(metrics.total_cost) << ','
      << format_number(metrics.total_charging_time_hours) << ','
      << format_number(report.objective) << ','
      << format_number(metrics.active_threshold_kw) << ',' << format_number(peak) << '\n';
  return out.str();
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "alpha,cost,time,objective,status\n";
  for (std::size_t k = 0; k < sweep.alphas.size(); ++k) {
    out << format_number(sweep.alphas[k]) << ',' << format_number(sweep.costs[k]) << ','
        << format_number(sweep.charging_times[k]) << ','
        << format_number(sweep.objectives[k]) << ',' << to_string(sweep.statuses[k])
        << '\n';
  }
  return out.str();
}

std::string tradeoff_to_csv(const std::vector<TradeoffPoint>& points) {
  std::ostringstream out;
  out << "alpha,cost,time,pareto,duplicate\n";
  for (const auto& p : points) {
    out << format_number(p.alpha) << ',' << format_number(p.cost) << ','
        << format_number(p.time) << ',' << (p.pareto ? 1 : 0) << ','
        << (p.duplicate ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string profile_to_csv(const std::vector<double>& profile) {
  std::ostringstream out;
  out << "slot,kw\n";
  for (std::size_t t = 0; t < profile.size(); ++t) {
    out << t << ',' << format_number(profile[t]) << '\n';
  }
  return out.str();
}

std::string montecarlo_to_json(const MonteCarloReport& report) {
  nlohmann::ordered_json doc;
  doc["samples"] = report.samples;
  doc["violations"] = report.violations;
  doc["max_gap"] = report.max_gap;
  doc["tightness"] = report.tightness;
  doc["rho"] = report.rho;
  doc["seed"] = report.seed;
  doc["directed"] = report.directed;
  return doc.dump(2) + "\n";
}

std::string profile_stem(double alpha) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "profile_%g", alpha);
  return buf;
}

void write_sweep_outputs(const std::string& dir, const SweepResult& sweep) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  write_text_file((root / "sweep.csv").string(), sweep_to_csv(sweep));

  PlotSeries cost{"total cost (thousand VND)", {}, {}};
  PlotSeries time{"charging time (h)", {}, {}};
  for (std::size_t k = 0; k < sweep.alphas.size(); ++k) {
    if (sweep.statuses[k] != SolveStatus::kConverged) continue;
    cost.x.push_back(sweep.alphas[k]);
    cost.y.push_back(sweep.costs[k]);
    time.x.push_back(sweep.alphas[k]);
    time.y.push_back(sweep.charging_times[k]);
  }
  write_text_file((root / "sweep.svg").string(),
                  render_svg("Cost and charging time vs alpha", "alpha", "value",
                             {cost, time}));

  const auto points = tradeoff_curve(sweep);
  write_text_file((root / "tradeoff.csv").string(), tradeoff_to_csv(points));
  PlotSeries front{"pareto", {}, {}};
  PlotSeries other{"dominated", {}, {}};
  for (const auto& p : points) {
    auto& target = p.pareto ? front : other;
    target.x.push_back(p.cost);
    target.y.push_back(p.time);
  }
  write_text_file((root / "tradeoff.svg").string(),
                  render_svg("Trade-off: cost vs charging time",
                             "total cost (thousand VND)", "charging time (h)",
                             {front, other}, true));

  for (const auto& entry : sweep.entries) {
    if (entry.report.status != SolveStatus::kConverged) continue;
    const std::string stem = profile_stem(entry.alpha);
    const auto& profile = entry.metrics.per_slot_power_kw;
    write_text_file((root / (stem + ".csv")).string(), profile_to_csv(profile));
    PlotSeries series{"total power (kW)", {}, profile};
    for (std::size_t t = 0; t < profile.size(); ++t) series.x.push_back(static_cast<double>(t));
    write_text_file((root / (stem + ".svg")).string(),
                    render_svg("Aggregate power, alpha = " + format_number(entry.alpha),
                               "slot", "kW", {series}));
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<PlotSeries>& series,
                       bool scatter) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!any) {
        x_min = x_max = s.x[k];
        y_min = y_max = s.y[k];
        any = true;
      }
      x_min = std::min(x_min, s.x[k]);
      x_max = std::max(x_max, s.x[k]);
      y_min = std::min(y_min, s.y[k]);
      y_max = std::max(y_max, s.y[k]);
    }
  }
  if (x_max == x_min) { x_min -= 0.5; x_max += 0.5; }
  if (y_max == y_min) { y_min -= 0.5; y_max += 0.5; }
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << px(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";
  out << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(plot_w)
      << "\" height=\"" << px(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x_min + (x_max - x_min) * k / 4.0;
    const double fy = y_min + (y_max - y_min) * k / 4.0;
    out << "<text x=\"" << px(sx(fx)) << "\" y=\"" << px(kTop + plot_h + 16)
        << "\" text-anchor=\"middle\">" << format_number(std::round(fx * 1000) / 1000)
        << "</text>\n";
    out << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(sy(fy) + 4)
        << "\" text-anchor=\"end\">" << format_number(std::round(fy * 1000) / 1000)
        << "</text>\n";
  }
  out << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(kHeight - 10)
      << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << px(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << px(kTop + plot_h / 2)
      << ")\">" << xml_escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
    const auto& data = series[s];
    const std::size_t count = std::min(data.x.size(), data.y.size());
    if (!scatter && count > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t k = 0; k < count; ++k) {
        out << (k ? " " : "") << px(sx(data.x[k])) << ',' << px(sy(data.y[k]));
      }
      out << "\"/>\n";
    }
    for (std::size_t k = 0; k < count; ++k) {
      out << "<circle cx=\"" << px(sx(data.x[k])) << "\" cy=\"" << px(sy(data.y[k]))
          << "\" r=\"" << (scatter ? 4 : 2.5) << "\" fill=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << px(kLeft + 8) << "\" y=\"" << px(kTop + 16 + 14.0 * s)
        << "\" fill=\"" << color << "\">" << xml_escape(data.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace evcharge
