// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evcharge/evcharge.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "digest.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "sessions.hpp"
#include "solver.hpp"
#include "tariff.hpp"

struct evc_tariff {
  evcharge::Tariff tariff;
};

struct evc_sessions {
  evcharge::LoadResult loaded;
};

struct evc_instance {
  evcharge::BuiltInstance built;
};

struct evc_solution {
  evcharge::SolveResult result;
};

struct evc_sweep {
  evcharge::SweepResult sweep;
};

namespace {

thread_local std::string g_last_error;

evc_status fail(evc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body and converts any exception into a status code.
template <typename F>
evc_status guarded(F&& body) {
  try {
    return body();
  } catch (const evcharge::ParseError& e) {
    return fail(EVC_ERR_PARSE, e.what());
  } catch (const evcharge::ValidationError& e) {
    return fail(EVC_ERR_VALIDATION, e.what());
  } catch (const evcharge::ArgumentError& e) {
    return fail(EVC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const evcharge::IoError& e) {
    return fail(EVC_ERR_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(EVC_ERR_PARSE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(EVC_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EVC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EVC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EVC_ERR_INTERNAL, "unknown exception");
  }
}

evc_status copy_out(const std::string& text, char* buf, size_t cap,
                    size_t* needed) {
  const size_t size = text.size() + 1;
  if (needed) *needed = size;
  if (!buf || cap < size) {
    return fail(EVC_ERR_BUFFER_TOO_SMALL,
                "buffer needs " + std::to_string(size) + " bytes");
  }
  std::memcpy(buf, text.c_str(), size);
  return EVC_OK;
}

#define EVC_REQUIRE(cond, what)                                   \
  do {                                                            \
    if (!(cond)) return fail(EVC_ERR_INVALID_ARGUMENT, (what));   \
  } while (0)

evc_solve_status to_c(evcharge::SolveStatus s) {
  switch (s) {
    case evcharge::SolveStatus::kConverged: return EVC_SOLVE_CONVERGED;
    case evcharge::SolveStatus::kIterLimit: return EVC_SOLVE_ITER_LIMIT;
    case evcharge::SolveStatus::kInfeasible: return EVC_SOLVE_INFEASIBLE;
  }
  return EVC_SOLVE_ITER_LIMIT;
}

evcharge::SolverConfig to_core(const evc_solver_config* c) {
  evcharge::SolverConfig config;
  if (c) {
    config.step_size = c->step_size;
    config.max_iters = c->max_iters;
    config.tol_primal = c->tol_primal;
    config.tol_dual = c->tol_dual;
    config.over_relaxation = c->over_relaxation;
    config.adaptive_step = c->adaptive_step != 0;
  }
  config.validate();
  return config;
}

evcharge::SyntheticConfig synthetic_config(const char* json_text) {
  return json_text ? evcharge::parse_synthetic_config(json_text)
                   : evcharge::SyntheticConfig::defaults();
}

}  // namespace

extern "C" {

const char* evc_version(void) { return EVC_VERSION_STRING; }

const char* evc_last_error(void) { return g_last_error.c_str(); }

const char* evc_status_name(evc_status status) {
  switch (status) {
    case EVC_OK: return "ok";
    case EVC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case EVC_ERR_PARSE: return "parse_error";
    case EVC_ERR_VALIDATION: return "validation_error";
    case EVC_ERR_IO: return "io_error";
    case EVC_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case EVC_ERR_TOO_LARGE: return "too_large";
    case EVC_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

// ---- tariff

evc_status evc_tariff_load(const char* path, evc_tariff** out) {
  EVC_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new evc_tariff{evcharge::load_tariff_file(path)};
    return EVC_OK;
  });
}

evc_status evc_tariff_parse(const char* json_text, evc_tariff** out) {
  EVC_REQUIRE(json_text && out, "null argument");
  return guarded([&] {
    *out = new evc_tariff{evcharge::parse_tariff_json(json_text)};
    return EVC_OK;
  });
}

evc_status evc_tariff_vietnam(evc_tariff** out) {
  EVC_REQUIRE(out, "null argument");
  return guarded([&] {
    *out = new evc_tariff{evcharge::Tariff::vietnam()};
    return EVC_OK;
  });
}

evc_status evc_tariff_price_at(const evc_tariff* tariff, int minute,
                               double* price) {
  EVC_REQUIRE(tariff && price, "null argument");
  return guarded([&] {
    *price = tariff->tariff.price_at(minute);
    return EVC_OK;
  });
}

evc_status evc_tariff_price_vector(const evc_tariff* tariff,
                                   const char* horizon_start, int slot_minutes,
                                   int num_slots, double* out) {
  EVC_REQUIRE(tariff && horizon_start && out, "null argument");
  return guarded([&] {
    auto start = evcharge::parse_timestamp(horizon_start);
    if (!start) {
      throw evcharge::ParseError(std::string("bad timestamp: ") + horizon_start);
    }
    auto prices = evcharge::build_price_vector(tariff->tariff, *start,
                                               slot_minutes, num_slots);
    std::copy(prices.begin(), prices.end(), out);
    return EVC_OK;
  });
}

evc_status evc_tariff_to_json(const evc_tariff* tariff, char* buf, size_t cap,
                              size_t* needed) {
  EVC_REQUIRE(tariff, "null argument");
  return guarded(
      [&] { return copy_out(evcharge::tariff_to_json(tariff->tariff), buf, cap, needed); });
}

void evc_tariff_free(evc_tariff* tariff) { delete tariff; }

// ---- sessions

evc_status evc_sessions_load(const char* path, evc_sessions** out) {
  EVC_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new evc_sessions{evcharge::load_sessions_file(path)};
    return EVC_OK;
  });
}

evc_status evc_sessions_parse(const char* csv_text, evc_sessions** out) {
  EVC_REQUIRE(csv_text && out, "null argument");
  return guarded([&] {
    std::istringstream in(csv_text);
    *out = new evc_sessions{evcharge::load_sessions(in)};
    return EVC_OK;
  });
}

evc_status evc_sessions_generate(uint64_t seed, size_t n, const char* config_json,
                                 evc_sessions** out) {
  EVC_REQUIRE(out, "null argument");
  return guarded([&] {
    auto config = synthetic_config(config_json);
    auto handle = std::make_unique<evc_sessions>();
    handle->loaded.sessions = evcharge::generate_synthetic(seed, n, config);
    *out = handle.release();
    return EVC_OK;
  });
}

evc_status evc_sessions_generator_metadata(uint64_t seed, size_t n,
                                           const char* config_json, char* buf,
                                           size_t cap, size_t* needed) {
  return guarded([&] {
    auto config = synthetic_config(config_json);
    return copy_out(evcharge::synthetic_metadata_json(config, seed, n), buf, cap,
                    needed);
  });
}

size_t evc_sessions_count(const evc_sessions* sessions) {
  return sessions ? sessions->loaded.sessions.size() : 0;
}

size_t evc_sessions_issue_count(const evc_sessions* sessions) {
  return sessions ? sessions->loaded.issues.size() : 0;
}

evc_status evc_sessions_issues_jsonl(const evc_sessions* sessions, char* buf,
                                     size_t cap, size_t* needed) {
  EVC_REQUIRE(sessions, "null argument");
  return guarded([&] {
    std::string text;
    for (const auto& issue : sessions->loaded.issues) {
      nlohmann::ordered_json line;
      line["row"] = issue.row;
      line["session_id"] = issue.session_id;
      line["reason"] = issue.reason;
      line["detail"] = issue.detail;
      text += line.dump() + "\n";
    }
    return copy_out(text, buf, cap, needed);
  });
}

evc_status evc_sessions_write_csv(const evc_sessions* sessions, const char* path) {
  EVC_REQUIRE(sessions && path, "null argument");
  return guarded([&] {
    std::ostringstream out;
    evcharge::write_sessions_csv(out, sessions->loaded.sessions);
    evcharge::write_text_file(path, out.str());
    return EVC_OK;
  });
}

void evc_sessions_free(evc_sessions* sessions) { delete sessions; }

// ---- instance

void evc_instance_params_default(evc_instance_params* params) {
  if (!params) return;
  const evcharge::InstanceParams d;
  params->horizon_start = nullptr;
  params->slot_minutes = d.slot_minutes;
  params->num_slots = d.num_slots;
  params->alpha = d.alpha;
  params->rho = d.rho;
  params->capacity_kw = d.capacity_kw.front();
  params->capacity_profile = nullptr;
  params->capacity_len = 0;
  params->max_rate_kw = d.max_rate_kw;
  params->policy = EVC_POLICY_CLAMP;
}

evc_status evc_instance_build(const evc_instance_params* params,
                              const evc_tariff* tariff,
                              const evc_sessions* sessions, evc_instance** out) {
  EVC_REQUIRE(params && tariff && sessions && out, "null argument");
  return guarded([&] {
    if (!sessions->loaded.issues.empty()) {
      const auto& first = sessions->loaded.issues.front();
      throw evcharge::ValidationError("row " + std::to_string(first.row) + " (" +
                                      first.session_id + "): " + first.detail);
    }
    evcharge::InstanceParams p;
    if (params->horizon_start) {
      auto start = evcharge::parse_timestamp(params->horizon_start);
      if (!start) {
        throw evcharge::ParseError(std::string("bad horizon_start: ") +
                                   params->horizon_start);
      }
      p.horizon_start = *start;
    }
    p.slot_minutes = params->slot_minutes;
    p.num_slots = params->num_slots;
    p.alpha = params->alpha;
    p.rho = params->rho;
    if (params->capacity_profile) {
      p.capacity_kw.assign(params->capacity_profile,
                           params->capacity_profile + params->capacity_len);
    } else {
      p.capacity_kw = {params->capacity_kw};
    }
    p.max_rate_kw = params->max_rate_kw;
    p.policy = params->policy == EVC_POLICY_REJECT ? evcharge::DemandPolicy::kReject
                                                   : evcharge::DemandPolicy::kClamp;
    *out = new evc_instance{
        evcharge::build_instance(p, tariff->tariff, sessions->loaded.sessions)};
    return EVC_OK;
  });
}

evc_status evc_instance_load(const char* path, evc_instance** out) {
  EVC_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new evc_instance{evcharge::load_instance_file(path)};
    return EVC_OK;
  });
}

size_t evc_instance_num_evs(const evc_instance* instance) {
  return instance ? static_cast<size_t>(instance->built.instance.num_evs()) : 0;
}

size_t evc_instance_num_slots(const evc_instance* instance) {
  return instance ? static_cast<size_t>(instance->built.instance.num_slots()) : 0;
}

double evc_instance_slot_hours(const evc_instance* instance) {
  return instance ? instance->built.instance.slot_hours() : 0.0;
}

size_t evc_instance_rejection_count(const evc_instance* instance) {
  return instance ? instance->built.rejections.size() : 0;
}

evc_status evc_instance_rejections_jsonl(const evc_instance* instance, char* buf,
                                         size_t cap, size_t* needed) {
  EVC_REQUIRE(instance, "null argument");
  return guarded([&] {
    std::ostringstream out;
    evcharge::write_rejections_jsonl(out, instance->built.rejections);
    return copy_out(out.str(), buf, cap, needed);
  });
}

evc_status evc_instance_fingerprint(const evc_instance* instance, char* buf,
                                    size_t cap, size_t* needed) {
  EVC_REQUIRE(instance, "null argument");
  return copy_out(instance->built.instance.fingerprint(), buf, cap, needed);
}

evc_status evc_instance_prices(const evc_instance* instance, double* out,
                               size_t len) {
  EVC_REQUIRE(instance && out, "null argument");
  const auto& prices = instance->built.instance.prices();
  EVC_REQUIRE(len >= prices.size(), "output array too short");
  std::copy(prices.begin(), prices.end(), out);
  return EVC_OK;
}

evc_status evc_instance_infeasibility(const evc_instance* instance, int* found,
                                      char* buf, size_t cap, size_t* needed) {
  EVC_REQUIRE(instance && found, "null argument");
  return guarded([&] {
    auto certificate = evcharge::infeasibility_certificate(instance->built.instance);
    *found = certificate ? 1 : 0;
    if (!certificate) {
      if (needed) *needed = 1;
      if (buf && cap > 0) buf[0] = '\0';
      return EVC_OK;
    }
    return copy_out(*certificate, buf, cap, needed);
  });
}

void evc_instance_free(evc_instance* instance) { delete instance; }

// ---- solver

void evc_solver_config_default(evc_solver_config* config) {
  if (!config) return;
  const evcharge::SolverConfig d;
  config->step_size = d.step_size;
  config->max_iters = d.max_iters;
  config->tol_primal = d.tol_primal;
  config->tol_dual = d.tol_dual;
  config->over_relaxation = d.over_relaxation;
  config->adaptive_step = d.adaptive_step ? 1 : 0;
}

evc_status evc_solver_config_parse(const char* json_text, evc_solver_config* config) {
  EVC_REQUIRE(json_text && config, "null argument");
  return guarded([&] {
    auto doc = nlohmann::json::parse(json_text);
    if (!doc.is_object()) throw evcharge::ParseError("solver config must be an object");
    evc_solver_config c = *config;
    for (const auto& [key, value] : doc.items()) {
      if (key == "step_size") c.step_size = value.get<double>();
      else if (key == "max_iters") c.max_iters = value.get<int>();
      else if (key == "tol_primal") c.tol_primal = value.get<double>();
      else if (key == "tol_dual") c.tol_dual = value.get<double>();
      else if (key == "over_relaxation") c.over_relaxation = value.get<double>();
      else if (key == "adaptive_step") c.adaptive_step = value.get<bool>() ? 1 : 0;
      else throw evcharge::ParseError("unknown solver config key: " + key);
    }
    to_core(&c);  // range check
    *config = c;
    return EVC_OK;
  });
}

evc_status evc_solve(const evc_instance* instance, const evc_solver_config* config,
                     evc_solution** out) {
  EVC_REQUIRE(instance && out, "null argument");
  return guarded([&] {
    auto core_config = to_core(config);
    *out = new evc_solution{evcharge::solve(instance->built.instance, core_config)};
    return EVC_OK;
  });
}

evc_status evc_solution_report(const evc_solution* solution, evc_solve_report* report) {
  EVC_REQUIRE(solution && report, "null argument");
  const auto& r = solution->result.report;
  report->status = to_c(r.status);
  report->iterations = r.iterations;
  report->objective = r.objective;
  report->nominal_cost = r.nominal_cost;
  report->fast_term = r.fast_term;
  report->penalty_term = r.penalty_term;
  report->primal_residual = r.primal_residual;
  report->dual_residual = r.dual_residual;
  return EVC_OK;
}

evc_status evc_solution_rates(const evc_solution* solution, double* out, size_t len) {
  EVC_REQUIRE(solution && out, "null argument");
  const auto& rates = solution->result.schedule.rates();
  EVC_REQUIRE(len >= rates.size(), "output array too short");
  std::copy(rates.begin(), rates.end(), out);
  return EVC_OK;
}

evc_status evc_solution_write(const evc_instance* instance,
                              const evc_solution* solution, const char* dir) {
  EVC_REQUIRE(instance && solution && dir, "null argument");
  return guarded([&] {
    namespace fs = std::filesystem;
    const auto& inst = instance->built.instance;
    const auto& schedule = solution->result.schedule;
    const auto& report = solution->result.report;
    fs::create_directories(dir);
    const fs::path root(dir);
    evcharge::write_text_file((root / "schedule.csv").string(),
                              evcharge::schedule_to_csv(inst, schedule));
    evcharge::write_text_file((root / "schedule.json").string(),
                              evcharge::schedule_to_json(inst, schedule));
    evcharge::write_text_file((root / "report.json").string(),
                              evcharge::report_to_json(report));
    auto metrics = evcharge::summarize(inst, schedule);
    evcharge::write_text_file(
        (root / "metrics.csv").string(),
        evcharge::metrics_csv_header() + evcharge::metrics_csv_row(inst, metrics, report));
    return EVC_OK;
  });
}

evc_status evc_solution_check(const evc_instance* instance,
                              const evc_solution* solution, double eps, int* ok) {
  EVC_REQUIRE(instance && solution && ok, "null argument");
  return guarded([&] {
    auto report = evcharge::check_schedule(instance->built.instance,
                                           solution->result.schedule, eps);
    *ok = report.ok ? 1 : 0;
    if (!report.ok && !report.problems.empty()) g_last_error = report.problems.front();
    return EVC_OK;
  });
}

void evc_solution_free(evc_solution* solution) { delete solution; }

evc_status evc_oracle_solve(const evc_instance* instance, int grid_points,
                            double* objective, double* rates, size_t len) {
  EVC_REQUIRE(instance && objective, "null argument");
  const auto& inst = instance->built.instance;
  if (inst.num_evs() > evcharge::kOracleMaxEvs ||
      inst.num_slots() > evcharge::kOracleMaxSlots) {
    return fail(EVC_ERR_TOO_LARGE, "oracle handles at most 3 EVs and 4 slots");
  }
  return guarded([&] {
    auto result = evcharge::oracle_solve(inst, grid_points);
    *objective = result.objective;
    if (rates) {
      const auto& r = result.schedule.rates();
      if (len < r.size()) return fail(EVC_ERR_INVALID_ARGUMENT, "output array too short");
      std::copy(r.begin(), r.end(), rates);
    }
    return EVC_OK;
  });
}

// ---- metrics

evc_status evc_solution_metrics(const evc_instance* instance,
                                const evc_solution* solution, double eps_active,
                                evc_metrics* out, double* profile, size_t len) {
  EVC_REQUIRE(instance && solution && out, "null argument");
  return guarded([&] {
    auto m = evcharge::summarize(instance->built.instance, solution->result.schedule,
                                 eps_active);
    out->total_cost = m.total_cost;
    out->total_charging_time_hours = m.total_charging_time_hours;
    out->active_threshold_kw = m.active_threshold_kw;
    if (profile) {
      if (len < m.per_slot_power_kw.size()) {
        return fail(EVC_ERR_INVALID_ARGUMENT, "output array too short");
      }
      std::copy(m.per_slot_power_kw.begin(), m.per_slot_power_kw.end(), profile);
    }
    return EVC_OK;
  });
}

// ---- experiments

evc_status evc_sweep_alpha(const evc_instance* instance, const double* alphas,
                           size_t count, const evc_solver_config* config,
                           evc_sweep** out) {
  EVC_REQUIRE(instance && out, "null argument");
  EVC_REQUIRE(alphas || count == 0, "null alphas");
  return guarded([&] {
    std::vector<double> grid = count == 0 ? evcharge::kDefaultAlphaGrid
                                          : std::vector<double>(alphas, alphas + count);
    for (double a : grid) {
      if (!(a >= 0.0)) throw evcharge::ArgumentError("alpha must be nonnegative");
    }
    auto core_config = to_core(config);
    *out = new evc_sweep{
        evcharge::sweep_alpha(instance->built.instance, grid, core_config)};
    return EVC_OK;
  });
}

size_t evc_sweep_size(const evc_sweep* sweep) {
  return sweep ? sweep->sweep.alphas.size() : 0;
}

evc_status evc_sweep_row_at(const evc_sweep* sweep, size_t index, evc_sweep_row* row) {
  EVC_REQUIRE(sweep && row, "null argument");
  const auto& s = sweep->sweep;
  EVC_REQUIRE(index < s.alphas.size(), "sweep index out of range");
  row->alpha = s.alphas[index];
  row->cost = s.costs[index];
  row->charging_time_hours = s.charging_times[index];
  row->objective = s.objectives[index];
  row->fast_term = s.entries[index].report.fast_term;
  row->penalty_term = s.entries[index].report.penalty_term;
  row->status = to_c(s.statuses[index]);
  return EVC_OK;
}

evc_status evc_sweep_write(const evc_sweep* sweep, const char* dir) {
  EVC_REQUIRE(sweep && dir, "null argument");
  return guarded([&] {
    evcharge::write_sweep_outputs(dir, sweep->sweep);
    return EVC_OK;
  });
}

void evc_sweep_free(evc_sweep* sweep) { delete sweep; }

evc_status evc_monte_carlo(const evc_instance* instance, const evc_solution* solution,
                           size_t samples, uint64_t seed, int directed,
                           evc_montecarlo_report* report, const char* path) {
  EVC_REQUIRE(instance && solution && report, "null argument");
  return guarded([&] {
    auto r = evcharge::monte_carlo_bound(instance->built.instance,
                                         solution->result.schedule, samples, seed,
                                         directed != 0);
    report->samples = r.samples;
    report->violations = r.violations;
    report->max_gap = r.max_gap;
    report->tightness = r.tightness;
    if (path) {
      auto parent = std::filesystem::path(path).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      evcharge::write_text_file(path, evcharge::montecarlo_to_json(r));
    }
    return EVC_OK;
  });
}

// ---- utilities

evc_status evc_digest_file(const char* path, char* buf, size_t cap, size_t* needed) {
  EVC_REQUIRE(path, "null argument");
  return guarded([&] { return copy_out(evcharge::sha256_file(path), buf, cap, needed); });
}

}  // extern "C"
