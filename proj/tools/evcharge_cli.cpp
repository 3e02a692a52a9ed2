// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0
//
// evcharge command-line tool. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 domain failure (validation, infeasible),
// 2 usage / parse / I/O error, 3 solver stopped at its iteration limit.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evcharge/evcharge.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIterLimit = 3;

const char* const kDefaultTariff = EVCHARGE_DATA_DIR "/vietnam_tou.json";
const char* const kDefaultSessions = EVCHARGE_DATA_DIR "/sample_sessions.csv";

// Raised inside a command to stop with a given exit code.
struct Exit {
  int code;
};

int exit_code_for(evc_status s) {
  switch (s) {
    case EVC_OK: return kExitOk;
    case EVC_ERR_VALIDATION: return kExitDomain;
    default: return kExitUsage;
  }
}

void check(evc_status s, const std::string& what) {
  if (s == EVC_OK) return;
  std::cerr << "evcharge: " << what << ": " << evc_last_error() << "\n";
  throw Exit{exit_code_for(s)};
}

template <typename F>
std::string fetch_text(F&& call, const std::string& what) {
  size_t needed = 0;
  evc_status s = call(nullptr, 0, &needed);
  if (s != EVC_OK && s != EVC_ERR_BUFFER_TOO_SMALL) check(s, what);
  std::string text(needed, '\0');
  check(call(text.data(), text.size(), &needed), what);
  text.resize(needed > 0 ? needed - 1 : 0);
  return text;
}

// RAII wrappers for the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Tariff = Handle<evc_tariff, evc_tariff_free>;
using Sessions = Handle<evc_sessions, evc_sessions_free>;
using Instance = Handle<evc_instance, evc_instance_free>;
using Solution = Handle<evc_solution, evc_solution_free>;
using Sweep = Handle<evc_sweep, evc_sweep_free>;

std::string digest(const std::string& path) {
  return fetch_text(
      [&](char* b, size_t c, size_t* n) { return evc_digest_file(path.c_str(), b, c, n); },
      "digest " + path);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "evcharge: cannot write " << path.string() << "\n";
    throw Exit{kExitUsage};
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "evcharge: cannot open " << path << "\n";
    throw Exit{kExitUsage};
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string absolute(const std::string& path) {
  return fs::absolute(fs::path(path)).lexically_normal().string();
}

// Everything that determines a run. Serialized into the manifest and read
// back by `replay`.
struct RunConfig {
  std::string command;
  std::string tariff = kDefaultTariff;
  std::string sessions = kDefaultSessions;
  std::string horizon_start;  // empty: midnight of the earliest arrival
  int slot_minutes = 60;
  int num_slots = 0;
  double alpha = 1.0;
  double rho = 5.0;
  double capacity_kw = 300.0;
  double max_rate_kw = 7.0;
  std::string policy = "clamp";
  evc_solver_config solver{};
  std::vector<double> alphas;
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  bool directed = false;
  std::size_t n = 30;
  std::string generator_config;
  std::string name = "sessions";

  RunConfig() { evc_solver_config_default(&solver); }
};

json solver_json(const evc_solver_config& s) {
  json j;
  j["step_size"] = s.step_size;
  j["max_iters"] = s.max_iters;
  j["tol_primal"] = s.tol_primal;
  j["tol_dual"] = s.tol_dual;
  j["over_relaxation"] = s.over_relaxation;
  j["adaptive_step"] = s.adaptive_step != 0;
  return j;
}

bool uses_instance(const std::string& command) { return command != "gen"; }

json config_json(const RunConfig& c) {
  json j;
  if (uses_instance(c.command)) {
    j["tariff"] = c.tariff;
    j["sessions"] = c.sessions;
    j["horizon_start"] = c.horizon_start.empty() ? json(nullptr) : json(c.horizon_start);
    j["slot_minutes"] = c.slot_minutes;
    j["num_slots"] = c.num_slots;
    j["alpha"] = c.alpha;
    j["rho"] = c.rho;
    j["capacity_kw"] = c.capacity_kw;
    j["max_rate_kw"] = c.max_rate_kw;
    j["demand_policy"] = c.policy;
    j["solver"] = solver_json(c.solver);
  }
  if (c.command == "sweep") j["alphas"] = c.alphas;
  if (c.command == "montecarlo") {
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["directed"] = c.directed;
  }
  if (c.command == "gen") {
    j["n"] = c.n;
    j["seed"] = c.seed;
    j["generator_config"] =
        c.generator_config.empty() ? json(nullptr) : json(c.generator_config);
    j["name"] = c.name;
  }
  return j;
}

RunConfig config_from_json(const std::string& command, const json& j) {
  RunConfig c;
  c.command = command;
  if (uses_instance(command)) {
    c.tariff = j.at("tariff").get<std::string>();
    c.sessions = j.at("sessions").get<std::string>();
    const auto& hs = j.at("horizon_start");
    c.horizon_start = hs.is_null() ? std::string() : hs.get<std::string>();
    c.slot_minutes = j.at("slot_minutes").get<int>();
    c.num_slots = j.at("num_slots").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.rho = j.at("rho").get<double>();
    c.capacity_kw = j.at("capacity_kw").get<double>();
    c.max_rate_kw = j.at("max_rate_kw").get<double>();
    c.policy = j.at("demand_policy").get<std::string>();
    check(evc_solver_config_parse(j.at("solver").dump().c_str(), &c.solver),
          "manifest solver config");
  }
  if (command == "sweep") c.alphas = j.at("alphas").get<std::vector<double>>();
  if (command == "montecarlo") {
    c.samples = j.at("samples").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.directed = j.at("directed").get<bool>();
  }
  if (command == "gen") {
    c.n = j.at("n").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& g = j.at("generator_config");
    c.generator_config = g.is_null() ? std::string() : g.get<std::string>();
    c.name = j.at("name").get<std::string>();
  }
  return c;
}

std::vector<std::string> input_files(const RunConfig& c) {
  std::vector<std::string> files;
  if (uses_instance(c.command)) {
    files.push_back(c.tariff);
    files.push_back(c.sessions);
  } else if (!c.generator_config.empty()) {
    files.push_back(c.generator_config);
  }
  return files;
}

void write_manifest(const fs::path& dir, const RunConfig& c,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = c.command;
  m["tool_version"] = evc_version();
  m["resolved_config"] = config_json(c);
  json digests = json::object();
  for (const auto& f : input_files(c)) digests[f] = digest(f);
  m["input_digests"] = digests;
  m["outputs"] = outputs;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

void load_instance(const RunConfig& c, Instance& instance) {
  Tariff tariff;
  check(evc_tariff_load(c.tariff.c_str(), tariff.out()), "tariff");
  Sessions sessions;
  check(evc_sessions_load(c.sessions.c_str(), sessions.out()), "sessions");
  if (evc_sessions_issue_count(sessions.get()) > 0) {
    std::cerr << fetch_text(
        [&](char* b, size_t cap, size_t* n) {
          return evc_sessions_issues_jsonl(sessions.get(), b, cap, n);
        },
        "issues");
    std::cerr << "evcharge: " << c.sessions << " has invalid sessions\n";
    throw Exit{kExitDomain};
  }
  evc_instance_params p;
  evc_instance_params_default(&p);
  p.horizon_start = c.horizon_start.empty() ? nullptr : c.horizon_start.c_str();
  p.slot_minutes = c.slot_minutes;
  p.num_slots = c.num_slots;
  p.alpha = c.alpha;
  p.rho = c.rho;
  p.capacity_kw = c.capacity_kw;
  p.max_rate_kw = c.max_rate_kw;
  p.policy = c.policy == "reject" ? EVC_POLICY_REJECT : EVC_POLICY_CLAMP;
  check(evc_instance_build(&p, tariff.get(), sessions.get(), instance.out()),
        "instance");
}

std::string rejections_text(const Instance& instance) {
  return fetch_text(
      [&](char* b, size_t cap, size_t* n) {
        return evc_instance_rejections_jsonl(instance.get(), b, cap, n);
      },
      "rejections");
}

int status_exit(evc_solve_status s) {
  switch (s) {
    case EVC_SOLVE_CONVERGED: return kExitOk;
    case EVC_SOLVE_INFEASIBLE: return kExitDomain;
    case EVC_SOLVE_ITER_LIMIT: return kExitIterLimit;
  }
  return kExitUsage;
}

const char* status_name(evc_solve_status s) {
  switch (s) {
    case EVC_SOLVE_CONVERGED: return "Converged";
    case EVC_SOLVE_INFEASIBLE: return "Infeasible";
    case EVC_SOLVE_ITER_LIMIT: return "IterLimit";
  }
  return "?";
}

// ---- commands

int run_solve(const RunConfig& c, const fs::path& out) {
  Instance instance;
  load_instance(c, instance);
  Solution solution;
  check(evc_solve(instance.get(), &c.solver, solution.out()), "solve");
  evc_solve_report report;
  check(evc_solution_report(solution.get(), &report), "report");

  fs::create_directories(out);
  check(evc_solution_write(instance.get(), solution.get(), out.string().c_str()),
        "write schedule");
  write_file(out / "rejections.jsonl", rejections_text(instance));
  write_manifest(out, c,
                 {"schedule.csv", "schedule.json", "report.json", "metrics.csv",
                  "rejections.jsonl"});

  std::printf("%s after %d iterations, objective %.6f (cost %.6f)\n",
              status_name(report.status), report.iterations, report.objective,
              report.nominal_cost);
  return status_exit(report.status);
}

int run_sweep(const RunConfig& c, const fs::path& out) {
  Instance instance;
  load_instance(c, instance);
  Sweep sweep;
  check(evc_sweep_alpha(instance.get(), c.alphas.data(), c.alphas.size(), &c.solver,
                        sweep.out()),
        "sweep");
  fs::create_directories(out);
  check(evc_sweep_write(sweep.get(), out.string().c_str()), "write sweep");

  std::vector<std::string> outputs;
  for (const auto& entry : fs::directory_iterator(out)) {
    const auto name = entry.path().filename().string();
    if (name != "manifest.json") outputs.push_back(name);
  }
  std::sort(outputs.begin(), outputs.end());
  write_manifest(out, c, outputs);

  const size_t count = evc_sweep_size(sweep.get());
  size_t infeasible = 0;
  for (size_t k = 0; k < count; ++k) {
    evc_sweep_row row;
    check(evc_sweep_row_at(sweep.get(), k, &row), "sweep row");
    if (row.status == EVC_SOLVE_INFEASIBLE) ++infeasible;
    std::printf("alpha %-6g %-10s cost %.4f time %.4f h\n", row.alpha,
                status_name(row.status), row.cost, row.charging_time_hours);
  }
  return count > 0 && infeasible == count ? kExitDomain : kExitOk;
}

int run_montecarlo(const RunConfig& c, const fs::path& out) {
  Instance instance;
  load_instance(c, instance);
  Solution solution;
  check(evc_solve(instance.get(), &c.solver, solution.out()), "solve");
  evc_solve_report report;
  check(evc_solution_report(solution.get(), &report), "report");
  if (report.status != EVC_SOLVE_CONVERGED) {
    std::cerr << "evcharge: solve ended " << status_name(report.status)
              << "; bound check needs a converged schedule\n";
    return status_exit(report.status);
  }
  fs::create_directories(out);
  evc_montecarlo_report mc;
  const std::string path = (out / "montecarlo.json").string();
  check(evc_monte_carlo(instance.get(), solution.get(), c.samples, c.seed,
                        c.directed ? 1 : 0, &mc, path.c_str()),
        "montecarlo");
  write_manifest(out, c, {"montecarlo.json"});
  std::printf("%zu samples, %zu violations, max gap %.6g, tightness %.6f\n",
              mc.samples, mc.violations, mc.max_gap, mc.tightness);
  return mc.violations == 0 ? kExitOk : kExitDomain;
}

int run_gen(const RunConfig& c, const fs::path& out) {
  std::optional<std::string> config_text;
  if (!c.generator_config.empty()) config_text = read_file(c.generator_config);
  const char* cfg = config_text ? config_text->c_str() : nullptr;
  Sessions sessions;
  check(evc_sessions_generate(c.seed, c.n, cfg, sessions.out()), "generate");
  fs::create_directories(out);
  const std::string csv = c.name + ".csv";
  const std::string meta = c.name + ".meta.json";
  check(evc_sessions_write_csv(sessions.get(), (out / csv).string().c_str()),
        "write sessions");
  write_file(out / meta,
             fetch_text(
                 [&](char* b, size_t cap, size_t* n) {
                   return evc_sessions_generator_metadata(c.seed, c.n, cfg, b, cap, n);
                 },
                 "metadata"));
  write_manifest(out, c, {csv, meta});
  std::printf("wrote %zu sessions to %s\n", evc_sessions_count(sessions.get()),
              (out / csv).string().c_str());
  return kExitOk;
}

// Prints one JSON line per problem, then a summary line. Exit 0 only when the
// file is clean and nothing is rejected under the reject policy.
int run_validate(const RunConfig& c) {
  Tariff tariff;
  check(evc_tariff_load(c.tariff.c_str(), tariff.out()), "tariff");
  Sessions sessions;
  check(evc_sessions_load(c.sessions.c_str(), sessions.out()), "sessions");
  const size_t issues = evc_sessions_issue_count(sessions.get());
  if (issues > 0) {
    std::cout << fetch_text(
        [&](char* b, size_t cap, size_t* n) {
          return evc_sessions_issues_jsonl(sessions.get(), b, cap, n);
        },
        "issues");
  }
  size_t rejections = 0;
  std::string certificate;
  if (issues == 0) {
    evc_instance_params p;
    evc_instance_params_default(&p);
    p.horizon_start = c.horizon_start.empty() ? nullptr : c.horizon_start.c_str();
    p.slot_minutes = c.slot_minutes;
    p.num_slots = c.num_slots;
    p.alpha = c.alpha;
    p.rho = c.rho;
    p.capacity_kw = c.capacity_kw;
    p.max_rate_kw = c.max_rate_kw;
    p.policy = EVC_POLICY_REJECT;
    Instance instance;
    check(evc_instance_build(&p, tariff.get(), sessions.get(), instance.out()),
          "instance");
    rejections = evc_instance_rejection_count(instance.get());
    std::cout << rejections_text(instance);
    int found = 0;
    certificate = fetch_text(
        [&](char* b, size_t cap, size_t* n) {
          return evc_instance_infeasibility(instance.get(), &found, b, cap, n);
        },
        "feasibility");
    if (found) {
      json line;
      line["reason"] = "capacity_infeasible";
      line["detail"] = certificate;
      std::cout << line.dump() << "\n";
    }
  }
  json summary;
  summary["sessions"] = evc_sessions_count(sessions.get());
  summary["issues"] = issues;
  summary["rejections"] = rejections;
  summary["capacity_feasible"] = certificate.empty();
  summary["ok"] = issues == 0 && rejections == 0 && certificate.empty();
  std::cout << summary.dump() << "\n";
  return summary["ok"].get<bool>() ? kExitOk : kExitDomain;
}

int dispatch(const RunConfig& c, const fs::path& out) {
  if (c.command == "solve") return run_solve(c, out);
  if (c.command == "sweep") return run_sweep(c, out);
  if (c.command == "montecarlo") return run_montecarlo(c, out);
  if (c.command == "gen") return run_gen(c, out);
  std::cerr << "evcharge: manifest names unknown command " << c.command << "\n";
  return kExitUsage;
}

// Re-runs a manifest after checking that its inputs are unchanged.
int run_replay(const std::string& manifest_path, const fs::path& out) {
  json m;
  try {
    m = json::parse(read_file(manifest_path));
    RunConfig c = config_from_json(m.at("command").get<std::string>(),
                                   m.at("resolved_config"));
    for (const auto& [file, expected] : m.at("input_digests").items()) {
      if (!fs::exists(file)) {
        std::cerr << "evcharge: input " << file << " no longer exists\n";
        return kExitUsage;
      }
      if (digest(file) != expected.get<std::string>()) {
        std::cerr << "evcharge: input " << file << " changed since the run\n";
        return kExitDomain;
      }
    }
    return dispatch(c, out);
  } catch (const json::exception& e) {
    std::cerr << "evcharge: bad manifest " << manifest_path << ": " << e.what() << "\n";
    return kExitUsage;
  }
}

fs::path resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("EVCHARGE_OUT_DIR"); env && *env) return env;
  return "out";
}

void add_instance_options(CLI::App* cmd, RunConfig& c, std::string& solver_file) {
  cmd->add_option("--tariff", c.tariff, "Tariff JSON")->capture_default_str();
  cmd->add_option("--sessions", c.sessions, "Session CSV")->capture_default_str();
  cmd->add_option("--horizon-start", c.horizon_start,
                  "Grid start (YYYY-MM-DDTHH:MM); default midnight of first arrival");
  cmd->add_option("--slot-minutes", c.slot_minutes, "Slot length in minutes")
      ->check(CLI::Range(1, 1440))
      ->capture_default_str();
  cmd->add_option("--num-slots", c.num_slots, "Number of slots (0 = one day)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "Weight of the fast-charging term")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--rho", c.rho, "Price uncertainty radius")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--capacity", c.capacity_kw, "Station capacity per slot (kW)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-rate", c.max_rate_kw, "Per-EV rate cap (kW)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--policy", c.policy, "Over-demand handling")
      ->check(CLI::IsMember({"clamp", "reject"}))
      ->capture_default_str();
  cmd->add_option("--solver-config", solver_file, "Solver settings JSON");
  cmd->add_option("--max-iters", c.solver.max_iters, "Iteration limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tol", c.solver.tol_primal, "Primal and dual tolerance")
      ->check(CLI::PositiveNumber)
      ->each([&c](const std::string&) { c.solver.tol_dual = c.solver.tol_primal; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust EV charging scheduler"};
  app.set_version_flag("--version", std::string(evc_version()));
  app.require_subcommand(1);

  RunConfig c;
  std::string out_flag;
  std::string solver_file;
  std::string manifest_path;

  auto* validate = app.add_subcommand("validate", "Check a session file against a tariff");
  validate->add_option("--tariff", c.tariff, "Tariff JSON")->capture_default_str();
  validate->add_option("--sessions", c.sessions, "Session CSV")->capture_default_str();
  validate->add_option("--horizon-start", c.horizon_start, "Grid start");
  validate->add_option("--slot-minutes", c.slot_minutes)->check(CLI::Range(1, 1440));
  validate->add_option("--num-slots", c.num_slots)->check(CLI::NonNegativeNumber);
  validate->add_option("--capacity", c.capacity_kw)->check(CLI::PositiveNumber);
  validate->add_option("--max-rate", c.max_rate_kw)->check(CLI::PositiveNumber);

  auto* solve = app.add_subcommand("solve", "Solve one instance");
  add_instance_options(solve, c, solver_file);

  auto* sweep = app.add_subcommand("sweep", "Solve across a grid of alpha values");
  add_instance_options(sweep, c, solver_file);
  sweep->add_option("--alphas", c.alphas, "Comma-separated alpha grid")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);

  auto* mc = app.add_subcommand("montecarlo", "Sample price deviations against the bound");
  add_instance_options(mc, c, solver_file);
  mc->add_option("--samples", c.samples, "Number of samples")->capture_default_str();
  mc->add_option("--seed", c.seed, "Sampler seed")->capture_default_str();
  mc->add_flag("--directed", c.directed, "Add samples aligned with the schedule");

  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic session day");
  gen->add_option("--n", c.n, "Number of sessions")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--config", c.generator_config, "Generator config JSON");
  gen->add_option("--name", c.name, "Output file stem")->capture_default_str();

  auto* replay = app.add_subcommand("replay", "Re-run the run recorded in a manifest");
  replay->add_option("manifest", manifest_path, "manifest.json")->required();

  for (auto* cmd : {solve, sweep, mc, gen, replay}) {
    cmd->add_option("--out", out_flag, "Output directory (env EVCHARGE_OUT_DIR)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const fs::path out = resolve_out(out_flag);
    if (*replay) return run_replay(manifest_path, out);

    if (!solver_file.empty()) {
      check(evc_solver_config_parse(read_file(solver_file).c_str(), &c.solver),
            "solver config");
    }
    if (*gen) {
      c.command = "gen";
      c.seed = gen_seed;
      if (!c.generator_config.empty()) c.generator_config = absolute(c.generator_config);
      return run_gen(c, out);
    }
    c.tariff = absolute(c.tariff);
    c.sessions = absolute(c.sessions);
    if (*validate) {
      c.command = "validate";
      return run_validate(c);
    }
    c.command = solve->parsed() ? "solve" : sweep->parsed() ? "sweep" : "montecarlo";
    return dispatch(c, out);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "evcharge: " << e.what() << "\n";
    return kExitUsage;
  }
}
