// Copyright 2026 The gridfdi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// gridfdi: batch vulnerability assessment.
//
//   gridfdi assess  --case FILE [--config FILE] [options]   run a sweep
//   gridfdi verify  --case FILE --attack FILE               check one attack
//   gridfdi case    FILE [--to-json OUT] [--dispatch]       parse/validate/convert
//
// Exit codes: 0 success, 2 bad configuration or arguments, 3 case error,
// 4 I/O error, 1 anything else. Solver non-convergence is reported in the
// output, not through the exit code.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridfdi/attack_model.h"
#include "gridfdi/attack_opt.h"
#include "gridfdi/case_io.h"
#include "gridfdi/dcopf.h"
#include "gridfdi/network.h"
#include "gridfdi/sweep.h"

namespace {

using namespace gridfdi;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitCase = 3;
constexpr int kExitIo = 4;

// Carries an exit code out of a verb.
struct Exit {
  int code;
  std::string message;
};

GridCase LoadCaseOrExit(const fs::path& path) {
  if (!fs::exists(path)) throw Exit{kExitIo, "cannot read case " + path.string()};
  try {
    GridCase grid = LoadCaseFile(path);
    ValidateCase(grid);
    return grid;
  } catch (const CaseError& e) {
    throw Exit{kExitCase, path.string() + ": " + e.what()};
  }
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kExitIo, "cannot read " + path.string()};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct AssessArgs {
  std::string config_file;
  std::string case_path;
  std::string methods;
  std::string targets;
  std::optional<double> n1_start, n1_stop, n1_step, load_shift, sigma,
      time_limit, threshold;
  std::optional<int> threads, iteration_cap;
  std::optional<int64_t> node_limit;
  std::optional<uint64_t> seed;
  std::string backend;
  std::string output;
  bool timing = false;
  bool quiet = false;
};

int RunAssess(const AssessArgs& a) {
  SweepConfig config;
  try {
    if (!a.config_file.empty()) config = LoadSweepConfig(a.config_file, config);
    if (!a.case_path.empty()) config.case_path = a.case_path;
    if (!a.methods.empty()) config.methods = ParseMethodList(a.methods);
    if (!a.targets.empty()) ParseTargets(a.targets, config);
    if (a.n1_start) config.n1_start = *a.n1_start;
    if (a.n1_stop) config.n1_stop = *a.n1_stop;
    if (a.n1_step) config.n1_step = *a.n1_step;
    if (a.load_shift) config.load_shift = *a.load_shift;
    if (a.sigma) config.sigma = *a.sigma;
    if (a.threshold) config.critical_threshold = *a.threshold;
    if (a.iteration_cap) config.iteration_cap = *a.iteration_cap;
    if (a.seed) config.seed = *a.seed;
    if (!a.backend.empty()) config.backend = a.backend;
    if (a.time_limit) config.time_limit = *a.time_limit;
    if (a.node_limit) config.node_limit = *a.node_limit;
    if (a.threads) config.threads = *a.threads;
    if (!a.output.empty()) config.output = a.output;
    if (a.timing) config.timing = true;
    config.Validate();
  } catch (const ConfigError& e) {
    throw Exit{kExitConfig, e.what()};
  } catch (const OutputError& e) {
    throw Exit{kExitIo, e.what()};
  }

  const GridCase grid = LoadCaseOrExit(config.case_path);
  const InjectionModel model = BuildInjectionModel(grid);
  AttackContext ctx;
  try {
    ctx = MakeAttackContext(grid, model);
  } catch (const DcopfError& e) {
    throw Exit{kExitCase, std::string("baseline dispatch failed: ") + e.what()};
  }

  BoundsReport report;
  try {
    const bool quiet = a.quiet;
    report = RunSweep(config, grid, ctx, [quiet](const SweepProgress& p) {
      if (quiet) return;
      const InstanceRecord& r = *p.record;
      std::fprintf(stderr, "[%d/%d] line %d N1 %g %s: %s\n", p.done, p.total,
                   r.target_line, r.n1,
                   std::string(ToString(r.result.method)).c_str(),
                   std::string(ToString(r.result.status)).c_str());
    });
    WriteSweepOutputs(config, report, grid);
  } catch (const ConfigError& e) {
    throw Exit{kExitConfig, e.what()};
  } catch (const OutputError& e) {
    throw Exit{kExitIo, e.what()};
  }
  const std::vector<std::string> problems = CheckBoundOrdering(report);
  for (const std::string& p : problems) {
    std::fprintf(stderr, "warning: bound ordering: %s\n", p.c_str());
  }
  std::printf("%zu instances written to %s\n", report.records.size(),
              config.output.string().c_str());
  return 0;
}

int RunVerify(const std::string& case_path, const std::string& attack_path) {
  const GridCase grid = LoadCaseOrExit(case_path);
  AttackDescriptor descriptor;
  try {
    descriptor = AttackDescriptorFromJson(ReadText(attack_path), grid);
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitConfig, e.what()};
  }
  const InjectionModel model = BuildInjectionModel(grid);
  AttackContext ctx;
  try {
    ctx = MakeAttackContext(grid, model);
  } catch (const DcopfError& e) {
    throw Exit{kExitCase, std::string("baseline dispatch failed: ") + e.what()};
  }
  nlohmann::ordered_json out;
  out["target_line"] = descriptor.target_line;
  const int pos = grid.BranchPosition(descriptor.target_line);
  out["rating"] = grid.branches[pos].rate;
  out["baseline_flow"] = ctx.baseline_flows(pos);
  try {
    const VerifyReport v = VerifyAttack(ctx, descriptor.target_line,
                                        descriptor.attack);
    out["status"] = "ok";
    out["attack_valid"] = v.check.ok();
    out["l1_usage"] = v.check.l1_usage;
    out["n1"] = v.check.n1;
    out["shift_violations"] = v.check.shift_violations.size();
    out["support_violations"] = v.check.support_violations.size();
    out["physical_flow"] = v.physical_flow;
    out["overflow_ratio"] = v.overflow_ratio;
    out["cyber_flow"] = v.cyber_flows(pos);
    nlohmann::ordered_json overflows = nlohmann::ordered_json::array();
    for (int k = 0; k < grid.num_branches(); ++k) {
      const double ratio = std::abs(v.physical_flows(k)) / grid.branches[k].rate;
      if (ratio > 1.0 + 1e-9) {
        overflows.push_back({{"line", grid.branches[k].id}, {"ratio", ratio}});
      }
    }
    out["overflowing_lines"] = std::move(overflows);
    std::vector<double> dispatch(v.dispatch.data(),
                                 v.dispatch.data() + v.dispatch.size());
    out["dispatch"] = dispatch;
  } catch (const InfeasibleRedispatchError& e) {
    out["status"] = "infeasible";
    out["message"] = e.what();
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int RunCase(const std::string& path, const std::string& to_json, bool dispatch) {
  const GridCase grid = LoadCaseOrExit(path);
  if (!to_json.empty()) {
    std::ofstream out(to_json, std::ios::binary);
    if (!out) throw Exit{kExitIo, "cannot write " + to_json};
    out << SerializeCase(grid);
    if (!out) throw Exit{kExitIo, "write failed for " + to_json};
  }
  const InjectionModel model = BuildInjectionModel(grid);
  nlohmann::ordered_json out;
  out["name"] = grid.name;
  out["buses"] = grid.num_buses();
  out["branches"] = grid.num_branches();
  out["generators"] = grid.num_generators();
  try {
    const AttackContext ctx = MakeAttackContext(grid, model);
    out["baseline_cost"] = ctx.baseline.cost;
    std::vector<int> critical, marginal;
    for (int k : CriticalLines(ctx, 0.9)) critical.push_back(grid.branches[k].id);
    for (int g : MarginalGenerators(ctx)) marginal.push_back(grid.generators[g].id);
    out["critical_lines"] = critical;
    out["marginal_generators"] = marginal;
    if (dispatch) out["dispatch"] = nlohmann::ordered_json::parse(DispatchToJson(ctx.baseline, grid));
  } catch (const DcopfError& e) {
    out["baseline_cost"] = nullptr;
    out["dispatch_error"] = e.what();
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case line overflow under unobservable false data "
               "injection"};
  app.require_subcommand(1);

  AssessArgs a;
  CLI::App* assess = app.add_subcommand("assess", "Run a sweep of attack problems");
  assess->add_option("--config", a.config_file, "INI config file");
  assess->add_option("--case", a.case_path, "Case file (MATPOWER or JSON)");
  assess->add_option("--methods", a.methods, "Comma list of original,A1,A2,A3");
  assess->add_option("--targets", a.targets, "critical, all, or branch ids");
  assess->add_option("--n1-start", a.n1_start);
  assess->add_option("--n1-stop", a.n1_stop);
  assess->add_option("--n1-step", a.n1_step);
  assess->add_option("--load-shift", a.load_shift);
  assess->add_option("--sigma", a.sigma);
  assess->add_option("--critical-threshold", a.threshold);
  assess->add_option("--iteration-cap", a.iteration_cap);
  assess->add_option("--seed", a.seed);
  assess->add_option("--backend", a.backend, "native or external");
  assess->add_option("--time-limit", a.time_limit, "Seconds per MILP, 0 for none");
  assess->add_option("--node-limit", a.node_limit);
  assess->add_option("--threads", a.threads, "Workers, 0 for all hardware threads");
  assess->add_option("--output,-o", a.output, "Output directory");
  assess->add_flag("--timing", a.timing, "Fill the solve_ms CSV column");
  assess->add_flag("--quiet,-q", a.quiet, "No per-instance progress");

  std::string verify_case, attack_file;
  CLI::App* verify = app.add_subcommand("verify", "Re-dispatch under one attack");
  verify->add_option("--case", verify_case)->required();
  verify->add_option("--attack", attack_file, "JSON attack descriptor")->required();

  std::string case_file, to_json;
  bool show_dispatch = false;
  CLI::App* caseverb = app.add_subcommand("case", "Parse, validate and convert a case");
  caseverb->add_option("file", case_file)->required();
  caseverb->add_option("--to-json", to_json, "Write the canonical JSON form");
  caseverb->add_flag("--dispatch", show_dispatch, "Include the baseline dispatch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*assess) return RunAssess(a);
    if (*verify) return RunVerify(verify_case, attack_file);
    if (*caseverb) return RunCase(case_file, to_json, show_dispatch);
  } catch (const Exit& e) {
    std::fprintf(stderr, "gridfdi: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gridfdi: %s\n", e.what());
    return 1;
  }
  return 0;
}
