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

// Batch assessment: every (target line, N1, method) instance of a sweep,
// solved in parallel and written out in a fixed order.
//
// Config file (INI, every key optional except case):
//
//   [case]
//   path = data/cases/case118.m
//
//   [sweep]
//   methods = A1,A2,A3        ; any of original, A1, A2, A3
//   targets = critical        ; critical, all, or a list of branch ids
//   n1_start = 0.1
//   n1_stop = 1.0
//   n1_step = 0.1
//   load_shift = 0.1
//   sigma = 1e-4
//   critical_threshold = 0.9
//   iteration_cap = 20
//   seed = 0
//
//   [solver]
//   backend = native          ; or external, when an adapter is registered
//   time_limit = 0            ; seconds per MILP, 0 for none
//   node_limit = 1000000
//
//   [run]
//   threads = 0               ; 0 for one per hardware thread
//   output = results
//   timing = false            ; fill the CSV solve_ms column
//
// The algorithms draw no random numbers; the seed is recorded with the
// results. Output is byte-identical across runs and thread counts unless
// a time limit cuts a solve short or timing is requested.

#ifndef GRIDFDI_SWEEP_H_
#define GRIDFDI_SWEEP_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridfdi/attack_opt.h"
#include "gridfdi/bounds_report.h"

namespace gridfdi {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  std::filesystem::path case_path;
  std::vector<Method> methods = {Method::kA1, Method::kA2, Method::kA3};
  // Empty with `critical_targets` set: auto-detect; otherwise branch ids.
  std::vector<int> targets;
  bool critical_targets = true;
  bool all_targets = false;
  double n1_start = 0.1;
  double n1_stop = 1.0;
  double n1_step = 0.1;
  double load_shift = 0.1;
  double sigma = 1e-4;
  double critical_threshold = 0.9;
  int iteration_cap = 20;
  uint64_t seed = 0;
  std::string backend = "native";
  double time_limit = 0.0;
  int64_t node_limit = 1'000'000;
  int threads = 0;
  std::filesystem::path output = "results";
  bool timing = false;

  // Throws ConfigError.
  void Validate() const;
  // N1 values from start to stop inclusive, rounded to 12 decimals.
  std::vector<double> BudgetGrid() const;
};

// Reads an INI file on top of `base`. Throws ConfigError on unknown keys
// or malformed values, OutputError when the file cannot be read.
SweepConfig LoadSweepConfig(const std::filesystem::path& path,
                            SweepConfig base = {});
std::string SweepConfigToIni(const SweepConfig& config);

// Parses "A1,A2" style lists and "critical" / "all" / "3,7,9" targets.
std::vector<Method> ParseMethodList(const std::string& text);
void ParseTargets(const std::string& text, SweepConfig& config);

// Branch ids a sweep visits, in ascending order.
std::vector<int> ResolveTargets(const SweepConfig& config,
                                const AttackContext& ctx);

struct SweepProgress {
  const InstanceRecord* record = nullptr;
  int done = 0;
  int total = 0;
};

// Solves every instance. Instances run in (target, N1, method) order on
// `config.threads` workers; the report is assembled in that order. Failures
// inside an instance become records with status error. `progress`, if set,
// is called under a lock after each instance.
BoundsReport RunSweep(const SweepConfig& config, const GridCase& grid,
                      const AttackContext& ctx,
                      const std::function<void(const SweepProgress&)>& progress =
                          {});

// bounds.csv, bounds.json, plot_data.csv, plot/target_<id>.csv,
// instances.log and config.ini under config.output. Throws OutputError.
void WriteSweepOutputs(const SweepConfig& config, const BoundsReport& report,
                       const GridCase& grid);

}  // namespace gridfdi

#endif  // GRIDFDI_SWEEP_H_
