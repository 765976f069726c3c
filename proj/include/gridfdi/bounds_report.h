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

// Sweep results per (target line, N1, method) and their serializations.
//
// CSV columns:
//   target_line,n1,method,status,objective_pu,overflow_ratio,
//   binaries_initial,binaries_final,iterations,solve_ms
// method is original, A1, A2, A3_lb or A3_ub (A3 gives two rows).
// objective_pu is the target flow oriented along its baseline direction;
// overflow_ratio is objective_pu over the rating. Missing values are empty.
// solve_ms is empty unless timing output was requested, which keeps
// repeated runs byte-identical.

#ifndef GRIDFDI_BOUNDS_REPORT_H_
#define GRIDFDI_BOUNDS_REPORT_H_

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gridfdi/attack_opt.h"

namespace gridfdi {

struct InstanceRecord {
  int target_line = 0;
  double n1 = 0.0;
  double rating = 0.0;  // pu
  AttackResult result;
};

struct BoundsReport {
  std::string case_name;
  double load_shift = 0.1;
  double sigma = 1e-4;
  // Methods requested, which decide the plot columns; empty means all four.
  std::vector<Method> methods;
  std::vector<InstanceRecord> records;

  // Sorted by (target_line, n1, method).
  void Sort();
};

struct CsvOptions {
  bool timing = false;
};

void WriteBoundsCsv(const BoundsReport& report, const GridCase& grid,
                    std::ostream& out, const CsvOptions& options = {});
void WriteBoundsJson(const BoundsReport& report, const GridCase& grid,
                     std::ostream& out);

// One row per (target, N1): n1,original,A1,A2,A3_lb,A3_ub,rating, keeping
// only the columns of requested methods (A3 gives both bounds).
void WritePlotData(const BoundsReport& report, int target_line,
                   std::ostream& out);
// Same columns for every target, prefixed by target_line.
void WritePlotDataAll(const BoundsReport& report, std::ostream& out);
std::vector<int> ReportTargets(const BoundsReport& report);

// Bound ordering problems found in the report, one message each. Only
// converged results take part.
std::vector<std::string> CheckBoundOrdering(const BoundsReport& report,
                                            double tolerance = 1e-6);

}  // namespace gridfdi

#endif  // GRIDFDI_BOUNDS_REPORT_H_
