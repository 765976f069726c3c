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

// State-perturbation attack vectors, the subgraph an attacker must control
// to inject them, and the loads the operator sees afterwards.

#ifndef GRIDFDI_ATTACK_MODEL_H_
#define GRIDFDI_ATTACK_MODEL_H_

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridfdi/case_io.h"
#include "gridfdi/network.h"

namespace gridfdi {

// Entries with magnitude at or below this are treated as zero.
inline constexpr double kAttackZeroThreshold = 1e-9;

struct AttackVector {
  Eigen::VectorXd c;  // per bus, radians
  double n1 = 0.0;
  double load_shift = 0.1;
};

struct AttackSubgraph {
  std::set<int> buses;     // bus positions
  std::set<int> branches;  // branch positions
  std::set<int> center_buses;
  // Number of boundary expansions (step 3 rounds) performed.
  int expansion_rounds = 0;
  bool full_network = false;
};

class EmptyAttackError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

AttackSubgraph BuildSubgraph(const AttackVector& attack, const GridCase& grid,
                             const InjectionModel& model);

// P_D - H c.
Eigen::VectorXd CyberLoads(const Eigen::VectorXd& c, const GridCase& grid,
                           const InjectionModel& model);

// Per-bus bound on |H c|: load_shift times the nonnegative part of P_D.
Eigen::VectorXd LoadShiftBounds(const GridCase& grid, double load_shift);

struct AttackCheck {
  double l1_usage = 0.0;  // over load buses
  double n1 = 0.0;
  bool l1_ok = true;
  // Bus positions where c is nonzero although it must be zero (slack or
  // non-load bus).
  std::vector<int> support_violations;
  // Per bus: distance of (H c)_i to the nearer load-shift bound; negative
  // when violated.
  Eigen::VectorXd shift_slack;
  std::vector<int> shift_violations;
  int center_count = 0;
  int l0 = 0;
  int subgraph_buses = 0;
  int subgraph_branches = 0;

  bool ok() const {
    return l1_ok && support_violations.empty() && shift_violations.empty();
  }
};

// `tolerance` applies to the l1 budget and load-shift rows.
AttackCheck CheckAttack(const AttackVector& attack, const GridCase& grid,
                        const InjectionModel& model, double tolerance = 1e-9);

// JSON attack descriptor: {target_line, N1, LS, c: {bus id: value}}.
struct AttackDescriptor {
  int target_line = 0;
  AttackVector attack;
};

std::string AttackDescriptorToJson(const AttackDescriptor& descriptor,
                                   const GridCase& grid);
// Throws std::invalid_argument on malformed input or unknown bus ids.
AttackDescriptor AttackDescriptorFromJson(const std::string& text,
                                          const GridCase& grid);

}  // namespace gridfdi

#endif  // GRIDFDI_ATTACK_MODEL_H_
