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

#ifndef GRIDFDI_SOLVER_BRANCH_AND_BOUND_H_
#define GRIDFDI_SOLVER_BRANCH_AND_BOUND_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gridfdi/solver/linear_program.h"
#include "gridfdi/solver/simplex.h"

namespace gridfdi::solver {

// Proposes a full primal point from a node's LP relaxation values. The
// proposal is only adopted if it is integral on the binaries and satisfies
// every row within the primal tolerance.
using PrimalHeuristic = std::function<std::optional<std::vector<double>>(
    const std::vector<double>& relaxation)>;

// Picks the binary column to branch on from a node's LP relaxation, or -1
// to use the default rule. A choice that is not a fractional binary is
// ignored.
using BranchingRule = std::function<int(const std::vector<double>& relaxation)>;

struct MilpOptions {
  // Absolute tolerance between incumbent and best bound.
  double gap_tolerance = 1e-6;
  int64_t node_limit = 1'000'000;
  double time_limit_seconds = kInfinity;
  double integrality_tolerance = 1e-6;
  SimplexOptions lp;
  PrimalHeuristic heuristic;
  BranchingRule branching;
  // Re-solve the LP with binaries fixed at the incumbent to clean up the
  // continuous part and obtain row duals.
  bool polish = true;
};

// Best-first branch and bound over LP relaxations with plunging: after a
// node is expanded the better surviving child is processed next, reusing
// its factorization; only when both children are pruned does the search
// return to the best open node. Children are evaluated eagerly from the
// parent's factorization, so every open node carries an exact LP bound.
// Unless a branching rule chooses otherwise, branching picks the most
// fractional binary, ties going to the lowest column index; open nodes with
// equal bounds are taken in creation order.
SolveResult SolveMilpNative(const MilpProgram& milp,
                            const MilpOptions& options = {});

}  // namespace gridfdi::solver

#endif  // GRIDFDI_SOLVER_BRANCH_AND_BOUND_H_
