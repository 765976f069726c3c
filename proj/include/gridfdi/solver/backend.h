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

// Routing of LP/MILP solves to either the native engine or one registered
// external adapter. The native engine is the default; an adapter, once
// registered, receives every subsequent solve until it is cleared.

#ifndef GRIDFDI_SOLVER_BACKEND_H_
#define GRIDFDI_SOLVER_BACKEND_H_

#include <memory>
#include <stdexcept>
#include <string>

#include "gridfdi/solver/branch_and_bound.h"
#include "gridfdi/solver/linear_program.h"
#include "gridfdi/solver/simplex.h"

namespace gridfdi::solver {

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual SolveResult SolveLp(const LinearProgram& lp) = 0;
  // Adapters may ignore the native-only fields of `options` (heuristic,
  // simplex settings) but should honor the gap, node and time limits.
  virtual SolveResult SolveMilp(const MilpProgram& milp,
                                const MilpOptions& options) = 0;
};

class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& backend, const std::string& what)
      : std::runtime_error("backend '" + backend + "': " + what),
        backend_(backend) {}
  const std::string& backend() const { return backend_; }

 private:
  std::string backend_;
};

void RegisterExternalBackend(std::shared_ptr<SolverBackend> adapter);
void ClearExternalBackend();
std::shared_ptr<SolverBackend> ExternalBackend();
// "native" when no adapter is registered.
std::string ActiveBackendName();

// Dispatch entry points used by every formulation in the toolkit.
SolveResult SolveLp(const LinearProgram& lp,
                    const SimplexOptions& options = {});
SolveResult SolveMilp(const MilpProgram& milp,
                      const MilpOptions& options = {});

}  // namespace gridfdi::solver

#endif  // GRIDFDI_SOLVER_BACKEND_H_
