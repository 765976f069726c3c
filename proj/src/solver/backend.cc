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

#include "gridfdi/solver/backend.h"

#include <cmath>
#include <mutex>
#include <string>
#include <utility>

namespace gridfdi::solver {
namespace {

std::mutex& RegistryMutex() {
  static std::mutex mu;
  return mu;
}

std::shared_ptr<SolverBackend>& RegistrySlot() {
  static std::shared_ptr<SolverBackend> slot;
  return slot;
}

void CheckContract(const SolverBackend& adapter, const SolveResult& result,
                   int columns, int rows, bool expect_duals) {
  const bool has_point = result.status == SolveStatus::kOptimal ||
                         (result.status != SolveStatus::kInfeasible &&
                          result.status != SolveStatus::kUnbounded &&
                          !result.primal.empty());
  if (result.status == SolveStatus::kError) {
    throw BackendError(adapter.name(), "solve failed: " + result.message);
  }
  if (!has_point) return;
  if (static_cast<int>(result.primal.size()) != columns) {
    throw BackendError(adapter.name(),
                       "primal vector has " +
                           std::to_string(result.primal.size()) +
                           " entries, expected " + std::to_string(columns));
  }
  for (double v : result.primal) {
    if (!std::isfinite(v)) {
      throw BackendError(adapter.name(), "primal vector is not finite");
    }
  }
  if (expect_duals && result.status == SolveStatus::kOptimal &&
      static_cast<int>(result.row_duals.size()) != rows) {
    throw BackendError(adapter.name(),
                       "row dual vector has " +
                           std::to_string(result.row_duals.size()) +
                           " entries, expected " + std::to_string(rows));
  }
}

}  // namespace

void RegisterExternalBackend(std::shared_ptr<SolverBackend> adapter) {
  std::lock_guard<std::mutex> lock(RegistryMutex());
  RegistrySlot() = std::move(adapter);
}

void ClearExternalBackend() {
  std::lock_guard<std::mutex> lock(RegistryMutex());
  RegistrySlot().reset();
}

std::shared_ptr<SolverBackend> ExternalBackend() {
  std::lock_guard<std::mutex> lock(RegistryMutex());
  return RegistrySlot();
}

std::string ActiveBackendName() {
  std::shared_ptr<SolverBackend> adapter = ExternalBackend();
  return adapter ? adapter->name() : "native";
}

SolveResult SolveLp(const LinearProgram& lp, const SimplexOptions& options) {
  std::shared_ptr<SolverBackend> adapter = ExternalBackend();
  if (!adapter) return SolveLpNative(lp, options);
  SolveResult result = adapter->SolveLp(lp);
  CheckContract(*adapter, result, lp.num_columns(), lp.num_rows(), true);
  result.backend = adapter->name();
  return result;
}

SolveResult SolveMilp(const MilpProgram& milp, const MilpOptions& options) {
  std::shared_ptr<SolverBackend> adapter = ExternalBackend();
  if (!adapter) return SolveMilpNative(milp, options);
  SolveResult result = adapter->SolveMilp(milp, options);
  CheckContract(*adapter, result, milp.lp.num_columns(), milp.lp.num_rows(),
                false);
  result.backend = adapter->name();
  return result;
}

}  // namespace gridfdi::solver
