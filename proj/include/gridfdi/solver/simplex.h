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

// Bounded-variable revised simplex.
//
// Each row i of the program is turned into `a_i x - y_i = 0` with a logical
// variable y_i carrying the row bounds, so every constraint is an equality and
// every variable has (possibly infinite) bounds. The basis inverse is kept as
// an explicit dense matrix updated in product form and refactored from a
// sparse LU every `refactor_interval` pivots.
//
// Cold starts run a composite primal simplex (phase 1 minimizes the sum of
// infeasibilities). After bound changes, `Resolve()` runs the dual simplex
// from the current basis, which stays dual feasible; this is what the
// branch-and-bound driver relies on.

#ifndef GRIDFDI_SOLVER_SIMPLEX_H_
#define GRIDFDI_SOLVER_SIMPLEX_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gridfdi/solver/linear_program.h"

namespace gridfdi::solver {

struct SimplexOptions {
  double primal_tolerance = 1e-7;
  double dual_tolerance = 1e-7;
  double pivot_tolerance = 1e-9;
  // 0 selects max(10000, 50 * (rows + columns)).
  int64_t iteration_limit = 0;
  int refactor_interval = 100;
  bool scale = true;
};

enum class VarStatus : int8_t { kBasic, kAtLower, kAtUpper, kFree };

class SimplexSolver {
 public:
  // Basis statuses for structural columns followed by row logicals.
  using Basis = std::vector<VarStatus>;

  // Full warm state including the factorization; cheap to restore.
  struct State {
    std::vector<VarStatus> status;
    std::vector<int> head;
    std::vector<double> x;
    std::vector<double> lower;
    std::vector<double> upper;
    Eigen::MatrixXd binv;
    int pivots_since_refactor = 0;
  };

  explicit SimplexSolver(const LinearProgram& lp, SimplexOptions options = {});

  // Solves from the slack basis (or from the basis set via SetBasis).
  SolveResult Solve();
  // Re-optimizes after bound changes with the dual simplex, falling back to
  // the primal simplex when the basis is not dual feasible.
  SolveResult Resolve();

  // Bounds are given in the units of the original program.
  void SetColumnBounds(int column, double lower, double upper);
  double column_lower(int column) const;
  double column_upper(int column) const;

  Basis GetBasis() const { return status_; }
  void SetBasis(const Basis& basis);
  State SaveState() const;
  void LoadState(const State& state);

  int64_t total_iterations() const { return total_iterations_; }
  int num_rows() const { return m_; }
  int num_columns() const { return n_; }

 private:
  enum class Outcome { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

  void BuildScaledModel(const LinearProgram& lp);
  void InitSlackBasis();
  bool Refactor();
  void ComputeBasicValues();
  void ComputeDuals(const std::vector<double>& basic_costs,
                    Eigen::VectorXd& pi) const;
  double ReducedCost(int j, const Eigen::VectorXd& pi,
                     const std::vector<double>& costs) const;
  void Ftran(int j, Eigen::VectorXd& out) const;
  double RowDot(const Eigen::VectorXd& row, int j) const;
  void Pivot(int leaving_pos, int entering, const Eigen::VectorXd& alpha);
  bool IsBasicFeasible() const;
  bool IsDualFeasible(const Eigen::VectorXd& pi) const;

  Outcome RunPrimal();
  Outcome RunDual();
  SolveResult Finish(Outcome outcome);
  void SnapNonbasic(int j);

  SimplexOptions options_;
  double sense_sign_ = 1.0;
  double objective_offset_ = 0.0;
  std::vector<double> objective_;  // unscaled, original sense
  int n_ = 0;  // structural columns
  int m_ = 0;  // rows
  int64_t iteration_limit_ = 0;
  int64_t total_iterations_ = 0;
  int64_t iterations_this_solve_ = 0;

  // Scaled structural matrix in compressed column form.
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;

  // Per variable (structural then logical), scaled space.
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;         // basic variable per basis position
  std::vector<int> basis_pos_;    // position in head_ or -1
  Eigen::MatrixXd binv_;
  int pivots_since_refactor_ = 0;
  bool factor_valid_ = false;
};

// One-shot convenience wrapper.
SolveResult SolveLpNative(const LinearProgram& lp,
                          const SimplexOptions& options = {});

}  // namespace gridfdi::solver

#endif  // GRIDFDI_SOLVER_SIMPLEX_H_
