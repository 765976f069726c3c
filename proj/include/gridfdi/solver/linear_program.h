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

// Solver-neutral description of linear and mixed-integer linear programs and
// of their solutions. Every formulation in the toolkit is expressed through
// these types; the native engine and any registered external backend consume
// them unchanged.

#ifndef GRIDFDI_SOLVER_LINEAR_PROGRAM_H_
#define GRIDFDI_SOLVER_LINEAR_PROGRAM_H_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace gridfdi::solver {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int column = 0;
  double value = 0.0;
};

struct Column {
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  std::string name;
};

struct Row {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

class LinearProgram {
 public:
  explicit LinearProgram(Sense sense = Sense::kMinimize) : sense_(sense) {}

  int AddColumn(double lower, double upper, double objective,
                std::string name = {});
  // Duplicate column references inside `terms` are merged.
  int AddRow(std::vector<Term> terms, Relation relation, double rhs,
             std::string name = {});

  void SetSense(Sense sense) { sense_ = sense; }
  void SetObjective(int column, double value);
  void SetBounds(int column, double lower, double upper);
  void SetObjectiveOffset(double offset) { objective_offset_ = offset; }

  Sense sense() const { return sense_; }
  int num_columns() const { return static_cast<int>(columns_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const Column& column(int j) const { return columns_[j]; }
  const Row& row(int i) const { return rows_[i]; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  double objective_offset() const { return objective_offset_; }
  int64_t num_nonzeros() const;

  // Objective value of `x` including the constant offset.
  double Evaluate(const std::vector<double>& x) const;
  // Largest bound or row violation of `x`.
  double MaxPrimalViolation(const std::vector<double>& x) const;

  // Throws std::invalid_argument when an invariant is broken: non-finite rhs,
  // lower > upper, NaN coefficients or out-of-range column references.
  void Validate() const;

 private:
  Sense sense_;
  std::vector<Column> columns_;
  std::vector<Row> rows_;
  double objective_offset_ = 0.0;
};

struct MilpProgram {
  LinearProgram lp;
  std::vector<int> binaries;

  int AddBinary(double objective, std::string name = {});
  bool IsBinary(int column) const;
  // Also checks that every binary column has bounds within [0, 1].
  void Validate() const;
};

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kNodeLimit,
  kTimeLimit,
  kError,
};

std::string_view ToString(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kError;
  double objective = 0.0;
  std::vector<double> primal;
  // d(objective)/d(rhs) per row, in the sense of the program.
  std::vector<double> row_duals;
  // d(objective)/d(bound) of the active bound per column; zero for basic
  // columns.
  std::vector<double> reduced_costs;
  int64_t iterations = 0;
  // Branch-and-bound statistics; zero for pure LP solves.
  int64_t nodes = 0;
  double best_bound = 0.0;
  double gap = 0.0;
  std::string backend;
  std::string message;

  bool ok() const { return status == SolveStatus::kOptimal; }
  // True when a primal point is attached (optimal or a limit with incumbent).
  bool has_solution() const { return !primal.empty(); }
};

}  // namespace gridfdi::solver

#endif  // GRIDFDI_SOLVER_LINEAR_PROGRAM_H_
