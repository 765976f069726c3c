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

#include "gridfdi/solver/linear_program.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace gridfdi::solver {

int LinearProgram::AddColumn(double lower, double upper, double objective,
                             std::string name) {
  columns_.push_back(Column{lower, upper, objective, std::move(name)});
  return num_columns() - 1;
}

int LinearProgram::AddRow(std::vector<Term> terms, Relation relation,
                          double rhs, std::string name) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.column < b.column; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().column == t.column) {
      merged.back().value += t.value;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.value == 0.0; });
  rows_.push_back(Row{std::move(merged), relation, rhs, std::move(name)});
  return num_rows() - 1;
}

void LinearProgram::SetObjective(int column, double value) {
  columns_.at(column).objective = value;
}

void LinearProgram::SetBounds(int column, double lower, double upper) {
  Column& c = columns_.at(column);
  c.lower = lower;
  c.upper = upper;
}

int64_t LinearProgram::num_nonzeros() const {
  int64_t nnz = 0;
  for (const Row& r : rows_) nnz += static_cast<int64_t>(r.terms.size());
  return nnz;
}

double LinearProgram::Evaluate(const std::vector<double>& x) const {
  double value = objective_offset_;
  for (int j = 0; j < num_columns(); ++j) value += columns_[j].objective * x[j];
  return value;
}

double LinearProgram::MaxPrimalViolation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_columns(); ++j) {
    worst = std::max(worst, columns_[j].lower - x[j]);
    worst = std::max(worst, x[j] - columns_[j].upper);
  }
  for (const Row& r : rows_) {
    double activity = 0.0;
    for (const Term& t : r.terms) activity += t.value * x[t.column];
    switch (r.relation) {
      case Relation::kLessEqual:
        worst = std::max(worst, activity - r.rhs);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, r.rhs - activity);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(activity - r.rhs));
        break;
    }
  }
  return worst;
}

void LinearProgram::Validate() const {
  for (int j = 0; j < num_columns(); ++j) {
    const Column& c = columns_[j];
    if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper) {
      throw std::invalid_argument("column " + std::to_string(j) +
                                  " has inconsistent bounds");
    }
    if (!std::isfinite(c.objective)) {
      throw std::invalid_argument("column " + std::to_string(j) +
                                  " has a non-finite objective coefficient");
    }
  }
  for (int i = 0; i < num_rows(); ++i) {
    const Row& r = rows_[i];
    if (!std::isfinite(r.rhs)) {
      throw std::invalid_argument("row " + std::to_string(i) +
                                  " has a non-finite rhs");
    }
    for (const Term& t : r.terms) {
      if (t.column < 0 || t.column >= num_columns()) {
        throw std::invalid_argument("row " + std::to_string(i) +
                                    " references unknown column " +
                                    std::to_string(t.column));
      }
      if (!std::isfinite(t.value)) {
        throw std::invalid_argument("row " + std::to_string(i) +
                                    " has a non-finite coefficient");
      }
    }
  }
}

int MilpProgram::AddBinary(double objective, std::string name) {
  const int j = lp.AddColumn(0.0, 1.0, objective, std::move(name));
  binaries.push_back(j);
  return j;
}

bool MilpProgram::IsBinary(int column) const {
  return std::find(binaries.begin(), binaries.end(), column) != binaries.end();
}

void MilpProgram::Validate() const {
  lp.Validate();
  for (int j : binaries) {
    if (j < 0 || j >= lp.num_columns()) {
      throw std::invalid_argument("binary index " + std::to_string(j) +
                                  " out of range");
    }
    const Column& c = lp.column(j);
    if (c.lower < 0.0 || c.upper > 1.0) {
      throw std::invalid_argument("binary column " + std::to_string(j) +
                                  " has bounds outside [0, 1]");
    }
  }
}

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kIterationLimit:
      return "iteration_limit";
    case SolveStatus::kNodeLimit:
      return "node_limit";
    case SolveStatus::kTimeLimit:
      return "time_limit";
    case SolveStatus::kError:
      return "error";
  }
  return "unknown";
}

}  // namespace gridfdi::solver
