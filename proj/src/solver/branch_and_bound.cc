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

#include "gridfdi/solver/branch_and_bound.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <utility>
#include <vector>

namespace gridfdi::solver {
namespace {

constexpr size_t kStateCacheSize = 4;

struct Node {
  int64_t id = 0;
  // Upper bound on the (sense-adjusted) objective of this subtree.
  double bound = 0.0;
  int depth = 0;
  // Per binary: -1 free, otherwise the fixed value.
  std::vector<int8_t> fixing;
  SimplexSolver::Basis basis;
  int branch_binary = -1;  // index into the binaries list
};

struct NodeOrder {
  bool operator()(const std::unique_ptr<Node>& a,
                  const std::unique_ptr<Node>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->id < b->id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpProgram& milp, const MilpOptions& options)
      : milp_(milp),
        options_(options),
        solver_(milp.lp, options.lp),
        sign_(milp.lp.sense() == Sense::kMaximize ? 1.0 : -1.0),
        start_(std::chrono::steady_clock::now()) {
    for (size_t b = 0; b < milp.binaries.size(); ++b) {
      binary_index_[milp.binaries[b]] = static_cast<int>(b);
    }
  }

  SolveResult Run();

 private:
  // Returns the most fractional binary (index into binaries) or -1.
  int SelectBranch(const std::vector<double>& x) const;
  void OfferIncumbent(const std::vector<double>& x, double objective);
  void TryHeuristic(const std::vector<double>& relaxation);
  // Solves the LP at the solver's current bounds; pushes the node if it
  // survives pruning.
  void Evaluate(std::unique_ptr<Node> node, const SolveResult& lp);
  void PrepareSolver(const Node& node);
  void CacheState(int64_t id);
  bool OutOfTime() const;
  double Elapsed() const;
  SolveResult Polish(SolveResult result) const;

  const MilpProgram& milp_;
  const MilpOptions& options_;
  SimplexSolver solver_;
  double sign_;
  std::chrono::steady_clock::time_point start_;
  std::map<int, int> binary_index_;  // column -> index into binaries

  std::set<std::unique_ptr<Node>, NodeOrder> open_;
  std::deque<std::pair<int64_t, SimplexSolver::State>> cache_;
  int64_t next_id_ = 0;
  // Children created at or after this id belong to the latest expansion.
  int64_t plunge_from_ = 0;
  int64_t nodes_ = 0;
  int64_t lp_iterations_ = 0;
  double incumbent_score_ = -kInfinity;
  std::vector<double> incumbent_;
};

double BranchAndBound::Elapsed() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start_)
      .count();
}

bool BranchAndBound::OutOfTime() const {
  return std::isfinite(options_.time_limit_seconds) &&
         Elapsed() > options_.time_limit_seconds;
}

int BranchAndBound::SelectBranch(const std::vector<double>& x) const {
  auto fractional = [&](int column) {
    const double frac = x[column] - std::floor(x[column]);
    return frac > options_.integrality_tolerance &&
           frac < 1.0 - options_.integrality_tolerance;
  };
  if (options_.branching) {
    const int column = options_.branching(x);
    if (column >= 0 && column < static_cast<int>(x.size()) &&
        fractional(column)) {
      auto it = binary_index_.find(column);
      if (it != binary_index_.end()) return it->second;
    }
  }
  int best = -1;
  double best_distance = kInfinity;
  int best_column = 0;
  for (size_t b = 0; b < milp_.binaries.size(); ++b) {
    const int j = milp_.binaries[b];
    const double v = x[j];
    const double frac = v - std::floor(v);
    if (frac <= options_.integrality_tolerance ||
        frac >= 1.0 - options_.integrality_tolerance) {
      continue;
    }
    const double distance = std::abs(frac - 0.5);
    if (best < 0 || distance < best_distance ||
        (distance == best_distance && j < best_column)) {
      best = static_cast<int>(b);
      best_distance = distance;
      best_column = j;
    }
  }
  return best;
}

void BranchAndBound::OfferIncumbent(const std::vector<double>& x,
                                    double objective) {
  const double score = sign_ * objective;
  if (score > incumbent_score_) {
    incumbent_score_ = score;
    incumbent_ = x;
  }
}

void BranchAndBound::TryHeuristic(const std::vector<double>& relaxation) {
  if (!options_.heuristic) return;
  std::optional<std::vector<double>> proposal = options_.heuristic(relaxation);
  if (!proposal || static_cast<int>(proposal->size()) !=
                       milp_.lp.num_columns()) {
    return;
  }
  std::vector<double>& x = *proposal;
  for (int j : milp_.binaries) {
    const double r = std::round(x[j]);
    if (std::abs(x[j] - r) > options_.integrality_tolerance) return;
    x[j] = r;
  }
  if (milp_.lp.MaxPrimalViolation(x) > 10.0 * options_.lp.primal_tolerance) {
    return;
  }
  OfferIncumbent(x, milp_.lp.Evaluate(x));
}

void BranchAndBound::CacheState(int64_t id) {
  if (cache_.size() >= kStateCacheSize) cache_.pop_front();
  cache_.emplace_back(id, solver_.SaveState());
}

void BranchAndBound::PrepareSolver(const Node& node) {
  for (auto it = cache_.begin(); it != cache_.end(); ++it) {
    if (it->first == node.id) {
      solver_.LoadState(it->second);
      return;
    }
  }
  for (size_t b = 0; b < milp_.binaries.size(); ++b) {
    const int j = milp_.binaries[b];
    const Column& c = milp_.lp.column(j);
    if (node.fixing[b] < 0) {
      solver_.SetColumnBounds(j, c.lower, c.upper);
    } else {
      solver_.SetColumnBounds(j, node.fixing[b], node.fixing[b]);
    }
  }
  solver_.SetBasis(node.basis);
}

void BranchAndBound::Evaluate(std::unique_ptr<Node> node,
                              const SolveResult& lp) {
  ++nodes_;
  lp_iterations_ += lp.iterations;
  if (lp.status != SolveStatus::kOptimal) return;
  node->bound = sign_ * lp.objective;
  if (node->bound <= incumbent_score_ + options_.gap_tolerance) return;
  const int branch = SelectBranch(lp.primal);
  if (branch < 0) {
    OfferIncumbent(lp.primal, lp.objective);
    return;
  }
  TryHeuristic(lp.primal);
  if (node->bound <= incumbent_score_ + options_.gap_tolerance) return;
  node->branch_binary = branch;
  node->basis = solver_.GetBasis();
  CacheState(node->id);
  open_.insert(std::move(node));
}

SolveResult BranchAndBound::Polish(SolveResult result) const {
  if (!options_.polish || incumbent_.empty()) return result;
  LinearProgram fixed = milp_.lp;
  for (int j : milp_.binaries) {
    const double v = std::round(incumbent_[j]);
    fixed.SetBounds(j, v, v);
  }
  SolveResult lp = SolveLpNative(fixed, options_.lp);
  if (lp.status != SolveStatus::kOptimal) return result;
  if (sign_ * lp.objective < sign_ * result.objective - options_.gap_tolerance) {
    return result;
  }
  result.primal = std::move(lp.primal);
  result.row_duals = std::move(lp.row_duals);
  result.reduced_costs = std::move(lp.reduced_costs);
  result.objective = lp.objective;
  result.iterations += lp.iterations;
  return result;
}

SolveResult BranchAndBound::Run() {
  SolveResult result;
  result.backend = "native";
  const int nbin = static_cast<int>(milp_.binaries.size());

  SolveResult root = solver_.Solve();
  auto root_node = std::make_unique<Node>();
  root_node->id = next_id_++;
  root_node->fixing.assign(nbin, -1);
  if (root.status == SolveStatus::kUnbounded) {
    result.status = SolveStatus::kUnbounded;
    result.nodes = 1;
    return result;
  }
  if (root.status == SolveStatus::kOptimal) TryHeuristic(root.primal);
  Evaluate(std::move(root_node), root);
  if (root.status == SolveStatus::kIterationLimit) {
    result.status = SolveStatus::kIterationLimit;
    result.nodes = nodes_;
    return result;
  }

  SolveStatus limit = SolveStatus::kOptimal;
  while (!open_.empty()) {
    if ((*open_.begin())->bound <= incumbent_score_ + options_.gap_tolerance) {
      open_.clear();
      break;
    }
    if (nodes_ >= options_.node_limit) {
      limit = SolveStatus::kNodeLimit;
      break;
    }
    if (OutOfTime()) {
      limit = SolveStatus::kTimeLimit;
      break;
    }
    // Plunge into the better surviving child of the last expansion, whose
    // factorization is still cached; otherwise take the best open node.
    auto pick = open_.begin();
    for (auto it = open_.begin(); it != open_.end(); ++it) {
      if ((*it)->id >= plunge_from_) {
        pick = it;
        break;
      }
    }
    auto handle = open_.extract(pick);
    std::unique_ptr<Node> parent = std::move(handle.value());
    plunge_from_ = next_id_;
    PrepareSolver(*parent);
    const SimplexSolver::State parent_state = solver_.SaveState();
    const int b = parent->branch_binary;
    const int column = milp_.binaries[b];

    for (int value = 0; value <= 1; ++value) {
      if (value == 1) solver_.LoadState(parent_state);
      solver_.SetColumnBounds(column, value, value);
      auto child = std::make_unique<Node>();
      child->id = next_id_++;
      child->depth = parent->depth + 1;
      child->fixing = parent->fixing;
      child->fixing[b] = static_cast<int8_t>(value);
      SolveResult lp = solver_.Resolve();
      Evaluate(std::move(child), lp);
    }
  }

  result.nodes = nodes_;
  result.iterations = lp_iterations_;
  double bound = incumbent_score_;
  for (const auto& node : open_) bound = std::max(bound, node->bound);
  if (incumbent_.empty()) {
    result.status = limit == SolveStatus::kOptimal ? SolveStatus::kInfeasible
                                                   : limit;
    if (limit != SolveStatus::kOptimal) result.best_bound = sign_ * bound;
    return result;
  }
  result.status = limit;
  result.primal = incumbent_;
  result.objective = milp_.lp.Evaluate(incumbent_);
  result.best_bound = sign_ * bound;
  result.gap = bound - incumbent_score_;
  return Polish(std::move(result));
}

}  // namespace

SolveResult SolveMilpNative(const MilpProgram& milp,
                            const MilpOptions& options) {
  milp.Validate();
  BranchAndBound bb(milp, options);
  return bb.Run();
}

}  // namespace gridfdi::solver
