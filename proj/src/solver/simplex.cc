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

#include "gridfdi/solver/simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace gridfdi::solver {
namespace {

constexpr double kDegenerateStep = 1e-12;

double NearestPowerOfTwo(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
  return std::exp2(std::round(std::log2(v)));
}

}  // namespace

SimplexSolver::SimplexSolver(const LinearProgram& lp, SimplexOptions options)
    : options_(options) {
  lp.Validate();
  n_ = lp.num_columns();
  m_ = lp.num_rows();
  sense_sign_ = lp.sense() == Sense::kMaximize ? -1.0 : 1.0;
  objective_offset_ = lp.objective_offset();
  objective_.resize(n_);
  for (int j = 0; j < n_; ++j) objective_[j] = lp.column(j).objective;
  iteration_limit_ = options_.iteration_limit > 0
                         ? options_.iteration_limit
                         : std::max<int64_t>(10000, 50LL * (m_ + n_));
  BuildScaledModel(lp);
  InitSlackBasis();
}

void SimplexSolver::BuildScaledModel(const LinearProgram& lp) {
  // Compressed column form of the unscaled matrix.
  std::vector<int> counts(n_ + 1, 0);
  for (const Row& r : lp.rows()) {
    for (const Term& t : r.terms) ++counts[t.column + 1];
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j + 1];
  row_index_.assign(col_start_[n_], 0);
  value_.assign(col_start_[n_], 0.0);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : lp.row(i).terms) {
      row_index_[fill[t.column]] = i;
      value_[fill[t.column]] = t.value;
      ++fill[t.column];
    }
  }

  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (options_.scale && !value_.empty()) {
    std::vector<double> rmin(m_), rmax(m_);
    for (int pass = 0; pass < 6; ++pass) {
      std::fill(rmin.begin(), rmin.end(), std::numeric_limits<double>::max());
      std::fill(rmax.begin(), rmax.end(), 0.0);
      for (int j = 0; j < n_; ++j) {
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
          const double a = std::abs(value_[k]) * col_scale_[j];
          const int i = row_index_[k];
          rmin[i] = std::min(rmin[i], a);
          rmax[i] = std::max(rmax[i], a);
        }
      }
      for (int i = 0; i < m_; ++i) {
        if (rmax[i] > 0.0) row_scale_[i] = 1.0 / std::sqrt(rmin[i] * rmax[i]);
      }
      for (int j = 0; j < n_; ++j) {
        double lo = std::numeric_limits<double>::max(), hi = 0.0;
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
          const double a = std::abs(value_[k]) * row_scale_[row_index_[k]];
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        if (hi > 0.0) col_scale_[j] = 1.0 / std::sqrt(lo * hi);
      }
    }
    for (double& s : row_scale_) s = NearestPowerOfTwo(s);
    for (double& s : col_scale_) s = NearestPowerOfTwo(s);
  }
  for (int j = 0; j < n_; ++j) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      value_[k] *= row_scale_[row_index_[k]] * col_scale_[j];
    }
  }

  const int total = n_ + m_;
  cost_.assign(total, 0.0);
  lower_.assign(total, 0.0);
  upper_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    const Column& c = lp.column(j);
    cost_[j] = sense_sign_ * c.objective * col_scale_[j];
    lower_[j] = c.lower / col_scale_[j];
    upper_[j] = c.upper / col_scale_[j];
  }
  for (int i = 0; i < m_; ++i) {
    const Row& r = lp.row(i);
    const double rhs = r.rhs * row_scale_[i];
    switch (r.relation) {
      case Relation::kLessEqual:
        lower_[n_ + i] = -kInfinity;
        upper_[n_ + i] = rhs;
        break;
      case Relation::kGreaterEqual:
        lower_[n_ + i] = rhs;
        upper_[n_ + i] = kInfinity;
        break;
      case Relation::kEqual:
        lower_[n_ + i] = rhs;
        upper_[n_ + i] = rhs;
        break;
    }
  }
}

void SimplexSolver::SnapNonbasic(int j) {
  const double lo = lower_[j], hi = upper_[j];
  switch (status_[j]) {
    case VarStatus::kAtLower:
      if (std::isfinite(lo)) {
        x_[j] = lo;
        return;
      }
      break;
    case VarStatus::kAtUpper:
      if (std::isfinite(hi)) {
        x_[j] = hi;
        return;
      }
      break;
    case VarStatus::kFree:
      if (!std::isfinite(lo) && !std::isfinite(hi)) return;
      break;
    case VarStatus::kBasic:
      return;
  }
  if (std::isfinite(lo) && std::isfinite(hi)) {
    status_[j] = std::abs(hi) < std::abs(lo) ? VarStatus::kAtUpper
                                             : VarStatus::kAtLower;
  } else if (std::isfinite(lo)) {
    status_[j] = VarStatus::kAtLower;
  } else if (std::isfinite(hi)) {
    status_[j] = VarStatus::kAtUpper;
  } else {
    status_[j] = VarStatus::kFree;
    x_[j] = 0.0;
    return;
  }
  x_[j] = status_[j] == VarStatus::kAtLower ? lo : hi;
}

void SimplexSolver::InitSlackBasis() {
  const int total = n_ + m_;
  x_.assign(total, 0.0);
  status_.assign(total, VarStatus::kAtLower);
  basis_pos_.assign(total, -1);
  head_.resize(m_);
  for (int j = 0; j < n_; ++j) {
    status_[j] = VarStatus::kFree;
    SnapNonbasic(j);
  }
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    basis_pos_[n_ + i] = i;
    status_[n_ + i] = VarStatus::kBasic;
  }
  binv_ = -Eigen::MatrixXd::Identity(m_, m_);
  pivots_since_refactor_ = 0;
  factor_valid_ = true;
  ComputeBasicValues();
}

bool SimplexSolver::Refactor() {
  pivots_since_refactor_ = 0;
  if (m_ == 0) {
    factor_valid_ = true;
    return true;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * m_);
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    if (j < n_) {
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
        triplets.emplace_back(row_index_[p], k, value_[p]);
      }
    } else {
      triplets.emplace_back(j - n_, k, -1.0);
    }
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(basis);
  if (lu.info() != Eigen::Success) {
    factor_valid_ = false;
    return false;
  }
  Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(m_, m_));
  if (lu.info() != Eigen::Success || !inv.allFinite()) {
    factor_valid_ = false;
    return false;
  }
  binv_ = std::move(inv);
  factor_valid_ = true;
  return true;
}

void SimplexSolver::ComputeBasicValues() {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      v[row_index_[p]] += value_[p] * x_[j];
    }
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    if (status_[j] != VarStatus::kBasic) v[i] -= x_[j];
  }
  const Eigen::VectorXd xb = -(binv_ * v);
  for (int k = 0; k < m_; ++k) x_[head_[k]] = xb[k];
}

void SimplexSolver::ComputeDuals(const std::vector<double>& basic_costs,
                                 Eigen::VectorXd& pi) const {
  const Eigen::Map<const Eigen::VectorXd> cb(basic_costs.data(), m_);
  pi.noalias() = binv_.transpose() * cb;
}

double SimplexSolver::ReducedCost(int j, const Eigen::VectorXd& pi,
                                  const std::vector<double>& costs) const {
  return costs[j] - RowDot(pi, j);
}

void SimplexSolver::Ftran(int j, Eigen::VectorXd& out) const {
  if (j >= n_) {
    out = -binv_.col(j - n_);
    return;
  }
  out.setZero(m_);
  for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
    out.noalias() += value_[p] * binv_.col(row_index_[p]);
  }
}

double SimplexSolver::RowDot(const Eigen::VectorXd& row, int j) const {
  if (j >= n_) return -row[j - n_];
  double s = 0.0;
  for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
    s += value_[p] * row[row_index_[p]];
  }
  return s;
}

void SimplexSolver::Pivot(int leaving_pos, int entering,
                          const Eigen::VectorXd& alpha) {
  const int leaving = head_[leaving_pos];
  const Eigen::RowVectorXd pivot_row =
      binv_.row(leaving_pos) / alpha[leaving_pos];
  Eigen::VectorXd eta = alpha;
  eta[leaving_pos] = 0.0;
  binv_.noalias() -= eta * pivot_row;
  binv_.row(leaving_pos) = pivot_row;

  head_[leaving_pos] = entering;
  basis_pos_[entering] = leaving_pos;
  basis_pos_[leaving] = -1;
  status_[entering] = VarStatus::kBasic;

  if (++pivots_since_refactor_ >= options_.refactor_interval) {
    if (Refactor()) {
      ComputeBasicValues();
    } else {
      InitSlackBasis();
    }
  }
}

bool SimplexSolver::IsBasicFeasible() const {
  const double tol = options_.primal_tolerance;
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    if (x_[j] < lower_[j] - tol || x_[j] > upper_[j] + tol) return false;
  }
  return true;
}

bool SimplexSolver::IsDualFeasible(const Eigen::VectorXd& pi) const {
  const double tol = options_.dual_tolerance;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    if (lower_[j] == upper_[j]) continue;
    const double d = ReducedCost(j, pi, cost_);
    if (status_[j] == VarStatus::kAtLower && d < -tol) return false;
    if (status_[j] == VarStatus::kAtUpper && d > tol) return false;
    if (status_[j] == VarStatus::kFree && std::abs(d) > tol) return false;
  }
  return true;
}

SimplexSolver::Outcome SimplexSolver::RunPrimal() {
  const double ptol = options_.primal_tolerance;
  const double dtol = options_.dual_tolerance;
  const int total = n_ + m_;
  const int64_t degenerate_cap = 2LL * total;
  int64_t degenerate_run = 0;
  bool bland = false;

  std::vector<double> basic_costs(m_);
  std::vector<double> phase1_costs(total, 0.0);
  Eigen::VectorXd pi(m_), alpha(m_);

  while (true) {
    if (iterations_this_solve_ >= iteration_limit_) {
      return Outcome::kIterationLimit;
    }
    bool phase1 = false;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (x_[j] < lower_[j] - ptol) {
        basic_costs[k] = -1.0;
        phase1 = true;
      } else if (x_[j] > upper_[j] + ptol) {
        basic_costs[k] = 1.0;
        phase1 = true;
      } else {
        basic_costs[k] = 0.0;
      }
    }
    if (!phase1) {
      for (int k = 0; k < m_; ++k) basic_costs[k] = cost_[head_[k]];
    }
    ComputeDuals(basic_costs, pi);
    const std::vector<double>& costs = phase1 ? phase1_costs : cost_;

    int entering = -1;
    double entering_d = 0.0;
    double best_score = 0.0;
    for (int j = 0; j < total; ++j) {
      const VarStatus s = status_[j];
      if (s == VarStatus::kBasic || lower_[j] == upper_[j]) continue;
      const double d = ReducedCost(j, pi, costs);
      bool eligible = false;
      if (s == VarStatus::kAtLower) {
        eligible = d < -dtol;
      } else if (s == VarStatus::kAtUpper) {
        eligible = d > dtol;
      } else {
        eligible = std::abs(d) > dtol;
      }
      if (!eligible) continue;
      if (bland) {
        entering = j;
        entering_d = d;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        entering_d = d;
      }
    }
    if (entering < 0) {
      return phase1 ? Outcome::kInfeasible : Outcome::kOptimal;
    }

    const double dir = entering_d < 0.0 ? 1.0 : -1.0;
    Ftran(entering, alpha);

    // Harris two-pass ratio test. rate = d x_B / dt for t >= 0.
    double relaxed_max = kInfinity;
    for (int k = 0; k < m_; ++k) {
      const double a = alpha[k];
      if (std::abs(a) < options_.pivot_tolerance) continue;
      const int j = head_[k];
      const double rate = -dir * a;
      const double xj = x_[j];
      double relaxed = kInfinity;
      if (rate < 0.0) {
        if (xj > upper_[j] + ptol) {
          relaxed = (xj - upper_[j] + ptol) / -rate;
        } else if (xj >= lower_[j] - ptol && std::isfinite(lower_[j])) {
          relaxed = (xj - lower_[j] + ptol) / -rate;
        }
      } else {
        if (xj < lower_[j] - ptol) {
          relaxed = (lower_[j] - xj + ptol) / rate;
        } else if (xj <= upper_[j] + ptol && std::isfinite(upper_[j])) {
          relaxed = (upper_[j] - xj + ptol) / rate;
        }
      }
      relaxed_max = std::min(relaxed_max, relaxed);
    }
    int leaving_pos = -1;
    double step = kInfinity;
    double leaving_bound = 0.0;
    double best_pivot = 0.0;
    for (int k = 0; k < m_; ++k) {
      const double a = alpha[k];
      if (std::abs(a) < options_.pivot_tolerance) continue;
      const int j = head_[k];
      const double rate = -dir * a;
      const double xj = x_[j];
      double exact = kInfinity;
      double bound = 0.0;
      if (rate < 0.0) {
        if (xj > upper_[j] + ptol) {
          exact = (xj - upper_[j]) / -rate;
          bound = upper_[j];
        } else if (xj >= lower_[j] - ptol && std::isfinite(lower_[j])) {
          exact = (xj - lower_[j]) / -rate;
          bound = lower_[j];
        }
      } else {
        if (xj < lower_[j] - ptol) {
          exact = (lower_[j] - xj) / rate;
          bound = lower_[j];
        } else if (xj <= upper_[j] + ptol && std::isfinite(upper_[j])) {
          exact = (upper_[j] - xj) / rate;
          bound = upper_[j];
        }
      }
      if (!std::isfinite(exact)) continue;
      if (bland) {
        if (exact < step - kDegenerateStep ||
            (exact <= step + kDegenerateStep && leaving_pos >= 0 &&
             j < head_[leaving_pos])) {
          step = exact;
          leaving_pos = k;
          leaving_bound = bound;
        }
      } else if (exact <= relaxed_max && std::abs(a) > best_pivot) {
        best_pivot = std::abs(a);
        step = exact;
        leaving_pos = k;
        leaving_bound = bound;
      }
    }
    const double flip = upper_[entering] - lower_[entering];
    const bool can_flip = std::isfinite(flip);
    if (leaving_pos < 0 && !can_flip) {
      // Phase 1 objective is bounded below, so this only happens in phase 2.
      return phase1 ? Outcome::kInfeasible : Outcome::kUnbounded;
    }
    ++iterations_this_solve_;
    ++total_iterations_;
    step = std::max(step, 0.0);

    if (can_flip && (leaving_pos < 0 || flip <= step)) {
      for (int k = 0; k < m_; ++k) x_[head_[k]] -= dir * flip * alpha[k];
      if (status_[entering] == VarStatus::kAtLower) {
        status_[entering] = VarStatus::kAtUpper;
        x_[entering] = upper_[entering];
      } else {
        status_[entering] = VarStatus::kAtLower;
        x_[entering] = lower_[entering];
      }
      degenerate_run = 0;
      bland = false;
      continue;
    }

    if (step <= kDegenerateStep) {
      if (++degenerate_run > degenerate_cap) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    for (int k = 0; k < m_; ++k) x_[head_[k]] -= dir * step * alpha[k];
    x_[entering] += dir * step;
    const int leaving = head_[leaving_pos];
    x_[leaving] = leaving_bound;
    status_[leaving] = (leaving_bound == lower_[leaving]) ? VarStatus::kAtLower
                                                          : VarStatus::kAtUpper;
    Pivot(leaving_pos, entering, alpha);
  }
}

SimplexSolver::Outcome SimplexSolver::RunDual() {
  const double ptol = options_.primal_tolerance;
  const double dtol = options_.dual_tolerance;
  const int total = n_ + m_;
  const int64_t degenerate_cap = 2LL * total;
  int64_t degenerate_run = 0;
  bool bland = false;

  std::vector<double> basic_costs(m_);
  Eigen::VectorXd pi(m_), alpha(m_), row(m_);
  std::vector<double> row_alpha(total, 0.0), reduced(total, 0.0);

  while (true) {
    if (iterations_this_solve_ >= iteration_limit_) {
      return Outcome::kIterationLimit;
    }
    int leaving_pos = -1;
    double worst = ptol;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      const double inf = std::max(lower_[j] - x_[j], x_[j] - upper_[j]);
      if (inf <= ptol) continue;
      if (bland) {
        if (leaving_pos < 0 || j < head_[leaving_pos]) leaving_pos = k;
      } else if (inf > worst) {
        worst = inf;
        leaving_pos = k;
      }
    }
    if (leaving_pos < 0) return Outcome::kOptimal;

    const int leaving = head_[leaving_pos];
    const bool to_lower = x_[leaving] < lower_[leaving];
    row = binv_.row(leaving_pos).transpose();
    for (int k = 0; k < m_; ++k) basic_costs[k] = cost_[head_[k]];
    ComputeDuals(basic_costs, pi);

    double relaxed_max = kInfinity;
    for (int j = 0; j < total; ++j) {
      row_alpha[j] = 0.0;
      const VarStatus s = status_[j];
      if (s == VarStatus::kBasic || lower_[j] == upper_[j]) continue;
      const double a = RowDot(row, j);
      if (std::abs(a) < options_.pivot_tolerance) continue;
      bool candidate;
      if (s == VarStatus::kFree) {
        candidate = true;
      } else if (to_lower) {
        candidate = (s == VarStatus::kAtLower) ? a < 0.0 : a > 0.0;
      } else {
        candidate = (s == VarStatus::kAtLower) ? a > 0.0 : a < 0.0;
      }
      if (!candidate) continue;
      row_alpha[j] = a;
      const double d = ReducedCost(j, pi, cost_);
      double slack;
      if (s == VarStatus::kAtLower) {
        slack = std::max(d, 0.0);
      } else if (s == VarStatus::kAtUpper) {
        slack = std::max(-d, 0.0);
      } else {
        slack = std::abs(d);
      }
      reduced[j] = slack;
      relaxed_max = std::min(relaxed_max, (slack + dtol) / std::abs(a));
    }
    int entering = -1;
    double best_pivot = 0.0;
    double best_ratio = kInfinity;
    for (int j = 0; j < total; ++j) {
      const double a = row_alpha[j];
      if (a == 0.0) continue;
      const double ratio = reduced[j] / std::abs(a);
      if (bland) {
        if (ratio < best_ratio - kDegenerateStep) {
          best_ratio = ratio;
          entering = j;
        }
      } else if (ratio <= relaxed_max && std::abs(a) > best_pivot) {
        best_pivot = std::abs(a);
        best_ratio = ratio;
        entering = j;
      }
    }
    if (entering < 0) return Outcome::kInfeasible;
    ++iterations_this_solve_;
    ++total_iterations_;

    if (best_ratio <= kDegenerateStep) {
      if (++degenerate_run > degenerate_cap) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    Ftran(entering, alpha);
    if (std::abs(alpha[leaving_pos]) < options_.pivot_tolerance) {
      // The row and column computations disagree; refresh the factorization.
      if (!Refactor()) InitSlackBasis();
      ComputeBasicValues();
      return Outcome::kIterationLimit;
    }
    const double target = to_lower ? lower_[leaving] : upper_[leaving];
    const double delta = (x_[leaving] - target) / alpha[leaving_pos];
    for (int k = 0; k < m_; ++k) x_[head_[k]] -= alpha[k] * delta;
    x_[entering] += delta;
    x_[leaving] = target;
    status_[leaving] = to_lower ? VarStatus::kAtLower : VarStatus::kAtUpper;
    Pivot(leaving_pos, entering, alpha);
  }
}

SolveResult SimplexSolver::Finish(Outcome outcome) {
  // Re-verify optimality on a fresh factorization; product-form drift can
  // leave small violations behind.
  for (int attempt = 0; attempt < 3 && outcome == Outcome::kOptimal;
       ++attempt) {
    if (!Refactor()) InitSlackBasis();
    ComputeBasicValues();
    std::vector<double> basic_costs(m_);
    for (int k = 0; k < m_; ++k) basic_costs[k] = cost_[head_[k]];
    Eigen::VectorXd pi(m_);
    ComputeDuals(basic_costs, pi);
    if (IsBasicFeasible() && IsDualFeasible(pi)) break;
    outcome = RunPrimal();
  }

  SolveResult result;
  result.backend = "native";
  result.iterations = iterations_this_solve_;
  switch (outcome) {
    case Outcome::kOptimal:
      result.status = SolveStatus::kOptimal;
      break;
    case Outcome::kInfeasible:
      result.status = SolveStatus::kInfeasible;
      return result;
    case Outcome::kUnbounded:
      result.status = SolveStatus::kUnbounded;
      return result;
    case Outcome::kIterationLimit:
      result.status = SolveStatus::kIterationLimit;
      break;
  }

  result.primal.resize(n_);
  double objective = objective_offset_;
  for (int j = 0; j < n_; ++j) {
    const double v = x_[j] * col_scale_[j];
    result.primal[j] = v;
    objective += objective_[j] * v;
  }
  result.objective = objective;

  std::vector<double> basic_costs(m_);
  for (int k = 0; k < m_; ++k) basic_costs[k] = cost_[head_[k]];
  Eigen::VectorXd pi(m_);
  ComputeDuals(basic_costs, pi);
  result.row_duals.resize(m_);
  for (int i = 0; i < m_; ++i) {
    result.row_duals[i] = sense_sign_ * pi[i] * row_scale_[i];
  }
  result.reduced_costs.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    result.reduced_costs[j] =
        sense_sign_ * ReducedCost(j, pi, cost_) / col_scale_[j];
  }
  return result;
}

SolveResult SimplexSolver::Solve() {
  iterations_this_solve_ = 0;
  if (!factor_valid_ && !Refactor()) InitSlackBasis();
  ComputeBasicValues();
  return Finish(RunPrimal());
}

SolveResult SimplexSolver::Resolve() {
  iterations_this_solve_ = 0;
  if (!factor_valid_ && !Refactor()) InitSlackBasis();
  ComputeBasicValues();
  std::vector<double> basic_costs(m_);
  for (int k = 0; k < m_; ++k) basic_costs[k] = cost_[head_[k]];
  Eigen::VectorXd pi(m_);
  ComputeDuals(basic_costs, pi);
  if (!IsDualFeasible(pi)) return Finish(RunPrimal());
  Outcome outcome = RunDual();
  if (outcome == Outcome::kIterationLimit &&
      iterations_this_solve_ < iteration_limit_) {
    // Numerical trouble inside the dual loop; finish with the primal method.
    outcome = RunPrimal();
  }
  if (outcome == Outcome::kOptimal) outcome = RunPrimal();
  return Finish(outcome);
}

void SimplexSolver::SetColumnBounds(int column, double lower, double upper) {
  lower_[column] = lower / col_scale_[column];
  upper_[column] = upper / col_scale_[column];
  if (status_[column] != VarStatus::kBasic) SnapNonbasic(column);
}

double SimplexSolver::column_lower(int column) const {
  return lower_[column] * col_scale_[column];
}

double SimplexSolver::column_upper(int column) const {
  return upper_[column] * col_scale_[column];
}

void SimplexSolver::SetBasis(const Basis& basis) {
  if (static_cast<int>(basis.size()) != n_ + m_) {
    InitSlackBasis();
    return;
  }
  int basic = 0;
  for (VarStatus s : basis) basic += s == VarStatus::kBasic;
  if (basic != m_) {
    InitSlackBasis();
    return;
  }
  status_ = basis;
  std::fill(basis_pos_.begin(), basis_pos_.end(), -1);
  int k = 0;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::kBasic) {
      head_[k] = j;
      basis_pos_[j] = k++;
    } else {
      SnapNonbasic(j);
    }
  }
  if (!Refactor()) {
    InitSlackBasis();
    return;
  }
  ComputeBasicValues();
}

SimplexSolver::State SimplexSolver::SaveState() const {
  return State{status_, head_,  x_, lower_, upper_,
               binv_,   pivots_since_refactor_};
}

void SimplexSolver::LoadState(const State& state) {
  status_ = state.status;
  head_ = state.head;
  x_ = state.x;
  lower_ = state.lower;
  upper_ = state.upper;
  binv_ = state.binv;
  pivots_since_refactor_ = state.pivots_since_refactor;
  std::fill(basis_pos_.begin(), basis_pos_.end(), -1);
  for (int k = 0; k < m_; ++k) basis_pos_[head_[k]] = k;
  factor_valid_ = true;
}

SolveResult SolveLpNative(const LinearProgram& lp,
                          const SimplexOptions& options) {
  SimplexSolver solver(lp, options);
  return solver.Solve();
}

}  // namespace gridfdi::solver
