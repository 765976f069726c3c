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

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gridfdi/solver/backend.h"
#include "gridfdi/solver/branch_and_bound.h"
#include "gridfdi/solver/linear_program.h"
#include "gridfdi/solver/mps_writer.h"
#include "gridfdi/solver/simplex.h"

namespace gridfdi::solver {
namespace {

TEST(SimplexTest, SingleBoundedVariable) {
  LinearProgram lp(Sense::kMaximize);
  const int x = lp.AddColumn(0, kInfinity, 1.0);
  lp.AddRow({{x, 1.0}}, Relation::kLessEqual, 3.0);
  SolveResult r = SolveLpNative(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-9);
  EXPECT_NEAR(r.primal[0], 3.0, 1e-9);
  EXPECT_NEAR(r.row_duals[0], 1.0, 1e-9);
}

TEST(SimplexTest, MinimizationDualSign) {
  // min x s.t. x >= 2: raising the rhs raises the objective.
  LinearProgram lp(Sense::kMinimize);
  const int x = lp.AddColumn(-kInfinity, kInfinity, 1.0);
  lp.AddRow({{x, 1.0}}, Relation::kGreaterEqual, 2.0);
  SolveResult r = SolveLpNative(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-9);
  EXPECT_NEAR(r.row_duals[0], 1.0, 1e-9);
}

TEST(SimplexTest, ReducedCostOfActiveBound) {
  // max 2x + y, x in [0, 4], x + y <= 10, y <= 3.
  LinearProgram lp(Sense::kMaximize);
  const int x = lp.AddColumn(0, 4, 2.0);
  const int y = lp.AddColumn(0, kInfinity, 1.0);
  lp.AddRow({{x, 1}, {y, 1}}, Relation::kLessEqual, 10);
  lp.AddRow({{y, 1}}, Relation::kLessEqual, 3);
  SolveResult r = SolveLpNative(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 11.0, 1e-9);
  EXPECT_NEAR(r.row_duals[0], 0.0, 1e-9);
  EXPECT_NEAR(r.row_duals[1], 1.0, 1e-9);
  EXPECT_NEAR(r.reduced_costs[x], 2.0, 1e-9);
}

TEST(SimplexTest, Infeasible) {
  LinearProgram lp;
  const int x = lp.AddColumn(-kInfinity, kInfinity, 1.0);
  lp.AddRow({{x, 1}}, Relation::kLessEqual, 1);
  lp.AddRow({{x, 1}}, Relation::kGreaterEqual, 2);
  EXPECT_EQ(SolveLpNative(lp).status, SolveStatus::kInfeasible);
}

TEST(SimplexTest, Unbounded) {
  LinearProgram lp(Sense::kMaximize);
  const int x = lp.AddColumn(0, kInfinity, 1.0);
  const int y = lp.AddColumn(0, kInfinity, 0.0);
  lp.AddRow({{x, 1}, {y, -1}}, Relation::kLessEqual, 1);
  EXPECT_EQ(SolveLpNative(lp).status, SolveStatus::kUnbounded);
}

TEST(SimplexTest, EqualityWithFreeVariables) {
  // min x^+ style: min |a| via a = p - n, p, n >= 0, a = -5.
  LinearProgram lp;
  const int a = lp.AddColumn(-kInfinity, kInfinity, 0.0);
  const int p = lp.AddColumn(0, kInfinity, 1.0);
  const int n = lp.AddColumn(0, kInfinity, 1.0);
  lp.AddRow({{a, 1}, {p, -1}, {n, 1}}, Relation::kEqual, 0);
  lp.AddRow({{a, 1}}, Relation::kEqual, -5);
  SolveResult r = SolveLpNative(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 5.0, 1e-9);
  EXPECT_NEAR(r.primal[a], -5.0, 1e-9);
  EXPECT_NEAR(r.row_duals[1], -1.0, 1e-9);
}

TEST(SimplexTest, ObjectiveOffsetIncluded) {
  LinearProgram lp(Sense::kMaximize);
  const int x = lp.AddColumn(0, 2, 1.0);
  lp.SetObjectiveOffset(10);
  SolveResult r = SolveLpNative(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 12.0, 1e-9);
  EXPECT_NEAR(r.primal[x], 2.0, 1e-9);
}

TEST(SimplexTest, ValidateRejectsBadInput) {
  LinearProgram lp;
  lp.AddColumn(1, 0, 0);
  EXPECT_THROW(lp.Validate(), std::invalid_argument);
  LinearProgram nan_rhs;
  const int x = nan_rhs.AddColumn(0, 1, 0);
  nan_rhs.AddRow({{x, 1}}, Relation::kLessEqual, std::nan(""));
  EXPECT_THROW(nan_rhs.Validate(), std::invalid_argument);
}

// Vertex enumeration over every pair of active constraints for a
// two-variable LP with box bounds.
double EnumerateTwoVariable(const std::vector<std::array<double, 3>>& rows,
                            double bx, double by, double cx, double cy,
                            bool* feasible) {
  std::vector<std::array<double, 3>> all = rows;
  all.push_back({1, 0, bx});
  all.push_back({0, 1, by});
  all.push_back({-1, 0, 0});
  all.push_back({0, -1, 0});
  double best = -kInfinity;
  *feasible = false;
  for (size_t i = 0; i < all.size(); ++i) {
    for (size_t k = i + 1; k < all.size(); ++k) {
      const double det = all[i][0] * all[k][1] - all[i][1] * all[k][0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (all[i][2] * all[k][1] - all[i][1] * all[k][2]) / det;
      const double y = (all[i][0] * all[k][2] - all[i][2] * all[k][0]) / det;
      bool ok = true;
      for (const auto& r : all) {
        if (r[0] * x + r[1] * y > r[2] + 1e-9) ok = false;
      }
      if (!ok) continue;
      *feasible = true;
      best = std::max(best, cx * x + cy * y);
    }
  }
  return best;
}

TEST(SimplexTest, RandomTwoVariableAgainstVertexEnumeration) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-3, 3);
  std::uniform_real_distribution<double> rhs(-1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::array<double, 3>> rows(4);
    for (auto& r : rows) r = {coef(rng), coef(rng), rhs(rng)};
    const double cx = coef(rng), cy = coef(rng);
    LinearProgram lp(Sense::kMaximize);
    lp.AddColumn(0, 5, cx);
    lp.AddColumn(0, 7, cy);
    for (const auto& r : rows) {
      lp.AddRow({{0, r[0]}, {1, r[1]}}, Relation::kLessEqual, r[2]);
    }
    bool feasible = false;
    const double expect = EnumerateTwoVariable(rows, 5, 7, cx, cy, &feasible);
    SolveResult r = SolveLpNative(lp);
    if (!feasible) {
      EXPECT_EQ(r.status, SolveStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, expect, 1e-7) << "trial " << trial;
  }
}

// Builds a random feasible LP and checks primal feasibility and strong
// duality: objective == sum(rhs * dual) + sum(bound * reduced cost).
TEST(SimplexTest, RandomStrongDuality) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 12, m = 9;
    std::vector<double> x0(n);
    for (double& v : x0) v = 2.0 * std::abs(u(rng));
    LinearProgram lp(trial % 2 ? Sense::kMaximize : Sense::kMinimize);
    for (int j = 0; j < n; ++j) lp.AddColumn(0, 3, u(rng));
    for (int i = 0; i < m; ++i) {
      std::vector<Term> terms;
      double ax = 0;
      for (int j = 0; j < n; ++j) {
        if (u(rng) > 0.3) continue;
        const double a = u(rng);
        terms.push_back({j, a});
        ax += a * x0[j];
      }
      const Relation rel = i % 3 == 0   ? Relation::kEqual
                           : i % 3 == 1 ? Relation::kLessEqual
                                        : Relation::kGreaterEqual;
      const double slack = rel == Relation::kEqual       ? 0.0
                           : rel == Relation::kLessEqual ? 0.5
                                                         : -0.5;
      lp.AddRow(terms, rel, ax + slack);
    }
    SolveResult r = SolveLpNative(lp);
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << trial;
    EXPECT_LT(lp.MaxPrimalViolation(r.primal), 1e-7);
    double dual_objective = 0;
    for (int i = 0; i < m; ++i) dual_objective += lp.row(i).rhs * r.row_duals[i];
    for (int j = 0; j < n; ++j) {
      if (r.reduced_costs[j] == 0.0) continue;
      const double at = std::abs(r.primal[j] - lp.column(j).lower) <
                                std::abs(r.primal[j] - lp.column(j).upper)
                            ? lp.column(j).lower
                            : lp.column(j).upper;
      dual_objective += at * r.reduced_costs[j];
    }
    EXPECT_NEAR(r.objective, dual_objective, 1e-7) << trial;
    // Row duals must have the sign implied by the relation.
    const double s = lp.sense() == Sense::kMaximize ? 1.0 : -1.0;
    for (int i = 0; i < m; ++i) {
      if (lp.row(i).relation == Relation::kLessEqual) {
        EXPECT_GE(s * r.row_duals[i], -1e-9);
      } else if (lp.row(i).relation == Relation::kGreaterEqual) {
        EXPECT_LE(s * r.row_duals[i], 1e-9);
      }
    }
  }
}

TEST(SimplexTest, WarmResolveMatchesColdSolve) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  LinearProgram lp(Sense::kMaximize);
  const int n = 10;
  for (int j = 0; j < n; ++j) lp.AddColumn(0, 1, u(rng));
  for (int i = 0; i < 5; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) terms.push_back({j, u(rng)});
    lp.AddRow(terms, Relation::kLessEqual, 2.0);
  }
  SimplexSolver solver(lp);
  ASSERT_TRUE(solver.Solve().ok());
  for (int j = 0; j < n; j += 3) {
    solver.SetColumnBounds(j, 0, 0);
    lp.SetBounds(j, 0, 0);
    SolveResult warm = solver.Resolve();
    SolveResult cold = SolveLpNative(lp);
    ASSERT_TRUE(warm.ok());
    ASSERT_TRUE(cold.ok());
    EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
  }
}

TEST(MilpTest, Knapsack) {
  MilpProgram milp;
  milp.lp.SetSense(Sense::kMaximize);
  const int a = milp.AddBinary(3.0);
  const int b = milp.AddBinary(2.0);
  milp.lp.AddRow({{a, 1}, {b, 1}}, Relation::kLessEqual, 1);
  SolveResult r = SolveMilpNative(milp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-9);
  EXPECT_NEAR(r.primal[a], 1.0, 1e-9);
  EXPECT_NEAR(r.primal[b], 0.0, 1e-9);
}

TEST(MilpTest, AllBinariesFixedBehavesLikeLp) {
  MilpProgram milp;
  milp.lp.SetSense(Sense::kMaximize);
  const int z = milp.AddBinary(1.0);
  const int y = milp.lp.AddColumn(0, 10, 1.0);
  milp.lp.SetBounds(z, 1, 1);
  milp.lp.AddRow({{y, 1}, {z, 4}}, Relation::kLessEqual, 6);
  SolveResult r = SolveMilpNative(milp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-9);
  EXPECT_EQ(r.row_duals.size(), 1u);
}

TEST(MilpTest, InfeasibleIntegerProgram) {
  MilpProgram milp;
  const int a = milp.AddBinary(1.0);
  const int b = milp.AddBinary(1.0);
  milp.lp.AddRow({{a, 2}, {b, 2}}, Relation::kEqual, 1);
  EXPECT_EQ(SolveMilpNative(milp).status, SolveStatus::kInfeasible);
}

// Random MILPs with k binaries and one continuous variable y in [0, U].
// The oracle enumerates every binary assignment and solves the remaining
// one-dimensional LP in closed form.
struct RandomMilp {
  int k = 0;
  std::vector<std::vector<double>> a;  // per row, k binary coefficients
  std::vector<double> ay;              // per row, coefficient of y
  std::vector<double> rhs;
  std::vector<double> c;
  double cy = 0;
  double y_upper = 0;
};

bool EnumerateOracle(const RandomMilp& p, double* best) {
  bool any = false;
  *best = -kInfinity;
  for (int mask = 0; mask < (1 << p.k); ++mask) {
    double lo = 0, hi = p.y_upper, base = 0;
    bool ok = true;
    for (int j = 0; j < p.k; ++j) base += ((mask >> j) & 1) * p.c[j];
    for (size_t i = 0; i < p.rhs.size() && ok; ++i) {
      double lhs = 0;
      for (int j = 0; j < p.k; ++j) lhs += ((mask >> j) & 1) * p.a[i][j];
      const double room = p.rhs[i] - lhs;
      if (p.ay[i] > 0) {
        hi = std::min(hi, room / p.ay[i]);
      } else if (p.ay[i] < 0) {
        lo = std::max(lo, room / p.ay[i]);
      } else if (room < -1e-12) {
        ok = false;
      }
    }
    if (!ok || lo > hi + 1e-12) continue;
    const double value = base + std::max(p.cy * lo, p.cy * hi);
    any = true;
    *best = std::max(*best, value);
  }
  return any;
}

TEST(MilpTest, RandomAgainstEnumeration) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> kdist(3, 8);
  for (int trial = 0; trial < 100; ++trial) {
    RandomMilp p;
    p.k = kdist(rng);
    const int m = 2 + trial % 4;
    p.c.resize(p.k);
    for (double& v : p.c) v = u(rng);
    p.cy = u(rng);
    p.y_upper = 2.0;
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(p.k);
      for (double& v : row) v = u(rng);
      p.a.push_back(row);
      p.ay.push_back(u(rng));
      p.rhs.push_back(0.5 * u(rng) + 0.3);
    }
    MilpProgram milp;
    milp.lp.SetSense(Sense::kMaximize);
    for (int j = 0; j < p.k; ++j) milp.AddBinary(p.c[j]);
    const int y = milp.lp.AddColumn(0, p.y_upper, p.cy);
    for (int i = 0; i < m; ++i) {
      std::vector<Term> terms;
      for (int j = 0; j < p.k; ++j) terms.push_back({j, p.a[i][j]});
      terms.push_back({y, p.ay[i]});
      milp.lp.AddRow(terms, Relation::kLessEqual, p.rhs[i]);
    }
    double expect = 0;
    const bool feasible = EnumerateOracle(p, &expect);
    SolveResult r = SolveMilpNative(milp);
    if (!feasible) {
      EXPECT_EQ(r.status, SolveStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, expect, 1e-6) << "trial " << trial;
    EXPECT_LT(milp.lp.MaxPrimalViolation(r.primal), 1e-7);
  }
}

TEST(MilpTest, Deterministic) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  MilpProgram milp;
  milp.lp.SetSense(Sense::kMaximize);
  for (int j = 0; j < 14; ++j) milp.AddBinary(u(rng));
  for (int i = 0; i < 4; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < 14; ++j) terms.push_back({j, u(rng)});
    milp.lp.AddRow(terms, Relation::kLessEqual, 2.5);
  }
  SolveResult a = SolveMilpNative(milp);
  SolveResult b = SolveMilpNative(milp);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.nodes, b.nodes);
}

TEST(MilpTest, HeuristicIncumbentIsAccepted) {
  MilpProgram milp;
  milp.lp.SetSense(Sense::kMaximize);
  for (int j = 0; j < 6; ++j) milp.AddBinary(1.0 + 0.1 * j);
  std::vector<Term> terms;
  for (int j = 0; j < 6; ++j) terms.push_back({j, 1.0 + 0.05 * j});
  milp.lp.AddRow(terms, Relation::kLessEqual, 2.6);
  int calls = 0;
  MilpOptions options;
  options.heuristic = [&calls](const std::vector<double>& relax) {
    ++calls;
    std::vector<double> x(relax.size(), 0.0);
    x[0] = 1.0;
    return std::optional<std::vector<double>>(x);
  };
  SolveResult r = SolveMilpNative(milp, options);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(calls, 0);
  SolveResult plain = SolveMilpNative(milp);
  EXPECT_NEAR(r.objective, plain.objective, 1e-9);
}

TEST(MilpTest, NodeLimitReportsIncumbentOrLimit) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  MilpProgram milp;
  milp.lp.SetSense(Sense::kMaximize);
  for (int j = 0; j < 30; ++j) milp.AddBinary(u(rng));
  std::vector<Term> terms;
  for (int j = 0; j < 30; ++j) terms.push_back({j, u(rng)});
  milp.lp.AddRow(terms, Relation::kLessEqual, 5.3);
  MilpOptions options;
  options.node_limit = 3;
  SolveResult r = SolveMilpNative(milp, options);
  EXPECT_TRUE(r.status == SolveStatus::kNodeLimit ||
              r.status == SolveStatus::kOptimal);
  EXPECT_LE(r.nodes, 5);
}

class ConstantBackend : public SolverBackend {
 public:
  explicit ConstantBackend(int primal_size) : primal_size_(primal_size) {}
  std::string name() const override { return "mock"; }
  SolveResult SolveLp(const LinearProgram& lp) override {
    SolveResult r;
    r.status = SolveStatus::kOptimal;
    r.primal.assign(primal_size_, 0.0);
    r.row_duals.assign(lp.num_rows(), 0.0);
    return r;
  }
  SolveResult SolveMilp(const MilpProgram& milp, const MilpOptions&) override {
    return SolveLp(milp.lp);
  }

 private:
  int primal_size_;
};

TEST(BackendTest, DefaultsToNative) {
  ClearExternalBackend();
  EXPECT_EQ(ActiveBackendName(), "native");
  LinearProgram lp(Sense::kMaximize);
  lp.AddColumn(0, 1, 1.0);
  EXPECT_EQ(SolveLp(lp).backend, "native");
}

TEST(BackendTest, AdapterIsUsedAndChecked) {
  LinearProgram lp(Sense::kMaximize);
  lp.AddColumn(0, 1, 1.0);
  RegisterExternalBackend(std::make_shared<ConstantBackend>(1));
  EXPECT_EQ(ActiveBackendName(), "mock");
  EXPECT_EQ(SolveLp(lp).backend, "mock");
  RegisterExternalBackend(std::make_shared<ConstantBackend>(3));
  try {
    SolveLp(lp);
    FAIL() << "expected a contract violation";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.backend(), "mock");
  }
  ClearExternalBackend();
}

TEST(MpsTest, WritesSectionsAndMarkers) {
  MilpProgram milp;
  milp.lp.SetSense(Sense::kMaximize);
  const int z = milp.AddBinary(1.0);
  const int y = milp.lp.AddColumn(-kInfinity, 4, 2.0);
  milp.lp.AddRow({{z, 1}, {y, 1}}, Relation::kLessEqual, 3);
  milp.lp.AddRow({{y, 1}}, Relation::kGreaterEqual, -1);
  const std::string mps = WriteMps(milp, "T");
  for (const char* token :
       {"NAME          T", "OBJSENSE", "    MAX", "ROWS", " N  OBJ",
        " L  R0000001", " G  R0000002", "'INTORG'", "'INTEND'", "RHS",
        " BV BND       C0000001", " MI BND       C0000002",
        " UP BND       C0000002  4", "ENDATA"}) {
    EXPECT_NE(mps.find(token), std::string::npos) << token << "\n" << mps;
  }
}

}  // namespace
}  // namespace gridfdi::solver
