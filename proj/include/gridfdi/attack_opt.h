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

// Worst-case line-overflow attacks. The attacker picks a state perturbation
// c; the operator re-dispatches on the falsified loads; the attacker wants
// the physical flow on a target line as high as possible. The operator's
// dispatch is replaced by its KKT conditions with big-M complementarity,
// giving one MILP. Reduced variants keep only some thermal rows (Q) and
// some generators (R) and repair the reduction iteratively.

#ifndef GRIDFDI_ATTACK_OPT_H_
#define GRIDFDI_ATTACK_OPT_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gridfdi/attack_model.h"
#include "gridfdi/case_io.h"
#include "gridfdi/dcopf.h"
#include "gridfdi/network.h"
#include "gridfdi/solver/branch_and_bound.h"
#include "gridfdi/solver/linear_program.h"

namespace gridfdi {

class AttackSetupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BigMPolicy {
  // Dual caps are this multiple of the largest (normalized) cost, i.e. this
  // value itself since costs are scaled to max |cost| = 1 inside the MILP.
  double dual_factor = 1e3;
  // A dual or slack within this fraction of its M counts as touching it.
  double audit_fraction = 0.01;
  double growth = 10.0;
  int max_resolves = 3;
};

struct AttackProblemSpec {
  int target_line = 0;  // branch id
  double n1 = 0.0;
  double load_shift = 0.1;
  double sigma = 1e-4;
  // +1 or -1; 0 takes the sign of the baseline flow on the target.
  int flow_sign = 0;
  BigMPolicy big_m;
  double critical_threshold = 0.9;
  int iteration_cap = 20;
  double overflow_tolerance = 1e-6;
  double dispatch_tolerance = 1e-5;
  double cost_tolerance = 1e-8;  // relative, for the degeneracy fallback
  solver::MilpOptions milp;
  bool use_heuristic = true;

  // Throws AttackSetupError when a field is out of range.
  void Validate() const;
};

// Everything derived once per case; immutable and safe to share.
struct AttackContext {
  const GridCase* grid = nullptr;
  const InjectionModel* model = nullptr;
  Eigen::VectorXd loads;
  DispatchSolution baseline;
  Eigen::VectorXd baseline_flows;
  Eigen::MatrixXd gen_ptdf;  // n_br x n_g
  Eigen::VectorXd load_flows;  // PTDF P_D
  double cost_scale = 1.0;  // max |cost|
};

// Throws DcopfError when the baseline dispatch fails.
AttackContext MakeAttackContext(const GridCase& grid,
                                const InjectionModel& model);

// Branch positions loaded above `threshold` of rating at baseline.
std::vector<int> CriticalLines(const AttackContext& ctx, double threshold);
// Generators strictly between their limits at baseline (tolerance in pu).
std::vector<int> MarginalGenerators(const AttackContext& ctx,
                                    double tolerance = 1e-6);

struct ReductionState {
  std::vector<int> q;  // branch positions, sorted
  std::vector<int> r;  // generator positions, sorted
  int milp_solves = 0;
  int dispatch_rounds = 0;  // R growth rounds
  int overflow_rounds = 0;  // Q growth rounds
};

// Column and row bookkeeping for one assembled attack MILP.
struct AttackMilp {
  solver::MilpProgram milp;
  int flow_sign = 1;
  int target = 0;  // branch position
  std::vector<int> q, r;
  std::vector<int> c_col;  // per bus, -1 where c is pinned to zero
  std::vector<int> s_col;  // per bus, -1 likewise
  std::vector<int> pg_col;  // per generator, -1 when fixed at baseline
  int lambda_col = -1;
  std::vector<int> f_plus_col, f_minus_col;  // per entry of q
  std::vector<int> alpha_plus_col, alpha_minus_col;  // per entry of r
  std::vector<int> d_f_plus_col, d_f_minus_col;
  std::vector<int> d_alpha_plus_col, d_alpha_minus_col;
  std::vector<int> fwd_row;  // per entry of q: row holding flow <= rate
  std::vector<double> flow_constant;  // per entry of q: flow minus row terms
  std::vector<double> m_thermal;  // per entry of q
  std::vector<double> m_generator;  // per entry of r
  double m_dual = 0.0;
  int num_binaries() const { return static_cast<int>(milp.binaries.size()); }
};

// `m_scale` multiplies every M of the policy (the audit's growth).
AttackMilp BuildAttackMilp(const AttackContext& ctx,
                           const AttackProblemSpec& spec,
                           const ReductionState& state, double m_scale = 1.0);

enum class Method { kOriginal, kA1, kA2, kA3 };
std::string_view ToString(Method method);
// Accepts original, A1, A2, A3 (case-insensitive).
std::optional<Method> ParseMethod(std::string_view text);

enum class AttackStatus {
  kOptimal,
  kIterationCap,
  kSolverLimit,
  kInfeasible,
  kError,
};
std::string_view ToString(AttackStatus status);

struct AttackResult {
  Method method = Method::kA1;
  AttackStatus status = AttackStatus::kError;
  std::string message;
  int flow_sign = 1;
  // Signed target flow times flow_sign, in pu. For A3 this is the lower
  // bound and is absent when the post-attack dispatch is infeasible.
  std::optional<double> flow;
  std::optional<double> upper;  // A3 only
  double milp_objective = 0.0;  // including the sigma term
  Eigen::VectorXd c;
  Eigen::VectorXd dispatch;
  ReductionState state;
  int binaries_initial = 0;
  int binaries_final = 0;
  int iterations = 0;
  int64_t nodes = 0;
  int big_m_resolves = 0;
  double solve_ms = 0.0;

  bool converged() const { return status == AttackStatus::kOptimal; }
};

AttackResult SolveOriginal(const AttackContext& ctx,
                           const AttackProblemSpec& spec);
AttackResult Algorithm1(const AttackContext& ctx, const AttackProblemSpec& spec);
AttackResult Algorithm2(const AttackContext& ctx, const AttackProblemSpec& spec);
AttackResult Algorithm3(const AttackContext& ctx, const AttackProblemSpec& spec);
AttackResult RunMethod(Method method, const AttackContext& ctx,
                       const AttackProblemSpec& spec);

struct VerifyReport {
  AttackCheck check;
  double physical_flow = 0.0;  // signed, pu
  double overflow_ratio = 0.0;  // |flow| / rating
  Eigen::VectorXd cyber_flows;
  Eigen::VectorXd physical_flows;
  Eigen::VectorXd dispatch;
};

// Throws InfeasibleRedispatchError when the operator cannot dispatch.
VerifyReport VerifyAttack(const AttackContext& ctx, int target_line,
                          const AttackVector& attack);

}  // namespace gridfdi

#endif  // GRIDFDI_ATTACK_OPT_H_
