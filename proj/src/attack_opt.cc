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

#include "gridfdi/attack_opt.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <set>

#include "gridfdi/solver/backend.h"

namespace gridfdi {
namespace {

using solver::Relation;
using solver::Term;

// Matrix entries below this are factorization round-off.
constexpr double kCoefficientFloor = 1e-12;
// A dual above this is treated as strictly positive by the heuristic.
constexpr double kPositiveDual = 1e-9;

int TargetPosition(const AttackContext& ctx, int target_line) {
  const int pos = ctx.grid->BranchPosition(target_line);
  if (pos < 0) {
    throw AttackSetupError("unknown target line " + std::to_string(target_line));
  }
  return pos;
}

int ResolveFlowSign(const AttackContext& ctx, const AttackProblemSpec& spec,
                    int target) {
  if (spec.flow_sign != 0) return spec.flow_sign;
  return ctx.baseline_flows(target) < 0.0 ? -1 : 1;
}

// Physical flow on `branch` for dispatch `pg` and the true loads.
double PhysicalFlow(const AttackContext& ctx, const Eigen::VectorXd& pg,
                    int branch) {
  return ctx.gen_ptdf.row(branch).dot(pg) - ctx.load_flows(branch);
}

// Flows the operator computes: dispatch on the cyber loads P_D - H c. With
// c zero at the slack, PTDF H c equals B_branch c.
Eigen::VectorXd CyberFlows(const AttackContext& ctx, const Eigen::VectorXd& pg,
                           const Eigen::VectorXd& c) {
  return ctx.gen_ptdf * pg - ctx.load_flows + ctx.model->b_branch() * c;
}

// Buses that may carry a nonzero c entry.
std::vector<int> AttackBuses(const AttackContext& ctx) {
  std::vector<int> out;
  for (int i = 0; i < ctx.grid->num_buses(); ++i) {
    if (ctx.grid->buses[i].is_load() && i != ctx.model->slack()) out.push_back(i);
  }
  return out;
}

std::vector<int> Union(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Adds c, s and the l1 and load-shift rows shared by every formulation.
void AddAttackPart(const AttackContext& ctx, const AttackProblemSpec& spec,
                   solver::LinearProgram& lp, std::vector<int>& c_col,
                   std::vector<int>& s_col) {
  const int nb = ctx.grid->num_buses();
  c_col.assign(nb, -1);
  s_col.assign(nb, -1);
  std::vector<Term> budget;
  for (int i : AttackBuses(ctx)) {
    const std::string id = std::to_string(ctx.grid->buses[i].id);
    c_col[i] = lp.AddColumn(-spec.n1, spec.n1, 0.0, "c_" + id);
    s_col[i] = lp.AddColumn(0.0, spec.n1, 0.0, "s_" + id);
    lp.AddRow({{s_col[i], 1.0}, {c_col[i], -1.0}}, Relation::kGreaterEqual, 0.0,
              "abs_lo_" + id);
    lp.AddRow({{s_col[i], 1.0}, {c_col[i], 1.0}}, Relation::kGreaterEqual, 0.0,
              "abs_hi_" + id);
    budget.push_back({s_col[i], 1.0});
  }
  if (!budget.empty()) lp.AddRow(budget, Relation::kLessEqual, spec.n1, "budget");

  // (H c)_j over the attackable columns.
  const Eigen::SparseMatrix<double>& h = ctx.model->h_inj();
  std::vector<std::vector<Term>> rows(nb);
  for (int i = 0; i < nb; ++i) {
    if (c_col[i] < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, i); it; ++it) {
      rows[it.row()].push_back({c_col[i], it.value()});
    }
  }
  for (int j = 0; j < nb; ++j) {
    if (rows[j].empty()) continue;
    const std::string id = std::to_string(ctx.grid->buses[j].id);
    const double pd = ctx.grid->buses[j].pd;
    if (pd > 0.0) {
      const double bound = spec.load_shift * pd;
      lp.AddRow(rows[j], Relation::kLessEqual, bound, "shift_hi_" + id);
      lp.AddRow(rows[j], Relation::kGreaterEqual, -bound, "shift_lo_" + id);
    } else {
      lp.AddRow(rows[j], Relation::kEqual, 0.0, "shift_zero_" + id);
    }
  }
}

// Terms of B_branch row k over the c columns.
std::vector<Term> BranchCTerms(const AttackContext& ctx,
                               const std::vector<int>& c_col, int k) {
  std::vector<Term> terms;
  const int f = ctx.model->from(k), t = ctx.model->to(k);
  // B_branch row k is (e_f - e_t) / x_k.
  const double b = 1.0 / ctx.grid->branches[k].x;
  if (c_col[f] >= 0) terms.push_back({c_col[f], b});
  if (c_col[t] >= 0) terms.push_back({c_col[t], -b});
  return terms;
}

Eigen::VectorXd ExtractC(const AttackMilp& am, const std::vector<double>& x) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(am.c_col.size());
  for (size_t i = 0; i < am.c_col.size(); ++i) {
    if (am.c_col[i] >= 0) c(i) = x[am.c_col[i]];
  }
  return c;
}

Eigen::VectorXd ExtractDispatch(const AttackContext& ctx, const AttackMilp& am,
                                const std::vector<double>& x) {
  Eigen::VectorXd pg = ctx.baseline.pg;
  for (size_t g = 0; g < am.pg_col.size(); ++g) {
    if (am.pg_col[g] >= 0) pg(g) = x[am.pg_col[g]];
  }
  return pg;
}

// The operator's dispatch restricted like the MILP (thermal rows in q only,
// generators outside r at baseline), solved for a given c with normalized
// costs. Returns a full MILP point, or nothing when the dispatch is
// infeasible or the point misses a row.
std::optional<std::vector<double>> LowerLevelPoint(const AttackContext& ctx,
                                                   const AttackMilp& am,
                                                   const Eigen::VectorXd& c) {
  const int ng = ctx.grid->num_generators();
  Eigen::VectorXd fixed = ctx.baseline.pg;
  for (int g : am.r) fixed(g) = 0.0;
  const Eigen::VectorXd base_flows = CyberFlows(ctx, fixed, c);

  solver::LinearProgram lp;
  std::vector<int> col(ng, -1);
  std::vector<Term> balance;
  for (int g : am.r) {
    const Generator& gen = ctx.grid->generators[g];
    col[g] = lp.AddColumn(gen.pmin, gen.pmax, gen.cost / ctx.cost_scale);
    balance.push_back({col[g], 1.0});
  }
  lp.AddRow(balance, Relation::kEqual, ctx.loads.sum() - fixed.sum());
  for (int k : am.q) {
    std::vector<Term> terms;
    for (int g : am.r) {
      const double a = ctx.gen_ptdf(k, g);
      if (std::abs(a) > kCoefficientFloor) terms.push_back({col[g], a});
    }
    const double rate = ctx.grid->branches[k].rate;
    lp.AddRow(terms, Relation::kLessEqual, rate - base_flows(k));
    for (Term& t : terms) t.value = -t.value;
    lp.AddRow(terms, Relation::kLessEqual, rate + base_flows(k));
  }
  const solver::SolveResult r = solver::SolveLpNative(lp);
  if (!r.ok()) return std::nullopt;

  std::vector<double> x(am.milp.lp.num_columns(), 0.0);
  for (size_t i = 0; i < am.c_col.size(); ++i) {
    if (am.c_col[i] < 0) continue;
    x[am.c_col[i]] = c(i);
    x[am.s_col[i]] = std::abs(c(i));
  }
  for (int g : am.r) x[am.pg_col[g]] = r.primal[col[g]];
  x[am.lambda_col] = -r.row_duals[0];
  for (size_t j = 0; j < am.q.size(); ++j) {
    const double fp = std::max(0.0, -r.row_duals[1 + 2 * j]);
    const double fm = std::max(0.0, -r.row_duals[2 + 2 * j]);
    x[am.f_plus_col[j]] = fp;
    x[am.f_minus_col[j]] = fm;
    x[am.d_f_plus_col[j]] = fp > kPositiveDual ? 1.0 : 0.0;
    x[am.d_f_minus_col[j]] = fm > kPositiveDual ? 1.0 : 0.0;
  }
  // Capacity duals from stationarity so that row holds exactly.
  for (size_t j = 0; j < am.r.size(); ++j) {
    const int g = am.r[j];
    double d = ctx.grid->generators[g].cost / ctx.cost_scale + x[am.lambda_col];
    for (size_t i = 0; i < am.q.size(); ++i) {
      d += ctx.gen_ptdf(am.q[i], g) *
           (x[am.f_plus_col[i]] - x[am.f_minus_col[i]]);
    }
    const double ap = std::max(0.0, -d), an = std::max(0.0, d);
    x[am.alpha_plus_col[j]] = ap;
    x[am.alpha_minus_col[j]] = an;
    x[am.d_alpha_plus_col[j]] = ap > kPositiveDual ? 1.0 : 0.0;
    x[am.d_alpha_minus_col[j]] = an > kPositiveDual ? 1.0 : 0.0;
  }
  return x;
}

struct ReducedSolve {
  AttackMilp milp;
  solver::SolveResult result;
  int resolves = 0;
  double seconds = 0.0;
};

// True when some dual sits within the audit band of its cap. The primal
// slack Ms are exact (2 rate and 2 span), so only the dual caps can be
// undersized.
bool TouchesBigM(const AttackMilp& am, const std::vector<double>& x,
                 double fraction) {
  const double band = (1.0 - fraction) * am.m_dual;
  for (size_t j = 0; j < am.q.size(); ++j) {
    if (x[am.f_plus_col[j]] >= band || x[am.f_minus_col[j]] >= band) return true;
  }
  for (size_t j = 0; j < am.r.size(); ++j) {
    if (x[am.alpha_plus_col[j]] >= band || x[am.alpha_minus_col[j]] >= band) {
      return true;
    }
  }
  return false;
}

// Branches on the complementarity pair that is violated the most, measured
// by the smaller of the dual and its primal slack.
int ComplementarityBranch(const AttackContext& ctx, const AttackMilp& am,
                          const std::vector<double>& x) {
  const solver::LinearProgram& lp = am.milp.lp;
  int best = -1;
  double best_score = 1e-9;
  auto consider = [&](int binary, double dual, double slack) {
    const double score = std::min(dual, slack);
    if (score > best_score) {
      best_score = score;
      best = binary;
    }
  };
  for (size_t j = 0; j < am.q.size(); ++j) {
    double flow = am.flow_constant[j];
    for (const solver::Term& t : lp.row(am.fwd_row[j]).terms) {
      flow += t.value * x[t.column];
    }
    const double rate = ctx.grid->branches[am.q[j]].rate;
    consider(am.d_f_plus_col[j], x[am.f_plus_col[j]], rate - flow);
    consider(am.d_f_minus_col[j], x[am.f_minus_col[j]], rate + flow);
  }
  for (size_t j = 0; j < am.r.size(); ++j) {
    const Generator& gen = ctx.grid->generators[am.r[j]];
    const double p = x[am.pg_col[am.r[j]]];
    consider(am.d_alpha_plus_col[j], x[am.alpha_plus_col[j]], gen.pmax - p);
    consider(am.d_alpha_minus_col[j], x[am.alpha_minus_col[j]], p - gen.pmin);
  }
  return best;
}

ReducedSolve SolveReduced(const AttackContext& ctx,
                          const AttackProblemSpec& spec,
                          const ReductionState& state) {
  const auto start = std::chrono::steady_clock::now();
  ReducedSolve out;
  double m_scale = 1.0;
  for (int attempt = 0;; ++attempt) {
    out.milp = BuildAttackMilp(ctx, spec, state, m_scale);
    solver::MilpOptions options = spec.milp;
    if (spec.use_heuristic) {
      const AttackMilp* am = &out.milp;
      std::vector<double> last_c;
      options.heuristic = [&ctx, am, last_c](const std::vector<double>& relax)
          mutable -> std::optional<std::vector<double>> {
        Eigen::VectorXd c = ExtractC(*am, relax);
        for (int i = 0; i < c.size(); ++i) {
          if (std::abs(c(i)) <= kAttackZeroThreshold) c(i) = 0.0;
        }
        std::vector<double> key(c.data(), c.data() + c.size());
        if (key == last_c) return std::nullopt;
        last_c = key;
        return LowerLevelPoint(ctx, *am, c);
      };
    }
    const AttackMilp* branch_milp = &out.milp;
    options.branching = [&ctx, branch_milp](const std::vector<double>& x) {
      return ComplementarityBranch(ctx, *branch_milp, x);
    };
    out.result = solver::SolveMilp(out.milp.milp, options);
    out.resolves = attempt;
    if (attempt >= spec.big_m.max_resolves) break;
    // c = 0 with the baseline dispatch and duals is always feasible once the
    // caps are large enough, so infeasibility means they are not.
    const bool undersized =
        out.result.status == solver::SolveStatus::kInfeasible ||
        (out.result.has_solution() &&
         TouchesBigM(out.milp, out.result.primal, spec.big_m.audit_fraction));
    if (!undersized) break;
    m_scale *= spec.big_m.growth;
  }
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

AttackStatus StatusFromSolve(const solver::SolveResult& r) {
  switch (r.status) {
    case solver::SolveStatus::kOptimal:
      return AttackStatus::kOptimal;
    case solver::SolveStatus::kInfeasible:
      return AttackStatus::kInfeasible;
    case solver::SolveStatus::kNodeLimit:
    case solver::SolveStatus::kTimeLimit:
    case solver::SolveStatus::kIterationLimit:
      return AttackStatus::kSolverLimit;
    default:
      return AttackStatus::kError;
  }
}

// Copies the outcome of one reduced solve into `result`.
void Record(const AttackContext& ctx, const ReducedSolve& solve,
            AttackResult& result) {
  result.status = StatusFromSolve(solve.result);
  result.nodes += solve.result.nodes;
  result.big_m_resolves += solve.resolves;
  result.binaries_final = solve.milp.num_binaries();
  result.solve_ms += 1e3 * solve.seconds;
  if (!solve.result.has_solution()) {
    result.message = solve.result.message;
    return;
  }
  const std::vector<double>& x = solve.result.primal;
  result.c = ExtractC(solve.milp, x);
  result.dispatch = ExtractDispatch(ctx, solve.milp, x);
  result.milp_objective = solve.result.objective;
  result.flow =
      solve.milp.flow_sign * PhysicalFlow(ctx, result.dispatch, solve.milp.target);
}

// Lines outside q whose cyber flow exceeds the rating.
std::vector<int> CyberOverflows(const AttackContext& ctx,
                                const AttackProblemSpec& spec,
                                const std::vector<int>& q,
                                const Eigen::VectorXd& pg,
                                const Eigen::VectorXd& c) {
  const std::set<int> retained(q.begin(), q.end());
  const Eigen::VectorXd flows = CyberFlows(ctx, pg, c);
  std::vector<int> out;
  for (int k = 0; k < ctx.grid->num_branches(); ++k) {
    if (retained.count(k) != 0) continue;
    if (std::abs(flows(k)) > ctx.grid->branches[k].rate + spec.overflow_tolerance) {
      out.push_back(k);
    }
  }
  return out;
}

std::vector<int> AllIndices(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

double Elapsed(std::chrono::steady_clock::time_point start) {
  return 1e3 * std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
                   .count();
}

}  // namespace

void AttackProblemSpec::Validate() const {
  if (!(n1 >= 0.0) || !std::isfinite(n1)) {
    throw AttackSetupError("N1 must be finite and >= 0");
  }
  if (!(load_shift > 0.0 && load_shift < 1.0)) {
    throw AttackSetupError("load shift must lie in (0, 1)");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw AttackSetupError("sigma must be finite and > 0");
  }
  if (flow_sign < -1 || flow_sign > 1) {
    throw AttackSetupError("flow sign must be -1, 0 or +1");
  }
  if (!(big_m.dual_factor > 0.0) || !std::isfinite(big_m.dual_factor) ||
      !(big_m.growth > 1.0) || !(big_m.audit_fraction >= 0.0 &&
                                 big_m.audit_fraction < 1.0)) {
    throw AttackSetupError("big-M policy values must be finite and positive");
  }
  if (iteration_cap < 1) throw AttackSetupError("iteration cap must be >= 1");
}

AttackContext MakeAttackContext(const GridCase& grid,
                                const InjectionModel& model) {
  AttackContext ctx;
  ctx.grid = &grid;
  ctx.model = &model;
  const std::vector<double> loads = grid.Loads();
  ctx.loads = Eigen::Map<const Eigen::VectorXd>(loads.data(), grid.num_buses());
  ctx.baseline = SolveDcopf(grid, model, ctx.loads);
  ctx.baseline_flows = ctx.baseline.flows;
  ctx.gen_ptdf = GeneratorPtdf(model);
  ctx.load_flows = model.Flows(ctx.loads);
  double scale = 0.0;
  for (const Generator& g : grid.generators) scale = std::max(scale, std::abs(g.cost));
  ctx.cost_scale = scale > 0.0 ? scale : 1.0;
  return ctx;
}

std::vector<int> CriticalLines(const AttackContext& ctx, double threshold) {
  std::vector<int> out;
  for (int k = 0; k < ctx.grid->num_branches(); ++k) {
    if (std::abs(ctx.baseline_flows(k)) > threshold * ctx.grid->branches[k].rate) {
      out.push_back(k);
    }
  }
  return out;
}

std::vector<int> MarginalGenerators(const AttackContext& ctx, double tolerance) {
  std::vector<int> out;
  for (int g = 0; g < ctx.grid->num_generators(); ++g) {
    const Generator& gen = ctx.grid->generators[g];
    const double p = ctx.baseline.pg(g);
    if (p > gen.pmin + tolerance && p < gen.pmax - tolerance) out.push_back(g);
  }
  return out;
}

AttackMilp BuildAttackMilp(const AttackContext& ctx,
                           const AttackProblemSpec& spec,
                           const ReductionState& state, double m_scale) {
  spec.Validate();
  if (state.q.empty()) throw AttackSetupError("retained line set is empty");
  if (state.r.empty()) throw AttackSetupError("retained generator set is empty");
  if (!(m_scale > 0.0) || !std::isfinite(m_scale)) {
    throw AttackSetupError("big-M scale must be finite and positive");
  }
  const GridCase& grid = *ctx.grid;
  const int ng = grid.num_generators();
  AttackMilp am;
  am.target = TargetPosition(ctx, spec.target_line);
  am.flow_sign = ResolveFlowSign(ctx, spec, am.target);
  am.q = state.q;
  am.r = state.r;
  for (int k : am.q) {
    if (k < 0 || k >= grid.num_branches()) throw AttackSetupError("bad line index");
  }
  for (int g : am.r) {
    if (g < 0 || g >= ng) throw AttackSetupError("bad generator index");
  }
  solver::LinearProgram& lp = am.milp.lp;
  lp.SetSense(solver::Sense::kMaximize);
  AddAttackPart(ctx, spec, lp, am.c_col, am.s_col);
  for (int col : am.s_col) {
    if (col >= 0) lp.SetObjective(col, -spec.sigma);
  }

  // Dispatch: retained units are variables, the rest sit at baseline.
  am.pg_col.assign(ng, -1);
  Eigen::VectorXd fixed = ctx.baseline.pg;
  std::vector<Term> balance;
  for (int g : am.r) {
    const Generator& gen = grid.generators[g];
    am.pg_col[g] = lp.AddColumn(gen.pmin, gen.pmax, 0.0,
                                "pg_" + std::to_string(gen.id));
    fixed(g) = 0.0;
    balance.push_back({am.pg_col[g], 1.0});
  }
  lp.AddRow(balance, Relation::kEqual, ctx.loads.sum() - fixed.sum(), "balance");

  // Objective: physical flow on the target, oriented by flow_sign.
  const int l = am.target;
  for (int g : am.r) {
    lp.SetObjective(am.pg_col[g], am.flow_sign * ctx.gen_ptdf(l, g));
  }
  lp.SetObjectiveOffset(am.flow_sign *
                        (ctx.gen_ptdf.row(l).dot(fixed) - ctx.load_flows(l)));

  am.lambda_col = lp.AddColumn(-solver::kInfinity, solver::kInfinity, 0.0, "lambda");
  am.m_dual = spec.big_m.dual_factor * m_scale;

  // Thermal rows with their complementarity.
  for (int k : am.q) {
    const std::string id = std::to_string(grid.branches[k].id);
    const double rate = grid.branches[k].rate;
    std::vector<Term> flow = BranchCTerms(ctx, am.c_col, k);
    for (int g : am.r) {
      const double a = ctx.gen_ptdf(k, g);
      if (std::abs(a) > kCoefficientFloor) flow.push_back({am.pg_col[g], a});
    }
    // Cyber flow = terms + constant.
    const double constant = ctx.gen_ptdf.row(k).dot(fixed) - ctx.load_flows(k);
    // The thermal rows below keep |flow| <= rate, so the slack of either
    // side never exceeds 2 rate.
    const double m = m_scale * 2.0 * rate;
    am.m_thermal.push_back(m);

    am.fwd_row.push_back(lp.num_rows());
    am.flow_constant.push_back(constant);
    lp.AddRow(flow, Relation::kLessEqual, rate - constant, "fwd_" + id);
    std::vector<Term> neg = flow;
    for (Term& t : neg) t.value = -t.value;
    lp.AddRow(neg, Relation::kLessEqual, rate + constant, "rev_" + id);

    const int fp = lp.AddColumn(0.0, solver::kInfinity, 0.0, "fplus_" + id);
    const int fm = lp.AddColumn(0.0, solver::kInfinity, 0.0, "fminus_" + id);
    const int dp = am.milp.AddBinary(0.0, "dfplus_" + id);
    const int dm = am.milp.AddBinary(0.0, "dfminus_" + id);
    am.f_plus_col.push_back(fp);
    am.f_minus_col.push_back(fm);
    am.d_f_plus_col.push_back(dp);
    am.d_f_minus_col.push_back(dm);
    lp.AddRow({{fp, 1.0}, {dp, -am.m_dual}}, Relation::kLessEqual, 0.0,
              "cap_fplus_" + id);
    lp.AddRow({{fm, 1.0}, {dm, -am.m_dual}}, Relation::kLessEqual, 0.0,
              "cap_fminus_" + id);
    // rate - flow <= M (1 - d+)
    std::vector<Term> tight_p = neg;
    tight_p.push_back({dp, m});
    lp.AddRow(tight_p, Relation::kLessEqual, m - rate + constant, "tight_fwd_" + id);
    // rate + flow <= M (1 - d-)
    std::vector<Term> tight_m = flow;
    tight_m.push_back({dm, m});
    lp.AddRow(tight_m, Relation::kLessEqual, m - rate - constant, "tight_rev_" + id);
  }

  // Capacity complementarity and stationarity for retained units.
  for (int g : am.r) {
    const Generator& gen = grid.generators[g];
    const std::string id = std::to_string(gen.id);
    const double span = gen.pmax - gen.pmin;
    const double m = m_scale * (span > 0.0 ? 2.0 * span : 1.0);
    am.m_generator.push_back(m);
    const int ap = lp.AddColumn(0.0, solver::kInfinity, 0.0, "aplus_" + id);
    const int an = lp.AddColumn(0.0, solver::kInfinity, 0.0, "aminus_" + id);
    const int dp = am.milp.AddBinary(0.0, "daplus_" + id);
    const int dm = am.milp.AddBinary(0.0, "daminus_" + id);
    am.alpha_plus_col.push_back(ap);
    am.alpha_minus_col.push_back(an);
    am.d_alpha_plus_col.push_back(dp);
    am.d_alpha_minus_col.push_back(dm);
    const int p = am.pg_col[g];
    lp.AddRow({{ap, 1.0}, {dp, -am.m_dual}}, Relation::kLessEqual, 0.0,
              "cap_aplus_" + id);
    lp.AddRow({{an, 1.0}, {dm, -am.m_dual}}, Relation::kLessEqual, 0.0,
              "cap_aminus_" + id);
    // pmax - P <= M (1 - d+)
    lp.AddRow({{p, -1.0}, {dp, m}}, Relation::kLessEqual, m - gen.pmax,
              "tight_max_" + id);
    // P - pmin <= M (1 - d-)
    lp.AddRow({{p, 1.0}, {dm, m}}, Relation::kLessEqual, m + gen.pmin,
              "tight_min_" + id);

    std::vector<Term> grad = {{am.lambda_col, 1.0}, {ap, 1.0}, {an, -1.0}};
    for (size_t j = 0; j < am.q.size(); ++j) {
      const double a = ctx.gen_ptdf(am.q[j], g);
      if (std::abs(a) <= kCoefficientFloor) continue;
      grad.push_back({am.f_plus_col[j], a});
      grad.push_back({am.f_minus_col[j], -a});
    }
    lp.AddRow(grad, Relation::kEqual, -gen.cost / ctx.cost_scale,
              "stationarity_" + id);
  }
  for (double m : am.m_thermal) {
    if (!(m > 0.0) || !std::isfinite(m)) throw AttackSetupError("invalid big-M");
  }
  return am;
}

std::string_view ToString(Method method) {
  switch (method) {
    case Method::kOriginal:
      return "original";
    case Method::kA1:
      return "A1";
    case Method::kA2:
      return "A2";
    case Method::kA3:
      return "A3";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view text) {
  std::string lower(text);
  for (char& ch : lower) ch = static_cast<char>(std::tolower(ch));
  if (lower == "original") return Method::kOriginal;
  if (lower == "a1") return Method::kA1;
  if (lower == "a2") return Method::kA2;
  if (lower == "a3") return Method::kA3;
  return std::nullopt;
}

std::string_view ToString(AttackStatus status) {
  switch (status) {
    case AttackStatus::kOptimal:
      return "optimal";
    case AttackStatus::kIterationCap:
      return "iteration_cap";
    case AttackStatus::kSolverLimit:
      return "solver_limit";
    case AttackStatus::kInfeasible:
      return "infeasible";
    case AttackStatus::kError:
      return "error";
  }
  return "unknown";
}

AttackResult SolveOriginal(const AttackContext& ctx,
                           const AttackProblemSpec& spec) {
  AttackResult result;
  result.method = Method::kOriginal;
  ReductionState state;
  state.q = AllIndices(ctx.grid->num_branches());
  state.r = AllIndices(ctx.grid->num_generators());
  const ReducedSolve solve = SolveReduced(ctx, spec, state);
  result.flow_sign = solve.milp.flow_sign;
  result.binaries_initial = solve.milp.num_binaries();
  Record(ctx, solve, result);
  state.milp_solves = 1;
  result.state = state;
  result.iterations = 1;
  return result;
}

AttackResult Algorithm1(const AttackContext& ctx, const AttackProblemSpec& spec) {
  AttackResult result;
  result.method = Method::kA1;
  const int target = TargetPosition(ctx, spec.target_line);
  ReductionState state;
  state.q = Union(CriticalLines(ctx, spec.critical_threshold), {target});
  state.r = AllIndices(ctx.grid->num_generators());
  for (int it = 1;; ++it) {
    const ReducedSolve solve = SolveReduced(ctx, spec, state);
    ++state.milp_solves;
    if (it == 1) result.binaries_initial = solve.milp.num_binaries();
    result.flow_sign = solve.milp.flow_sign;
    Record(ctx, solve, result);
    result.iterations = it;
    if (!solve.result.has_solution() || result.status != AttackStatus::kOptimal) {
      break;
    }
    const std::vector<int> violated =
        CyberOverflows(ctx, spec, state.q, result.dispatch, result.c);
    if (violated.empty()) break;
    if (it >= spec.iteration_cap) {
      result.status = AttackStatus::kIterationCap;
      result.message = "cyber overflows remain at the iteration cap";
      break;
    }
    state.q = Union(state.q, violated);
    ++state.overflow_rounds;
  }
  result.state = state;
  return result;
}

AttackResult Algorithm2(const AttackContext& ctx, const AttackProblemSpec& spec) {
  AttackResult result;
  result.method = Method::kA2;
  const int target = TargetPosition(ctx, spec.target_line);
  ReductionState state;
  state.q = Union(CriticalLines(ctx, spec.critical_threshold), {target});
  state.r = MarginalGenerators(ctx);
  if (state.r.empty()) {
    result.status = AttackStatus::kError;
    result.message = "no marginal generators at baseline";
    result.state = state;
    return result;
  }
  const int ng = ctx.grid->num_generators();
  for (int it = 1;; ++it) {
    const ReducedSolve solve = SolveReduced(ctx, spec, state);
    ++state.milp_solves;
    if (it == 1) result.binaries_initial = solve.milp.num_binaries();
    result.flow_sign = solve.milp.flow_sign;
    Record(ctx, solve, result);
    result.iterations = it;
    if (!solve.result.has_solution() || result.status != AttackStatus::kOptimal) {
      result.flow.reset();
      break;
    }
    // Compare with what the operator would actually dispatch.
    std::vector<int> grow_r;
    try {
      const DispatchSolution post = PostAttackDcopf(*ctx.grid, *ctx.model, result.c);
      std::vector<int> differ;
      for (int g = 0; g < ng; ++g) {
        if (std::abs(post.pg(g) - result.dispatch(g)) > spec.dispatch_tolerance) {
          differ.push_back(g);
        }
      }
      double milp_cost = 0.0, post_cost = 0.0;
      for (int g = 0; g < ng; ++g) {
        milp_cost += ctx.grid->generators[g].cost * result.dispatch(g);
        post_cost += ctx.grid->generators[g].cost * post.pg(g);
      }
      const bool same_cost = std::abs(milp_cost - post_cost) <=
                             spec.cost_tolerance * std::max(1.0, std::abs(post_cost));
      if (!differ.empty() && !same_cost) {
        const std::set<int> in_r(state.r.begin(), state.r.end());
        for (int g : differ) {
          if (in_r.count(g) == 0) grow_r.push_back(g);
        }
      }
    } catch (const InfeasibleRedispatchError&) {
      result.status = AttackStatus::kInfeasible;
      result.message = "post-attack dispatch infeasible";
      result.flow.reset();
      break;
    }
    const std::vector<int> violated =
        grow_r.empty() ? CyberOverflows(ctx, spec, state.q, result.dispatch, result.c)
                       : std::vector<int>{};
    if (grow_r.empty() && violated.empty()) break;
    if (it >= spec.iteration_cap) {
      result.status = AttackStatus::kIterationCap;
      result.message = "reduction still growing at the iteration cap";
      break;
    }
    if (!grow_r.empty()) {
      state.r = Union(state.r, grow_r);
      ++state.dispatch_rounds;
    } else {
      state.q = Union(state.q, violated);
      ++state.overflow_rounds;
    }
  }
  result.state = state;
  return result;
}

AttackResult Algorithm3(const AttackContext& ctx, const AttackProblemSpec& spec) {
  spec.Validate();
  const auto start = std::chrono::steady_clock::now();
  AttackResult result;
  result.method = Method::kA3;
  const int target = TargetPosition(ctx, spec.target_line);
  result.flow_sign = ResolveFlowSign(ctx, spec, target);
  result.iterations = 1;

  solver::LinearProgram lp(solver::Sense::kMaximize);
  std::vector<int> c_col, s_col;
  AddAttackPart(ctx, spec, lp, c_col, s_col);
  // Maximize -flow_sign (B_branch c)_l, the cyber-minus-physical gap.
  for (const Term& t : BranchCTerms(ctx, c_col, target)) {
    lp.SetObjective(t.column, -result.flow_sign * t.value);
  }
  const solver::SolveResult r = solver::SolveLp(lp);
  if (!r.ok()) {
    result.status = StatusFromSolve(r);
    result.message = r.message;
    result.solve_ms = Elapsed(start);
    return result;
  }
  result.c = Eigen::VectorXd::Zero(ctx.grid->num_buses());
  for (int i = 0; i < ctx.grid->num_buses(); ++i) {
    if (c_col[i] >= 0) result.c(i) = r.primal[c_col[i]];
  }
  result.milp_objective = r.objective;
  result.upper = ctx.grid->branches[target].rate + r.objective;
  result.status = AttackStatus::kOptimal;
  try {
    const DispatchSolution post = PostAttackDcopf(*ctx.grid, *ctx.model, result.c);
    result.dispatch = post.pg;
    result.flow = result.flow_sign * PhysicalFlow(ctx, post.pg, target);
  } catch (const InfeasibleRedispatchError&) {
    result.status = AttackStatus::kInfeasible;
    result.message = "post-attack dispatch infeasible; lower bound absent";
  }
  result.solve_ms = Elapsed(start);
  return result;
}

AttackResult RunMethod(Method method, const AttackContext& ctx,
                       const AttackProblemSpec& spec) {
  switch (method) {
    case Method::kOriginal:
      return SolveOriginal(ctx, spec);
    case Method::kA1:
      return Algorithm1(ctx, spec);
    case Method::kA2:
      return Algorithm2(ctx, spec);
    case Method::kA3:
      return Algorithm3(ctx, spec);
  }
  throw AttackSetupError("unknown method");
}

VerifyReport VerifyAttack(const AttackContext& ctx, int target_line,
                          const AttackVector& attack) {
  const int target = TargetPosition(ctx, target_line);
  VerifyReport report;
  report.check = CheckAttack(attack, *ctx.grid, *ctx.model);
  const DispatchSolution post = PostAttackDcopf(*ctx.grid, *ctx.model, attack.c);
  report.dispatch = post.pg;
  report.cyber_flows = post.flows;
  report.physical_flows = PhysicalFlows(*ctx.model, post.pg, ctx.loads);
  report.physical_flow = report.physical_flows(target);
  report.overflow_ratio =
      std::abs(report.physical_flow) / ctx.grid->branches[target].rate;
  return report;
}

}  // namespace gridfdi
