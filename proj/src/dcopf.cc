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

#include "gridfdi/dcopf.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gridfdi/attack_model.h"
#include "gridfdi/solver/backend.h"

namespace gridfdi {
namespace {

// PTDF entries below this are round-off from the factorization.
constexpr double kCoefficientFloor = 1e-12;

Eigen::VectorXd CaseLoads(const GridCase& grid) {
  const std::vector<double> loads = grid.Loads();
  return Eigen::Map<const Eigen::VectorXd>(loads.data(), grid.num_buses());
}

}  // namespace

Eigen::MatrixXd GeneratorPtdf(const InjectionModel& model) {
  const int ng = model.num_generators();
  Eigen::MatrixXd out(model.num_branches(), ng);
  for (int g = 0; g < ng; ++g) {
    if (model.has_dense_ptdf()) {
      out.col(g) = model.ptdf().col(model.gen_bus(g));
    } else {
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(model.num_buses());
      unit(model.gen_bus(g)) = 1.0;
      out.col(g) = model.Flows(unit);
    }
  }
  return out;
}

solver::LinearProgram BuildDcopf(const GridCase& grid,
                                 const InjectionModel& model,
                                 const Eigen::VectorXd& loads) {
  if (loads.size() != grid.num_buses()) {
    throw std::invalid_argument("load vector has wrong length");
  }
  const int ng = grid.num_generators();
  const int nbr = grid.num_branches();
  solver::LinearProgram lp(solver::Sense::kMinimize);
  double offset = 0.0;
  for (const Generator& gen : grid.generators) {
    lp.AddColumn(gen.pmin, gen.pmax, gen.cost, "pg_" + std::to_string(gen.id));
    offset += gen.cost_constant;
  }
  lp.SetObjectiveOffset(offset);

  std::vector<solver::Term> balance;
  for (int g = 0; g < ng; ++g) balance.push_back({g, 1.0});
  lp.AddRow(std::move(balance), solver::Relation::kEqual, loads.sum(),
            "balance");

  const Eigen::MatrixXd a = GeneratorPtdf(model);
  const Eigen::VectorXd load_flows = model.Flows(loads);
  std::vector<std::vector<solver::Term>> terms(nbr);
  for (int k = 0; k < nbr; ++k) {
    for (int g = 0; g < ng; ++g) {
      if (std::abs(a(k, g)) > kCoefficientFloor) terms[k].push_back({g, a(k, g)});
    }
  }
  for (int k = 0; k < nbr; ++k) {
    lp.AddRow(terms[k], solver::Relation::kLessEqual,
              grid.branches[k].rate + load_flows(k),
              "thermal_fwd_" + std::to_string(grid.branches[k].id));
  }
  for (int k = 0; k < nbr; ++k) {
    std::vector<solver::Term> neg = terms[k];
    for (solver::Term& t : neg) t.value = -t.value;
    lp.AddRow(std::move(neg), solver::Relation::kLessEqual,
              grid.branches[k].rate - load_flows(k),
              "thermal_rev_" + std::to_string(grid.branches[k].id));
  }
  return lp;
}

DispatchSolution SolveDcopf(const GridCase& grid, const InjectionModel& model,
                            const Eigen::VectorXd& loads) {
  const solver::LinearProgram lp = BuildDcopf(grid, model, loads);
  const solver::SolveResult r = solver::SolveLp(lp);
  if (r.status == solver::SolveStatus::kInfeasible) {
    throw InfeasibleRedispatchError("dispatch is infeasible for the given loads");
  }
  if (!r.ok()) {
    throw DcopfError(r.status, "dispatch solve failed: " +
                                   std::string(solver::ToString(r.status)) +
                                   (r.message.empty() ? "" : " (" + r.message + ")"));
  }
  const int ng = grid.num_generators();
  const int nbr = grid.num_branches();
  DispatchSolution s;
  s.pg = Eigen::Map<const Eigen::VectorXd>(r.primal.data(), ng);
  s.cost = r.objective;
  s.loads = loads;
  s.iterations = r.iterations;
  s.lambda = -r.row_duals[0];
  s.f_plus.resize(nbr);
  s.f_minus.resize(nbr);
  for (int k = 0; k < nbr; ++k) {
    s.f_plus(k) = std::max(0.0, -r.row_duals[1 + k]);
    s.f_minus(k) = std::max(0.0, -r.row_duals[1 + nbr + k]);
  }
  // Reduced costs recomputed from the row duals so that stationarity holds
  // by construction whatever the backend reports for columns.
  Eigen::VectorXd reduced(ng);
  for (int g = 0; g < ng; ++g) reduced(g) = lp.column(g).objective;
  for (int i = 0; i < lp.num_rows(); ++i) {
    for (const solver::Term& t : lp.row(i).terms) {
      reduced(t.column) -= r.row_duals[i] * t.value;
    }
  }
  s.alpha_plus = (-reduced).cwiseMax(0.0);
  s.alpha_minus = reduced.cwiseMax(0.0);
  s.flows = model.Flows(model.Injection(s.pg, loads));
  return s;
}

DispatchSolution BaselineDcopf(const GridCase& grid,
                               const InjectionModel& model) {
  return SolveDcopf(grid, model, CaseLoads(grid));
}

DispatchSolution PostAttackDcopf(const GridCase& grid,
                                 const InjectionModel& model,
                                 const Eigen::VectorXd& c) {
  if (c.size() != grid.num_buses()) {
    throw std::invalid_argument("attack vector has wrong length");
  }
  return SolveDcopf(grid, model, CyberLoads(c, grid, model));
}

KktResiduals CheckKkt(const GridCase& grid, const InjectionModel& model,
                      const DispatchSolution& s) {
  const int ng = grid.num_generators();
  const int nbr = grid.num_branches();
  const Eigen::MatrixXd a = GeneratorPtdf(model);
  KktResiduals out;
  const Eigen::VectorXd thermal = s.f_plus - s.f_minus;
  for (int g = 0; g < ng; ++g) {
    const double grad = grid.generators[g].cost + s.lambda +
                        a.col(g).dot(thermal) + s.alpha_plus(g) -
                        s.alpha_minus(g);
    out.stationarity = std::max(out.stationarity, std::abs(grad));
  }
  auto worse = [](double& slot, double v) { slot = std::max(slot, v); };
  worse(out.primal, std::abs(s.pg.sum() - s.loads.sum()));
  for (int k = 0; k < nbr; ++k) {
    const double rate = grid.branches[k].rate;
    worse(out.primal, std::abs(s.flows(k)) - rate);
    worse(out.complementarity, std::abs(s.f_plus(k) * (s.flows(k) - rate)));
    worse(out.complementarity, std::abs(s.f_minus(k) * (-s.flows(k) - rate)));
    worse(out.dual_sign, -s.f_plus(k));
    worse(out.dual_sign, -s.f_minus(k));
  }
  for (int g = 0; g < ng; ++g) {
    const Generator& gen = grid.generators[g];
    worse(out.primal, s.pg(g) - gen.pmax);
    worse(out.primal, gen.pmin - s.pg(g));
    worse(out.complementarity, std::abs(s.alpha_plus(g) * (s.pg(g) - gen.pmax)));
    worse(out.complementarity, std::abs(s.alpha_minus(g) * (gen.pmin - s.pg(g))));
    worse(out.dual_sign, -s.alpha_plus(g));
    worse(out.dual_sign, -s.alpha_minus(g));
  }
  return out;
}

std::string DispatchToJson(const DispatchSolution& s, const GridCase& grid) {
  nlohmann::ordered_json doc;
  doc["cost"] = s.cost;
  doc["lambda"] = s.lambda;
  doc["iterations"] = s.iterations;
  nlohmann::ordered_json gens = nlohmann::ordered_json::array();
  for (int g = 0; g < grid.num_generators(); ++g) {
    gens.push_back({{"id", grid.generators[g].id},
                    {"bus", grid.generators[g].bus},
                    {"pg", s.pg(g)},
                    {"alpha_plus", s.alpha_plus(g)},
                    {"alpha_minus", s.alpha_minus(g)}});
  }
  doc["generators"] = std::move(gens);
  nlohmann::ordered_json branches = nlohmann::ordered_json::array();
  for (int k = 0; k < grid.num_branches(); ++k) {
    branches.push_back({{"id", grid.branches[k].id},
                        {"flow", s.flows(k)},
                        {"f_plus", s.f_plus(k)},
                        {"f_minus", s.f_minus(k)}});
  }
  doc["branches"] = std::move(branches);
  return doc.dump(2) + "\n";
}

}  // namespace gridfdi
