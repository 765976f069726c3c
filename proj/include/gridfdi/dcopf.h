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

// PTDF-form DC optimal power flow: the operator's economic dispatch, run on
// whatever loads the operator believes are present.
//
// Dual signs follow the Lagrangian
//   C(P) + lambda (sum P - sum D) + sum_k F+_k (f_k - Pmax_k)
//        + sum_k F-_k (-f_k - Pmax_k) + alpha+ (P - Pmax) + alpha- (Pmin - P)
// so F, alpha >= 0 and lambda is free.

#ifndef GRIDFDI_DCOPF_H_
#define GRIDFDI_DCOPF_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "gridfdi/case_io.h"
#include "gridfdi/network.h"
#include "gridfdi/solver/linear_program.h"

namespace gridfdi {

class DcopfError : public std::runtime_error {
 public:
  DcopfError(solver::SolveStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  solver::SolveStatus status() const { return status_; }

 private:
  solver::SolveStatus status_;
};

// The dispatch problem has no feasible point for the given loads.
class InfeasibleRedispatchError : public DcopfError {
 public:
  explicit InfeasibleRedispatchError(const std::string& what)
      : DcopfError(solver::SolveStatus::kInfeasible, what) {}
};

struct DispatchSolution {
  Eigen::VectorXd pg;  // per generator, pu
  double cost = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd f_plus;   // per branch
  Eigen::VectorXd f_minus;  // per branch
  Eigen::VectorXd alpha_plus;   // per generator
  Eigen::VectorXd alpha_minus;  // per generator
  // Flows implied by pg and the loads the LP was given.
  Eigen::VectorXd flows;
  Eigen::VectorXd loads;
  int64_t iterations = 0;
};

// PTDF columns at the generator buses: n_br x n_g.
Eigen::MatrixXd GeneratorPtdf(const InjectionModel& model);

// Column g is generator g. Row 0 is the balance equality, rows 1..n_br the
// forward thermal limits and rows n_br+1..2 n_br the reverse ones.
solver::LinearProgram BuildDcopf(const GridCase& grid,
                                 const InjectionModel& model,
                                 const Eigen::VectorXd& loads);

// Throws InfeasibleRedispatchError when no dispatch exists and DcopfError
// for any other non-optimal outcome.
DispatchSolution SolveDcopf(const GridCase& grid, const InjectionModel& model,
                            const Eigen::VectorXd& loads);

DispatchSolution BaselineDcopf(const GridCase& grid,
                               const InjectionModel& model);

// Dispatch on the cyber loads P_D - H c.
DispatchSolution PostAttackDcopf(const GridCase& grid,
                                 const InjectionModel& model,
                                 const Eigen::VectorXd& c);

struct KktResiduals {
  double stationarity = 0.0;     // max |dL/dP_g|
  double complementarity = 0.0;  // max |dual * slack|
  double primal = 0.0;           // max balance, thermal or bound violation
  double dual_sign = 0.0;        // most negative inequality dual, negated
};

KktResiduals CheckKkt(const GridCase& grid, const InjectionModel& model,
                      const DispatchSolution& solution);

std::string DispatchToJson(const DispatchSolution& solution,
                           const GridCase& grid);

}  // namespace gridfdi

#endif  // GRIDFDI_DCOPF_H_
