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

// DC sensitivities of a grid case: susceptance matrices, PTDF, generator
// incidence and the injection Jacobian used for state perturbations.

#ifndef GRIDFDI_NETWORK_H_
#define GRIDFDI_NETWORK_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gridfdi/case_io.h"

namespace gridfdi {

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DisconnectedNetworkError : public NetworkError {
 public:
  explicit DisconnectedNetworkError(std::vector<std::vector<int>> islands);
  // Bus ids per island; the first island contains the slack.
  const std::vector<std::vector<int>>& islands() const { return islands_; }

 private:
  std::vector<std::vector<int>> islands_;
};

class SingularMatrixError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

class ImbalanceError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

// Above this many buses the PTDF is not formed densely; rows are computed
// on demand from a sparse factorization of the reduced susceptance matrix.
inline constexpr int kDensePtdfMaxBuses = 300;

class InjectionModel {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double>;

  int num_buses() const { return num_buses_; }
  int num_branches() const { return num_branches_; }
  int num_generators() const { return num_generators_; }
  int slack() const { return slack_; }  // bus position
  int slack_bus_id() const { return slack_bus_id_; }
  int from(int k) const { return from_[k]; }
  int to(int k) const { return to_[k]; }
  // Bus position of generator g.
  int gen_bus(int g) const { return gen_bus_[g]; }

  const SparseMatrix& b_bus() const { return b_bus_; }
  const SparseMatrix& b_branch() const { return b_branch_; }
  const SparseMatrix& gen_incidence() const { return gen_incidence_; }
  // The state-to-injection map; identical to B_bus in the DC model.
  const SparseMatrix& h_inj() const { return b_bus_; }

  bool has_dense_ptdf() const { return dense_ptdf_.size() > 0; }
  // Throws std::logic_error when the model was built without a dense PTDF.
  const Eigen::MatrixXd& ptdf() const;
  Eigen::VectorXd PtdfRow(int branch) const;
  // PTDF times an injection vector, without forming the PTDF.
  Eigen::VectorXd Flows(const Eigen::VectorXd& injection) const;
  // Bus angles with the slack at zero for a balanced injection.
  Eigen::VectorXd Angles(const Eigen::VectorXd& injection) const;

  Eigen::VectorXd Injection(const Eigen::VectorXd& dispatch,
                            const Eigen::VectorXd& loads) const;

 private:
  friend InjectionModel BuildInjectionModel(const GridCase&, int, bool);

  int num_buses_ = 0;
  int num_branches_ = 0;
  int num_generators_ = 0;
  int slack_ = 0;
  int slack_bus_id_ = 0;
  std::vector<int> from_;
  std::vector<int> to_;
  std::vector<int> gen_bus_;
  std::vector<double> susceptance_;
  SparseMatrix b_bus_;
  SparseMatrix b_branch_;
  SparseMatrix gen_incidence_;
  Eigen::MatrixXd dense_ptdf_;
  // Factorization of B_bus without the slack row and column.
  std::shared_ptr<const Eigen::SimplicialLDLT<SparseMatrix>> reduced_;
};

// `slack_position` overrides the case's slack (bus position, -1 keeps it).
// The dense PTDF is formed up to kDensePtdfMaxBuses unless `dense` says
// otherwise.
InjectionModel BuildInjectionModel(const GridCase& grid,
                                   int slack_position = -1);
InjectionModel BuildInjectionModel(const GridCase& grid, int slack_position,
                                   bool dense);

// PTDF (G_B dispatch - loads); throws ImbalanceError when the injection does
// not sum to zero within 1e-8 scaled by the total absolute load.
Eigen::VectorXd PhysicalFlows(const InjectionModel& model,
                              const Eigen::VectorXd& dispatch,
                              const Eigen::VectorXd& loads);

// Tolerance used for balance checks on `loads`.
double BalanceTolerance(const Eigen::VectorXd& loads);

}  // namespace gridfdi

#endif  // GRIDFDI_NETWORK_H_
