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

#include "gridfdi/network.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace gridfdi {
namespace {

using Triplet = Eigen::Triplet<double>;

std::string DescribeIslands(const std::vector<std::vector<int>>& islands) {
  std::ostringstream out;
  out << "network is disconnected into " << islands.size() << " islands:";
  for (size_t i = 0; i < islands.size(); ++i) {
    out << " {";
    for (size_t k = 0; k < islands[i].size(); ++k) {
      out << (k ? " " : "") << islands[i][k];
    }
    out << "}";
  }
  return out.str();
}

// Connected components as bus positions, starting from `root`.
std::vector<std::vector<int>> Components(int n, const std::vector<int>& from,
                                         const std::vector<int>& to,
                                         int root) {
  std::vector<std::vector<int>> adjacent(n);
  for (size_t k = 0; k < from.size(); ++k) {
    adjacent[from[k]].push_back(to[k]);
    adjacent[to[k]].push_back(from[k]);
  }
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> components;
  auto flood = [&](int start) {
    std::vector<int> members;
    std::queue<int> frontier;
    frontier.push(start);
    label[start] = static_cast<int>(components.size());
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      members.push_back(u);
      for (int v : adjacent[u]) {
        if (label[v] < 0) {
          label[v] = label[start];
          frontier.push(v);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  };
  flood(root);
  for (int i = 0; i < n; ++i) {
    if (label[i] < 0) flood(i);
  }
  return components;
}

// Expands a reduced (slack removed) vector to full size with a zero slack.
Eigen::VectorXd Expand(const Eigen::VectorXd& reduced, int slack) {
  const int n = static_cast<int>(reduced.size()) + 1;
  Eigen::VectorXd full(n);
  full.head(slack) = reduced.head(slack);
  full(slack) = 0.0;
  full.tail(n - slack - 1) = reduced.tail(n - slack - 1);
  return full;
}

Eigen::VectorXd Reduce(const Eigen::VectorXd& full, int slack) {
  const int n = static_cast<int>(full.size());
  Eigen::VectorXd reduced(n - 1);
  reduced.head(slack) = full.head(slack);
  reduced.tail(n - slack - 1) = full.tail(n - slack - 1);
  return reduced;
}

}  // namespace

DisconnectedNetworkError::DisconnectedNetworkError(
    std::vector<std::vector<int>> islands)
    : NetworkError(DescribeIslands(islands)), islands_(std::move(islands)) {}

const Eigen::MatrixXd& InjectionModel::ptdf() const {
  if (!has_dense_ptdf()) {
    throw std::logic_error("dense PTDF not formed for this model");
  }
  return dense_ptdf_;
}

Eigen::VectorXd InjectionModel::PtdfRow(int branch) const {
  if (has_dense_ptdf()) return dense_ptdf_.row(branch).transpose();
  // Row k of B_branch B_red^-1 is B_red^-1 applied to row k (B_red symmetric).
  Eigen::VectorXd row = Eigen::VectorXd::Zero(num_buses_);
  row(from_[branch]) = susceptance_[branch];
  row(to_[branch]) = -susceptance_[branch];
  Eigen::VectorXd solved = reduced_->solve(Reduce(row, slack_));
  return Expand(solved, slack_);
}

Eigen::VectorXd InjectionModel::Angles(const Eigen::VectorXd& injection) const {
  return Expand(reduced_->solve(Reduce(injection, slack_)), slack_);
}

Eigen::VectorXd InjectionModel::Flows(const Eigen::VectorXd& injection) const {
  if (has_dense_ptdf()) return dense_ptdf_ * injection;
  return b_branch_ * Angles(injection);
}

Eigen::VectorXd InjectionModel::Injection(const Eigen::VectorXd& dispatch,
                                          const Eigen::VectorXd& loads) const {
  return gen_incidence_ * dispatch - loads;
}

InjectionModel BuildInjectionModel(const GridCase& grid, int slack_position) {
  return BuildInjectionModel(grid, slack_position,
                             grid.num_buses() <= kDensePtdfMaxBuses);
}

InjectionModel BuildInjectionModel(const GridCase& grid, int slack_position,
                                   bool dense) {
  InjectionModel m;
  const int nb = grid.num_buses();
  const int nbr = grid.num_branches();
  const int ng = grid.num_generators();
  m.num_buses_ = nb;
  m.num_branches_ = nbr;
  m.num_generators_ = ng;
  m.slack_ = slack_position >= 0 ? slack_position : grid.SlackIndex();
  if (m.slack_ < 0 || m.slack_ >= nb) {
    throw NetworkError("no valid slack bus");
  }
  m.slack_bus_id_ = grid.buses[m.slack_].id;

  const std::map<int, int> index = grid.BusIndex();
  for (const Branch& br : grid.branches) {
    m.from_.push_back(index.at(br.from_bus));
    m.to_.push_back(index.at(br.to_bus));
  }
  for (const Generator& g : grid.generators) {
    m.gen_bus_.push_back(index.at(g.bus));
  }

  std::vector<std::vector<int>> parts =
      Components(nb, m.from_, m.to_, m.slack_);
  if (parts.size() > 1) {
    for (auto& island : parts) {
      for (int& i : island) i = grid.buses[i].id;
    }
    throw DisconnectedNetworkError(std::move(parts));
  }

  std::vector<Triplet> branch_entries;
  std::vector<Triplet> bus_entries;
  for (int k = 0; k < nbr; ++k) {
    const double b = 1.0 / grid.branches[k].x;
    m.susceptance_.push_back(b);
    const int f = m.from_[k], t = m.to_[k];
    branch_entries.emplace_back(k, f, b);
    branch_entries.emplace_back(k, t, -b);
    bus_entries.emplace_back(f, f, b);
    bus_entries.emplace_back(t, t, b);
    bus_entries.emplace_back(f, t, -b);
    bus_entries.emplace_back(t, f, -b);
  }
  m.b_branch_.resize(nbr, nb);
  m.b_branch_.setFromTriplets(branch_entries.begin(), branch_entries.end());
  m.b_bus_.resize(nb, nb);
  m.b_bus_.setFromTriplets(bus_entries.begin(), bus_entries.end());

  std::vector<Triplet> gen_entries;
  for (int g = 0; g < ng; ++g) gen_entries.emplace_back(m.gen_bus_[g], g, 1.0);
  m.gen_incidence_.resize(nb, ng);
  m.gen_incidence_.setFromTriplets(gen_entries.begin(), gen_entries.end());

  // Reduced susceptance: drop the slack row and column.
  std::vector<Triplet> reduced_entries;
  auto shift = [&](int i) { return i < m.slack_ ? i : i - 1; };
  for (int col = 0; col < nb; ++col) {
    if (col == m.slack_) continue;
    for (InjectionModel::SparseMatrix::InnerIterator it(m.b_bus_, col); it;
         ++it) {
      if (it.row() == m.slack_) continue;
      reduced_entries.emplace_back(shift(static_cast<int>(it.row())),
                                   shift(col), it.value());
    }
  }
  InjectionModel::SparseMatrix reduced(nb - 1, nb - 1);
  reduced.setFromTriplets(reduced_entries.begin(), reduced_entries.end());
  auto factor =
      std::make_shared<Eigen::SimplicialLDLT<InjectionModel::SparseMatrix>>();
  if (nb > 1) {
    factor->compute(reduced);
    if (factor->info() != Eigen::Success ||
        (factor->vectorD().array() <= 0.0).any()) {
      throw SingularMatrixError("reduced susceptance matrix is singular");
    }
  }
  m.reduced_ = factor;

  if (dense) {
    Eigen::MatrixXd rhs =
        Eigen::MatrixXd(m.b_branch_).transpose();  // nb x nbr
    m.dense_ptdf_ = Eigen::MatrixXd::Zero(nbr, nb);
    if (nb > 1) {
      Eigen::MatrixXd reduced_rhs(nb - 1, nbr);
      for (int i = 0, r = 0; i < nb; ++i) {
        if (i == m.slack_) continue;
        reduced_rhs.row(r++) = rhs.row(i);
      }
      Eigen::MatrixXd solved = factor->solve(reduced_rhs);  // (nb-1) x nbr
      for (int i = 0, r = 0; i < nb; ++i) {
        if (i == m.slack_) continue;
        m.dense_ptdf_.col(i) = solved.row(r++).transpose();
      }
    }
  }
  return m;
}

double BalanceTolerance(const Eigen::VectorXd& loads) {
  return 1e-8 * std::max(1.0, loads.cwiseAbs().sum());
}

Eigen::VectorXd PhysicalFlows(const InjectionModel& model,
                              const Eigen::VectorXd& dispatch,
                              const Eigen::VectorXd& loads) {
  if (dispatch.size() != model.num_generators() ||
      loads.size() != model.num_buses()) {
    throw std::invalid_argument("dispatch or load vector has wrong length");
  }
  const Eigen::VectorXd injection = model.Injection(dispatch, loads);
  const double imbalance = injection.sum();
  if (std::abs(imbalance) > BalanceTolerance(loads)) {
    std::ostringstream out;
    out << "injection imbalance " << imbalance << " pu exceeds tolerance";
    throw ImbalanceError(out.str());
  }
  return model.Flows(injection);
}

}  // namespace gridfdi
