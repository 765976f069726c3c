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

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "test_util.h"

namespace gridfdi {
namespace {

GridCase TwoBus() {
  GridCase grid;
  grid.name = "two";
  grid.buses = {{1, BusType::kSlack, 0.0}, {2, BusType::kLoad, 1.0}};
  grid.branches = {{1, 1, 2, 0.1, 2.0, true}};
  grid.generators = {{1, 1, 0.0, 3.0, 10.0, 0.0}, {2, 2, 0.0, 3.0, 20.0, 0.0}};
  return grid;
}

TEST(NetworkTest, TwoBusPtdf) {
  InjectionModel m = BuildInjectionModel(TwoBus());
  ASSERT_TRUE(m.has_dense_ptdf());
  // Injecting at bus 2 and withdrawing at the slack pushes flow 2 -> 1,
  // against the branch orientation.
  EXPECT_DOUBLE_EQ(m.ptdf()(0, 0), 0.0);
  EXPECT_NEAR(m.ptdf()(0, 1), -1.0, 1e-12);
  EXPECT_TRUE(m.Flows(Eigen::VectorXd::Zero(2)).isZero());
}

TEST(NetworkTest, TwoBusOwnLoadGivesZeroFlow) {
  InjectionModel m = BuildInjectionModel(TwoBus());
  Eigen::VectorXd dispatch(2), loads(2);
  dispatch << 0.0, 1.0;
  loads << 0.0, 1.0;
  EXPECT_NEAR(PhysicalFlows(m, dispatch, loads).norm(), 0.0, 1e-15);
  dispatch << 1.0, 0.0;
  EXPECT_NEAR(PhysicalFlows(m, dispatch, loads)(0), 1.0, 1e-12);
  dispatch << 0.5, 0.0;
  EXPECT_THROW(PhysicalFlows(m, dispatch, loads), ImbalanceError);
}

class FixtureTest : public ::testing::TestWithParam<const char*> {};

TEST_P(FixtureTest, MatrixInvariants) {
  GridCase grid = LoadCaseFile(testing_util::CasePath(GetParam()));
  InjectionModel m = BuildInjectionModel(grid);
  const Eigen::MatrixXd b = Eigen::MatrixXd(m.b_bus());
  EXPECT_LT(b.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((b - b.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(m.ptdf().col(m.slack()).cwiseAbs().maxCoeff(), 0.0);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd c(m.num_buses());
    for (int i = 0; i < c.size(); ++i) c(i) = normal(rng);
    EXPECT_NEAR((m.h_inj() * c).sum(), 0.0, 1e-9);
  }
}

TEST_P(FixtureTest, PtdfMatchesBTheta) {
  GridCase grid = LoadCaseFile(testing_util::CasePath(GetParam()));
  InjectionModel m = BuildInjectionModel(grid);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd p = oracle::RandomZeroSum(m.num_buses(), rng);
    const Eigen::VectorXd expect = oracle::BThetaFlows(grid, p, m.slack());
    EXPECT_LE((m.ptdf() * p - expect).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST_P(FixtureTest, SlackInvariance) {
  GridCase grid = LoadCaseFile(testing_util::CasePath(GetParam()));
  InjectionModel a = BuildInjectionModel(grid);
  InjectionModel b = BuildInjectionModel(grid, (a.slack() + 5) % grid.num_buses());
  EXPECT_GT((a.ptdf() - b.ptdf()).cwiseAbs().maxCoeff(), 1e-3);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd p = oracle::RandomZeroSum(a.num_buses(), rng);
    EXPECT_LE((a.Flows(p) - b.Flows(p)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST_P(FixtureTest, Linearity) {
  GridCase grid = LoadCaseFile(testing_util::CasePath(GetParam()));
  InjectionModel m = BuildInjectionModel(grid);
  std::mt19937_64 rng(3);
  Eigen::VectorXd p1 = oracle::RandomZeroSum(m.num_buses(), rng);
  Eigen::VectorXd p2 = oracle::RandomZeroSum(m.num_buses(), rng);
  const Eigen::VectorXd lhs = m.Flows(2.5 * p1 - 0.75 * p2);
  const Eigen::VectorXd rhs = 2.5 * m.Flows(p1) - 0.75 * m.Flows(p2);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_P(FixtureTest, SparsePathMatchesDense) {
  GridCase grid = LoadCaseFile(testing_util::CasePath(GetParam()));
  InjectionModel dense = BuildInjectionModel(grid, -1, true);
  InjectionModel sparse = BuildInjectionModel(grid, -1, false);
  ASSERT_FALSE(sparse.has_dense_ptdf());
  EXPECT_THROW(sparse.ptdf(), std::logic_error);
  for (int k = 0; k < grid.num_branches(); ++k) {
    EXPECT_LE((dense.PtdfRow(k) - sparse.PtdfRow(k)).cwiseAbs().maxCoeff(),
              1e-10);
  }
  std::mt19937_64 rng(4);
  Eigen::VectorXd p = oracle::RandomZeroSum(grid.num_buses(), rng);
  EXPECT_LE((dense.Flows(p) - sparse.Flows(p)).cwiseAbs().maxCoeff(), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Cases, FixtureTest,
                         ::testing::Values("case14.m", "case24_ieee_rts.m",
                                           "case118.m"));

TEST(NetworkTest, FlowsScaleWithInjection) {
  GridCase grid = LoadCaseFile(testing_util::CasePath("case14.m"));
  InjectionModel m = BuildInjectionModel(grid);
  Eigen::VectorXd loads = Eigen::Map<Eigen::VectorXd>(grid.Loads().data(), 14);
  Eigen::VectorXd dispatch = Eigen::VectorXd::Zero(5);
  dispatch(0) = 0.7 * loads.sum();
  dispatch(1) = 0.3 * loads.sum();
  const Eigen::VectorXd f1 = PhysicalFlows(m, dispatch, loads);
  const Eigen::VectorXd f2 = PhysicalFlows(m, 2 * dispatch, 2 * loads);
  EXPECT_LE((f2 - 2 * f1).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NetworkTest, DisconnectedNetworkListsIslands) {
  GridCase grid = LoadCaseFile(testing_util::FixturePath("case5.m"));
  // Cut bus 3 off: remove branches 2-3 and 3-4.
  grid.branches.erase(grid.branches.begin() + 3, grid.branches.begin() + 5);
  try {
    BuildInjectionModel(grid);
    FAIL() << "expected disconnected-network error";
  } catch (const DisconnectedNetworkError& e) {
    ASSERT_EQ(e.islands().size(), 2u);
    EXPECT_EQ(e.islands()[1], std::vector<int>{3});
  }
}

TEST(NetworkTest, GeneratorIncidence) {
  GridCase grid = LoadCaseFile(testing_util::FixturePath("case5.m"));
  InjectionModel m = BuildInjectionModel(grid);
  const Eigen::MatrixXd g = Eigen::MatrixXd(m.gen_incidence());
  EXPECT_EQ(g.rows(), 5);
  EXPECT_EQ(g.cols(), 2);
  EXPECT_EQ(g(0, 0), 1.0);
  EXPECT_EQ(g(4, 1), 1.0);
  EXPECT_EQ(g.sum(), 2.0);
}

}  // namespace
}  // namespace gridfdi
