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

#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gridfdi/attack_model.h"
#include "oracles.h"
#include "test_util.h"

namespace gridfdi {
namespace {

Eigen::VectorXd Loads(const GridCase& grid) {
  const std::vector<double> v = grid.Loads();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), grid.num_buses());
}

GridCase TwoBus() {
  GridCase g;
  g.name = "two_bus";
  g.buses = {{1, BusType::kSlack, 0.0}, {2, BusType::kLoad, 1.5}};
  g.branches = {{1, 1, 2, 0.1, 5.0, true}};
  g.generators = {{1, 1, 0.0, 3.0, 10.0, 0.0}, {2, 2, 0.0, 3.0, 30.0, 0.0}};
  return g;
}

GridCase LoadNamed(const std::string& name) {
  if (name == "case5") return LoadCaseFile(testing_util::FixturePath("case5.m"));
  return LoadCaseFile(testing_util::CasePath(name + ".m"));
}

const char* kCases[] = {"case5", "case14", "case24_ieee_rts", "case118"};

TEST(DcopfTest, CheapGeneratorTakesAllLoad) {
  const GridCase g = TwoBus();
  const InjectionModel m = BuildInjectionModel(g);
  const DispatchSolution s = BaselineDcopf(g, m);
  EXPECT_NEAR(s.pg(0), 1.5, 1e-9);
  EXPECT_NEAR(s.pg(1), 0.0, 1e-9);
  EXPECT_NEAR(s.cost, 15.0, 1e-9);
  // The cheap unit is marginal, so the balance dual prices it.
  EXPECT_NEAR(s.lambda, -10.0, 1e-9);
  EXPECT_NEAR(s.alpha_minus(1), 20.0, 1e-9);
  EXPECT_NEAR(s.flows(0), 1.5, 1e-9);
}

TEST(DcopfTest, CongestionForcesExpensiveUnit) {
  GridCase g = TwoBus();
  g.branches[0].rate = 1.0;
  const InjectionModel m = BuildInjectionModel(g);
  const DispatchSolution s = BaselineDcopf(g, m);
  EXPECT_NEAR(s.pg(0), 1.0, 1e-9);
  EXPECT_NEAR(s.pg(1), 0.5, 1e-9);
  EXPECT_NEAR(s.flows(0), 1.0, 1e-9);
  // Relaxing the line by one unit saves 30 - 10.
  EXPECT_NEAR(s.f_plus(0), 20.0, 1e-9);
  EXPECT_NEAR(s.f_minus(0), 0.0, 1e-12);
}

TEST(DcopfTest, LpShape) {
  const GridCase g = LoadNamed("case14");
  const InjectionModel m = BuildInjectionModel(g);
  const solver::LinearProgram lp = BuildDcopf(g, m, Loads(g));
  EXPECT_EQ(lp.num_columns(), g.num_generators());
  EXPECT_EQ(lp.num_rows(), 1 + 2 * g.num_branches());
  EXPECT_EQ(lp.row(0).relation, solver::Relation::kEqual);
  for (int j = 0; j < lp.num_columns(); ++j) {
    EXPECT_EQ(lp.column(j).lower, g.generators[j].pmin);
    EXPECT_EQ(lp.column(j).upper, g.generators[j].pmax);
  }
}

TEST(DcopfTest, MatchesReferenceSolutions) {
  std::ifstream in(testing_util::FixturePath("dcopf_reference.json"));
  ASSERT_TRUE(in.good());
  const nlohmann::json ref = nlohmann::json::parse(in);
  for (const char* name : kCases) {
    SCOPED_TRACE(name);
    const GridCase g = LoadNamed(name);
    const InjectionModel m = BuildInjectionModel(g);
    const DispatchSolution s = BaselineDcopf(g, m);
    const nlohmann::json& r = ref.at(name);
    EXPECT_NEAR(s.cost, r.at("cost").get<double>(),
                1e-8 * r.at("cost").get<double>());
    EXPECT_NEAR(s.lambda, r.at("lambda").get<double>(), 1e-6);
    if (r.at("unique_dispatch").get<bool>()) {
      const std::vector<double> pg = r.at("pg").get<std::vector<double>>();
      ASSERT_EQ(static_cast<int>(pg.size()), g.num_generators());
      for (int i = 0; i < g.num_generators(); ++i) {
        EXPECT_NEAR(s.pg(i), pg[i], 1e-6) << "generator " << i;
      }
    }
  }
}

TEST(DcopfTest, FlowsMatchAngleSolution) {
  const GridCase g = LoadNamed("case14");
  const InjectionModel m = BuildInjectionModel(g);
  const DispatchSolution s = BaselineDcopf(g, m);
  Eigen::VectorXd p = -Loads(g);
  const std::map<int, int> index = g.BusIndex();
  for (int i = 0; i < g.num_generators(); ++i) {
    p(index.at(g.generators[i].bus)) += s.pg(i);
  }
  const Eigen::VectorXd ref = oracle::BThetaFlows(g, p, g.SlackIndex());
  EXPECT_LE((s.flows - ref).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DcopfTest, SolutionInvariantsAndKkt) {
  for (const char* name : kCases) {
    SCOPED_TRACE(name);
    const GridCase g = LoadNamed(name);
    const InjectionModel m = BuildInjectionModel(g);
    const DispatchSolution s = BaselineDcopf(g, m);
    EXPECT_NEAR(s.pg.sum(), Loads(g).sum(), 1e-7);
    const KktResiduals kkt = CheckKkt(g, m, s);
    EXPECT_LE(kkt.primal, 1e-7);
    EXPECT_LE(kkt.dual_sign, 0.0);
    EXPECT_LE(kkt.stationarity, 1e-6);
    EXPECT_LE(kkt.complementarity, 1e-6);
  }
}

// The duals must be the sensitivities of the optimal cost, checked by
// finite differences on a congested fixture.
TEST(DcopfTest, DualsAreCostSensitivities) {
  const GridCase g = LoadNamed("case5");
  const InjectionModel m = BuildInjectionModel(g);
  const DispatchSolution s = BaselineDcopf(g, m);
  const double h = 1e-4;

  Eigen::VectorXd loads = Loads(g);
  loads(m.slack()) += h;
  const double with_load = SolveDcopf(g, m, loads).cost;
  EXPECT_NEAR((with_load - s.cost) / h, -s.lambda, 1e-4);

  for (int k = 0; k < g.num_branches(); ++k) {
    GridCase relaxed = g;
    relaxed.branches[k].rate += h;
    const double cost = SolveDcopf(relaxed, m, Loads(g)).cost;
    EXPECT_NEAR((cost - s.cost) / h, -(s.f_plus(k) + s.f_minus(k)), 1e-4)
        << "branch " << k;
  }
  EXPECT_GT(s.f_plus.sum() + s.f_minus.sum(), 1.0);
}

TEST(DcopfTest, InfeasibleWhenLoadExceedsCapacity) {
  const GridCase g = LoadNamed("case14");
  const InjectionModel m = BuildInjectionModel(g);
  double capacity = 0.0;
  for (const Generator& gen : g.generators) capacity += gen.pmax;
  const Eigen::VectorXd loads = Loads(g) * (1.1 * capacity / Loads(g).sum());
  EXPECT_THROW(SolveDcopf(g, m, loads), InfeasibleRedispatchError);
}

TEST(DcopfTest, ZeroAttackReproducesBaseline) {
  for (const char* name : kCases) {
    SCOPED_TRACE(name);
    const GridCase g = LoadNamed(name);
    const InjectionModel m = BuildInjectionModel(g);
    const DispatchSolution base = BaselineDcopf(g, m);
    const DispatchSolution post =
        PostAttackDcopf(g, m, Eigen::VectorXd::Zero(g.num_buses()));
    EXPECT_EQ(base.pg, post.pg);
    EXPECT_EQ(base.cost, post.cost);
  }
}

TEST(DcopfTest, ExtremeShiftIsInfeasible) {
  const GridCase g = LoadNamed("case118");
  const InjectionModel m = BuildInjectionModel(g);
  std::mt19937_64 rng(11);
  Eigen::VectorXd c = oracle::RandomValidAttack(g, 0.1, rng);
  // H c never changes total load, so only thermal limits can bind here.
  // Blow the shift far past any transfer margin, keeping the direction.
  const Eigen::VectorXd shift = m.h_inj() * c;
  c *= 100.0 / shift.cwiseAbs().maxCoeff();
  EXPECT_THROW(PostAttackDcopf(g, m, c), InfeasibleRedispatchError);
}

TEST(DcopfTest, CyberAndPhysicalFlowsDifferByAttackImage) {
  std::mt19937_64 rng(5);
  for (const char* name : {"case14", "case24_ieee_rts", "case118"}) {
    SCOPED_TRACE(name);
    const GridCase g = LoadNamed(name);
    const InjectionModel m = BuildInjectionModel(g);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd c = oracle::RandomValidAttack(g, 0.1, rng);
      const DispatchSolution s = PostAttackDcopf(g, m, c);
      const Eigen::VectorXd physical = PhysicalFlows(m, s.pg, Loads(g));
      const Eigen::VectorXd image = m.ptdf() * (m.h_inj() * c);
      EXPECT_LE((s.flows - physical - image).cwiseAbs().maxCoeff(), 1e-8);
      const KktResiduals kkt = CheckKkt(g, m, s);
      EXPECT_LE(kkt.stationarity, 1e-6);
      EXPECT_LE(kkt.complementarity, 1e-6);
      EXPECT_LE(kkt.primal, 1e-7);
    }
  }
}

TEST(DcopfTest, SparseModelAgreesWithDense) {
  const GridCase g = LoadNamed("case118");
  const DispatchSolution dense = BaselineDcopf(g, BuildInjectionModel(g));
  const DispatchSolution sparse =
      BaselineDcopf(g, BuildInjectionModel(g, -1, false));
  EXPECT_NEAR(dense.cost, sparse.cost, 1e-8 * dense.cost);
  EXPECT_LE((dense.pg - sparse.pg).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(DcopfTest, JsonDump) {
  const GridCase g = LoadNamed("case5");
  const InjectionModel m = BuildInjectionModel(g);
  const DispatchSolution s = BaselineDcopf(g, m);
  const nlohmann::json doc = nlohmann::json::parse(DispatchToJson(s, g));
  EXPECT_DOUBLE_EQ(doc.at("cost").get<double>(), s.cost);
  ASSERT_EQ(doc.at("generators").size(), 2u);
  EXPECT_EQ(doc.at("generators")[1].at("bus").get<int>(), 5);
  ASSERT_EQ(doc.at("branches").size(), 6u);
  EXPECT_DOUBLE_EQ(doc.at("branches")[0].at("f_plus").get<double>(),
                   s.f_plus(0));
}

}  // namespace
}  // namespace gridfdi
