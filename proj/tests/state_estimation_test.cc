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

#include "gridfdi/state_estimation.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gridfdi/attack_model.h"
#include "oracles.h"
#include "test_util.h"

namespace gridfdi {
namespace {

struct Scenario {
  GridCase grid;
  InjectionModel model;
  Eigen::VectorXd loads;
  Eigen::VectorXd dispatch;
};

// Loads served pro rata to generator capacity.
Scenario Make(const char* name) {
  Scenario s;
  s.grid = LoadCaseFile(testing_util::CasePath(name));
  s.model = BuildInjectionModel(s.grid);
  s.loads = Eigen::Map<Eigen::VectorXd>(s.grid.Loads().data(),
                                        s.grid.num_buses());
  s.dispatch.resize(s.grid.num_generators());
  double capacity = 0;
  for (const Generator& g : s.grid.generators) capacity += g.pmax;
  for (int g = 0; g < s.grid.num_generators(); ++g) {
    s.dispatch(g) = s.grid.generators[g].pmax / capacity * s.loads.sum();
  }
  return s;
}

TEST(StateEstimationTest, NoiselessMeasurementsAreExact) {
  Scenario s = Make("case14.m");
  MeasurementSet m = SimulateMeasurements(s.model, s.dispatch, s.loads, 0, 1);
  EXPECT_EQ(m.size(), 14 + 2 * 20);
  const Eigen::VectorXd theta =
      oracle::Angles(s.grid, s.model.Injection(s.dispatch, s.loads), 0);
  const Eigen::VectorXd truth = Eigen::MatrixXd(m.h) * theta;
  EXPECT_LE((m.Values() - truth).cwiseAbs().maxCoeff(), 1e-12);
  EstimationResult r = WlsEstimate(m);
  EXPECT_LE((r.x_hat - theta).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(r.residual.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(m.entries[0].variance, kVarianceFloor);
}

TEST(StateEstimationTest, SameSeedSameMeasurements) {
  Scenario s = Make("case14.m");
  MeasurementSet a = SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, 7);
  MeasurementSet b = SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, 7);
  EXPECT_EQ(a.Values(), b.Values());
  MeasurementSet c = SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, 8);
  EXPECT_NE(a.Values(), c.Values());
}

TEST(StateEstimationTest, NoiseHasRequestedSpread) {
  Scenario s = Make("case14.m");
  MeasurementSet clean = SimulateMeasurements(s.model, s.dispatch, s.loads, 0, 0);
  double sum_sq = 0;
  int count = 0;
  for (uint64_t seed = 0; count < 10000; ++seed) {
    MeasurementSet m =
        SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, seed);
    const Eigen::VectorXd e = m.Values() - clean.Values();
    sum_sq += e.squaredNorm();
    count += static_cast<int>(e.size());
  }
  EXPECT_NEAR(std::sqrt(sum_sq / count), 0.01, 0.05 * 0.01);
}

TEST(StateEstimationTest, DuplicatedMeasurementsGiveSameEstimate) {
  Scenario s = Make("case14.m");
  MeasurementSet m = SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, 3);
  MeasurementSet twice = m;
  twice.entries.insert(twice.entries.end(), m.entries.begin(), m.entries.end());
  Eigen::SparseMatrix<double, Eigen::RowMajor> h(2 * m.size(), m.h.cols());
  Eigen::MatrixXd dense(2 * m.size(), m.h.cols());
  dense << Eigen::MatrixXd(m.h), Eigen::MatrixXd(m.h);
  twice.h = dense.sparseView();
  EXPECT_LE((WlsEstimate(twice).x_hat - WlsEstimate(m).x_hat)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(StateEstimationTest, ObjectiveMatchesDefinitionAndGradientVanishes) {
  Scenario s = Make("case14.m");
  MeasurementSet m = SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, 4);
  EstimationResult r = WlsEstimate(m);
  const Eigen::MatrixXd h = Eigen::MatrixXd(m.h);
  const Eigen::VectorXd rinv = m.Variances().cwiseInverse();
  const Eigen::VectorXd resid = m.Values() - h * r.x_hat;
  const double j = resid.dot(rinv.asDiagonal() * resid);
  EXPECT_NEAR(r.objective, j, 1e-10);
  Eigen::VectorXd grad = -2.0 * h.transpose() * (rinv.asDiagonal() * resid);
  grad(m.slack) = 0.0;
  // Gradient relative to the size of its terms.
  const double scale =
      2.0 * (h.cwiseAbs().transpose() * (rinv.asDiagonal() * m.Values().cwiseAbs()))
                .maxCoeff();
  EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-8 * scale);
}

TEST(StateEstimationTest, UnobservableSetRejected) {
  Scenario s = Make("case14.m");
  MeasurementSet m = SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, 4);
  // Keep only the injection at bus 1.
  MeasurementSet tiny = m;
  tiny.entries.resize(1);
  tiny.h = m.h.topRows(1);
  EXPECT_THROW(WlsEstimate(tiny), UnobservableError);
}

class UnobservabilityTest : public ::testing::TestWithParam<const char*> {};

TEST_P(UnobservabilityTest, AttackLeavesResidualUnchanged) {
  Scenario s = Make(GetParam());
  MeasurementSet clean = SimulateMeasurements(s.model, s.dispatch, s.loads, 0, 1);
  EstimationResult base = WlsEstimate(clean);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd c = oracle::RandomValidAttack(s.grid, 0.1, rng);
    MeasurementSet attacked = ApplyAttack(clean, c);
    EstimationResult r = WlsEstimate(attacked);
    EXPECT_LE(std::abs(r.objective - base.objective), 1e-10);
    EXPECT_LE((r.residual - base.residual).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((r.x_hat - base.x_hat - c).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(BadDataTest(r, attacked).pass);
  }
}

INSTANTIATE_TEST_SUITE_P(Cases, UnobservabilityTest,
                         ::testing::Values("case14.m", "case24_ieee_rts.m",
                                           "case118.m"));

TEST(StateEstimationTest, ZeroAttackChangesNothing) {
  Scenario s = Make("case14.m");
  MeasurementSet m = SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, 2);
  MeasurementSet a = ApplyAttack(m, Eigen::VectorXd::Zero(14));
  EXPECT_EQ(a.Values(), m.Values());
  EXPECT_THROW(ApplyAttack(m, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(StateEstimationTest, GrossErrorDetected) {
  Scenario s = Make("case14.m");
  const double sigma = 0.01;
  int detected = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    MeasurementSet m =
        SimulateMeasurements(s.model, s.dispatch, s.loads, sigma, seed);
    // Flow measurement at the from end of branch 4-9 (a meshed branch).
    const int row = 14 + 8;
    m.entries[row].value += 10 * sigma;
    BadDataReport report = BadDataTest(WlsEstimate(m), m);
    if (!report.pass) ++detected;
  }
  EXPECT_GE(detected, 95);
}

TEST(StateEstimationTest, CleanNoiselessDataPasses) {
  Scenario s = Make("case14.m");
  MeasurementSet m = SimulateMeasurements(s.model, s.dispatch, s.loads, 0, 2);
  BadDataReport report = BadDataTest(WlsEstimate(m), m);
  EXPECT_TRUE(report.pass);
  EXPECT_LT(report.objective, 1e-12);
  EXPECT_EQ(report.degrees_of_freedom, 54 - 13);
}

TEST(StateEstimationTest, FalseAlarmRateMatchesAlpha) {
  Scenario s = Make("case14.m");
  int alarms = 0;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    MeasurementSet m =
        SimulateMeasurements(s.model, s.dispatch, s.loads, 0.01, seed);
    if (!BadDataTest(WlsEstimate(m), m, 0.05).pass) ++alarms;
  }
  EXPECT_NEAR(alarms / 1000.0, 0.05, 0.03);
}

TEST(StateEstimationTest, CsvDump) {
  Scenario s = Make("case14.m");
  MeasurementSet m = SimulateMeasurements(s.model, s.dispatch, s.loads, 0, 2);
  std::ostringstream out;
  WriteMeasurementsCsv(m, s.grid, out);
  const std::string csv = out.str();
  EXPECT_EQ(csv.rfind("kind,element,value,variance\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 55);
  EXPECT_NE(csv.find("flow_to,20,"), std::string::npos);
}

}  // namespace
}  // namespace gridfdi
