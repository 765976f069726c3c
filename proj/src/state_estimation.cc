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

#include <cmath>
#include <cstdio>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

namespace gridfdi {
namespace {

using Triplet = Eigen::Triplet<double>;

// Dense H with the slack column removed, rows scaled by 1/sigma.
Eigen::MatrixXd WeightedReducedH(const MeasurementSet& meas) {
  const Eigen::MatrixXd h = Eigen::MatrixXd(meas.h);
  const int n = static_cast<int>(h.cols());
  Eigen::MatrixXd reduced(h.rows(), n - 1);
  reduced.leftCols(meas.slack) = h.leftCols(meas.slack);
  reduced.rightCols(n - meas.slack - 1) = h.rightCols(n - meas.slack - 1);
  const Eigen::VectorXd inv_sigma = meas.Variances().cwiseSqrt().cwiseInverse();
  return inv_sigma.asDiagonal() * reduced;
}

const char* KindName(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::kInjection:
      return "injection";
    case MeasurementKind::kFlowFrom:
      return "flow_from";
    case MeasurementKind::kFlowTo:
      return "flow_to";
  }
  return "unknown";
}

}  // namespace

Eigen::VectorXd MeasurementSet::Values() const {
  Eigen::VectorXd z(size());
  for (int i = 0; i < size(); ++i) z(i) = entries[i].value;
  return z;
}

Eigen::VectorXd MeasurementSet::Variances() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v(i) = entries[i].variance;
  return v;
}

MeasurementSet SimulateMeasurements(const InjectionModel& model,
                                    const Eigen::VectorXd& dispatch,
                                    const Eigen::VectorXd& loads,
                                    double noise_stddev, uint64_t seed) {
  if (!(noise_stddev >= 0.0)) {
    throw std::invalid_argument("noise standard deviation must be >= 0");
  }
  const Eigen::VectorXd injection = model.Injection(dispatch, loads);
  if (std::abs(injection.sum()) > BalanceTolerance(loads)) {
    throw ImbalanceError("dispatch does not balance the loads");
  }
  const int nb = model.num_buses();
  const int nbr = model.num_branches();
  const Eigen::VectorXd theta = model.Angles(injection);

  MeasurementSet meas;
  meas.slack = model.slack();
  std::vector<Triplet> entries;
  int row = 0;
  for (int i = 0; i < nb; ++i, ++row) {
    meas.entries.push_back({MeasurementKind::kInjection, i, 0.0, 0.0});
    for (Eigen::SparseMatrix<double>::InnerIterator it(model.b_bus(), i); it;
         ++it) {
      entries.emplace_back(row, static_cast<int>(it.row()), it.value());
    }
  }
  const Eigen::SparseMatrix<double, Eigen::RowMajor> br = model.b_branch();
  for (int k = 0; k < nbr; ++k, ++row) {
    meas.entries.push_back({MeasurementKind::kFlowFrom, k, 0.0, 0.0});
    for (decltype(br)::InnerIterator it(br, k); it; ++it) {
      entries.emplace_back(row, static_cast<int>(it.col()), it.value());
    }
  }
  for (int k = 0; k < nbr; ++k, ++row) {
    meas.entries.push_back({MeasurementKind::kFlowTo, k, 0.0, 0.0});
    for (decltype(br)::InnerIterator it(br, k); it; ++it) {
      entries.emplace_back(row, static_cast<int>(it.col()), -it.value());
    }
  }
  meas.h.resize(row, nb);
  meas.h.setFromTriplets(entries.begin(), entries.end());

  const Eigen::VectorXd truth = meas.h * theta;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double variance =
      std::max(noise_stddev * noise_stddev, kVarianceFloor);
  for (int i = 0; i < row; ++i) {
    double noise = 0.0;
    if (noise_stddev > 0.0) noise = noise_stddev * normal(rng);
    meas.entries[i].value = truth(i) + noise;
    meas.entries[i].variance = variance;
  }
  return meas;
}

EstimationResult WlsEstimate(const MeasurementSet& meas) {
  const int n = static_cast<int>(meas.h.cols());
  for (const Measurement& m : meas.entries) {
    if (!(m.variance > 0.0)) {
      throw std::invalid_argument("measurement variances must be positive");
    }
  }
  const Eigen::MatrixXd a = WeightedReducedH(meas);
  const Eigen::VectorXd z = meas.Values();
  const Eigen::VectorXd inv_sigma = meas.Variances().cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd b = inv_sigma.cwiseProduct(z);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < n - 1) {
    throw UnobservableError("measurement set is unobservable: rank " +
                            std::to_string(qr.rank()) + " < " +
                            std::to_string(n - 1));
  }
  Eigen::VectorXd x = qr.solve(b);
  // One step of iterative refinement.
  x += qr.solve(b - a * x);

  EstimationResult result;
  result.x_hat = Eigen::VectorXd::Zero(n);
  result.x_hat.head(meas.slack) = x.head(meas.slack);
  result.x_hat.tail(n - meas.slack - 1) = x.tail(n - meas.slack - 1);
  result.residual = z - meas.h * result.x_hat;
  result.objective =
      (result.residual.cwiseProduct(inv_sigma)).squaredNorm();
  return result;
}

MeasurementSet ApplyAttack(const MeasurementSet& meas,
                           const Eigen::VectorXd& c) {
  if (c.size() != meas.h.cols()) {
    throw std::invalid_argument("attack vector length does not match H");
  }
  MeasurementSet attacked = meas;
  const Eigen::VectorXd delta = meas.h * c;
  for (int i = 0; i < attacked.size(); ++i) {
    attacked.entries[i].value += delta(i);
  }
  return attacked;
}

BadDataReport BadDataTest(const EstimationResult& result,
                          const MeasurementSet& meas, double alpha) {
  BadDataReport report;
  const int n = static_cast<int>(meas.h.cols());
  report.objective = result.objective;
  report.degrees_of_freedom = meas.size() - (n - 1);
  if (report.degrees_of_freedom > 0) {
    boost::math::chi_squared dist(report.degrees_of_freedom);
    report.threshold = boost::math::quantile(dist, 1.0 - alpha);
  } else {
    report.threshold = 0.0;
  }
  report.pass = report.degrees_of_freedom <= 0 ||
                result.objective < report.threshold;

  // Residual covariance diagonal: sigma_i^2 (1 - ||Q_i||^2) with Q the
  // orthonormal basis of the weighted Jacobian.
  const Eigen::MatrixXd a = WeightedReducedH(meas);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::VectorXd variances = meas.Variances();
  for (int i = 0; i < meas.size(); ++i) {
    const double omega = variances(i) * (1.0 - q.row(i).squaredNorm());
    // Critical measurements have zero residual variance; skip them.
    if (omega <= 1e-12 * variances(i)) continue;
    const double rn = std::abs(result.residual(i)) / std::sqrt(omega);
    if (rn > report.largest_normalized_residual) {
      report.largest_normalized_residual = rn;
      report.largest_index = i;
    }
  }
  return report;
}

void WriteMeasurementsCsv(const MeasurementSet& meas, const GridCase& grid,
                          std::ostream& out) {
  out << "kind,element,value,variance\n";
  char buf[64];
  for (const Measurement& m : meas.entries) {
    const int id = m.kind == MeasurementKind::kInjection
                       ? grid.buses[m.element].id
                       : grid.branches[m.element].id;
    out << KindName(m.kind) << ',' << id << ',';
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", m.value, m.variance);
    out << buf << '\n';
  }
}

}  // namespace gridfdi
