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

// DC weighted-least-squares state estimation and residual-based bad data
// detection over a full measurement suite (every bus injection and the flow
// at both ends of every branch).

#ifndef GRIDFDI_STATE_ESTIMATION_H_
#define GRIDFDI_STATE_ESTIMATION_H_

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gridfdi/case_io.h"
#include "gridfdi/network.h"

namespace gridfdi {

inline constexpr double kVarianceFloor = 1e-8;

enum class MeasurementKind { kInjection, kFlowFrom, kFlowTo };

struct Measurement {
  MeasurementKind kind = MeasurementKind::kInjection;
  int element = 0;  // bus position for injections, branch position for flows
  double value = 0.0;
  double variance = 1.0;
};

struct MeasurementSet {
  std::vector<Measurement> entries;
  Eigen::SparseMatrix<double, Eigen::RowMajor> h;  // n_m x n_b
  int slack = 0;

  int size() const { return static_cast<int>(entries.size()); }
  Eigen::VectorXd Values() const;
  Eigen::VectorXd Variances() const;
};

struct EstimationResult {
  Eigen::VectorXd x_hat;     // angles, slack at zero
  Eigen::VectorXd residual;  // z - H x_hat
  double objective = 0.0;    // weighted residual sum of squares
};

class UnobservableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builds the full measurement suite for the model; values come from the
// exact DC solution plus i.i.d. Gaussian noise drawn from mt19937_64(seed).
MeasurementSet SimulateMeasurements(const InjectionModel& model,
                                    const Eigen::VectorXd& dispatch,
                                    const Eigen::VectorXd& loads,
                                    double noise_stddev, uint64_t seed);

// Throws UnobservableError when H without the slack column is rank deficient.
EstimationResult WlsEstimate(const MeasurementSet& meas);

// z + H c for every entry.
MeasurementSet ApplyAttack(const MeasurementSet& meas, const Eigen::VectorXd& c);

struct BadDataReport {
  bool pass = true;
  double objective = 0.0;
  double threshold = 0.0;
  int degrees_of_freedom = 0;
  double largest_normalized_residual = 0.0;
  int largest_index = -1;
};

BadDataReport BadDataTest(const EstimationResult& result,
                          const MeasurementSet& meas, double alpha = 0.05);

// Columns: kind,element,value,variance; element is the bus or branch id.
void WriteMeasurementsCsv(const MeasurementSet& meas, const GridCase& grid,
                          std::ostream& out);

}  // namespace gridfdi

#endif  // GRIDFDI_STATE_ESTIMATION_H_
