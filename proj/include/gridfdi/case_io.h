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

// Grid case model and its two text forms: a MATPOWER-style script subset
// and a canonical JSON document. All quantities are stored in per-unit on
// the system base.

#ifndef GRIDFDI_CASE_IO_H_
#define GRIDFDI_CASE_IO_H_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridfdi {

enum class BusType { kLoad, kNonLoad, kSlack };

struct Bus {
  int id = 0;
  BusType type = BusType::kNonLoad;
  double pd = 0.0;  // pu

  // Load classification is by demand alone, so a slack bus can be a load bus.
  bool is_load() const { return pd > 0.0; }
  bool operator==(const Bus&) const = default;
};

struct Branch {
  int id = 0;  // 1-based row of the source branch table
  int from_bus = 0;
  int to_bus = 0;
  double x = 0.0;     // pu
  double rate = 0.0;  // pu
  bool in_service = true;
  bool operator==(const Branch&) const = default;
};

struct Generator {
  int id = 0;  // 1-based row of the source gen table
  int bus = 0;
  double pmin = 0.0;  // pu
  double pmax = 0.0;  // pu
  double cost = 0.0;  // per pu
  double cost_constant = 0.0;
  bool operator==(const Generator&) const = default;
};

struct GridCase {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_branches() const { return static_cast<int>(branches.size()); }
  int num_generators() const { return static_cast<int>(generators.size()); }

  // Bus id -> position in `buses`.
  std::map<int, int> BusIndex() const;
  int SlackIndex() const;
  // Position of the branch with the given id, or -1.
  int BranchPosition(int branch_id) const;
  std::vector<double> Loads() const;
  double TotalLoad() const;

  bool operator==(const GridCase&) const = default;
};

class CaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CaseSyntaxError : public CaseError {
 public:
  CaseSyntaxError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class CaseValidationError : public CaseError {
 public:
  using CaseError::CaseError;
};

class UnsupportedFeatureError : public CaseError {
 public:
  UnsupportedFeatureError(const std::string& table, const std::string& what);
  const std::string& table() const { return table_; }

 private:
  std::string table_;
};

// Named numeric tables as read from a MATPOWER-style script.
struct RawCaseDocument {
  std::string name;
  std::string version;
  double base_mva = 0.0;
  std::map<std::string, std::vector<std::vector<double>>> tables;
};

RawCaseDocument ParseMatpowerText(const std::string& text);

// Accepts either form; JSON is detected by a leading '{'.
GridCase ParseCase(const std::string& text);
GridCase LoadCaseFile(const std::filesystem::path& path);

// Canonical JSON; ParseCase(SerializeCase(c)) == c.
std::string SerializeCase(const GridCase& grid);

// Throws CaseValidationError naming the first violated invariant.
void ValidateCase(const GridCase& grid);

// Slope of the tangent to a MATPOWER polynomial (highest order first, MW
// units) at the midpoint of [pmin_mw, pmax_mw], and the matching intercept.
struct LinearCost {
  double slope = 0.0;  // per MW
  double constant = 0.0;
};
LinearCost LinearizeCost(const std::vector<double>& coefficients,
                         double pmin_mw, double pmax_mw);

std::string ToString(BusType type);

}  // namespace gridfdi

#endif  // GRIDFDI_CASE_IO_H_
