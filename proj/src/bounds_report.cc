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

#include "gridfdi/bounds_report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include <json.hpp>

namespace gridfdi {
namespace {

std::string Number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Optional(const std::optional<double>& v) {
  return v ? Number(*v) : std::string();
}

// Converged value of one method at one point, if any.
struct Point {
  std::optional<double> original, a1, a2, a3_lb, a3_ub;
  double rating = 0.0;
};

std::map<std::pair<int, double>, Point> Collect(const BoundsReport& report) {
  std::map<std::pair<int, double>, Point> points;
  for (const InstanceRecord& rec : report.records) {
    Point& p = points[{rec.target_line, rec.n1}];
    p.rating = rec.rating;
    const AttackResult& r = rec.result;
    switch (r.method) {
      case Method::kOriginal:
        if (r.converged()) p.original = r.flow;
        break;
      case Method::kA1:
        if (r.converged()) p.a1 = r.flow;
        break;
      case Method::kA2:
        if (r.converged()) p.a2 = r.flow;
        break;
      case Method::kA3:
        p.a3_lb = r.flow;
        p.a3_ub = r.upper;
        break;
    }
  }
  return points;
}

}  // namespace

void BoundsReport::Sort() {
  std::stable_sort(records.begin(), records.end(),
                   [](const InstanceRecord& a, const InstanceRecord& b) {
                     return std::make_tuple(a.target_line, a.n1,
                                            static_cast<int>(a.result.method)) <
                            std::make_tuple(b.target_line, b.n1,
                                            static_cast<int>(b.result.method));
                   });
}

void WriteBoundsCsv(const BoundsReport& report, const GridCase& grid,
                    std::ostream& out, const CsvOptions& options) {
  (void)grid;
  out << "target_line,n1,method,status,objective_pu,overflow_ratio,"
         "binaries_initial,binaries_final,iterations,solve_ms\n";
  for (const InstanceRecord& rec : report.records) {
    const AttackResult& r = rec.result;
    auto row = [&](const std::string& method, const std::optional<double>& value,
                   int bin_initial, int bin_final) {
      std::optional<double> ratio;
      if (value && rec.rating > 0.0) ratio = *value / rec.rating;
      out << rec.target_line << ',' << Number(rec.n1) << ',' << method << ','
          << ToString(r.status) << ',' << Optional(value) << ','
          << Optional(ratio) << ',' << bin_initial << ',' << bin_final << ','
          << r.iterations << ',';
      if (options.timing) out << Number(std::round(r.solve_ms * 1e3) / 1e3);
      out << '\n';
    };
    if (r.method == Method::kA3) {
      row("A3_lb", r.flow, 0, 0);
      row("A3_ub", r.upper, 0, 0);
    } else {
      row(std::string(ToString(r.method)), r.flow, r.binaries_initial,
          r.binaries_final);
    }
  }
}

void WriteBoundsJson(const BoundsReport& report, const GridCase& grid,
                     std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["case"] = report.case_name;
  doc["load_shift"] = report.load_shift;
  doc["sigma"] = report.sigma;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const InstanceRecord& rec : report.records) {
    const AttackResult& r = rec.result;
    nlohmann::ordered_json item;
    item["target_line"] = rec.target_line;
    item["n1"] = rec.n1;
    item["method"] = ToString(r.method);
    item["status"] = ToString(r.status);
    if (!r.message.empty()) item["message"] = r.message;
    item["rating"] = rec.rating;
    item["flow_sign"] = r.flow_sign;
    item["flow"] = r.flow ? nlohmann::ordered_json(*r.flow) : nullptr;
    if (r.method == Method::kA3) {
      item["upper"] = r.upper ? nlohmann::ordered_json(*r.upper) : nullptr;
    }
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (int i = 0; i < r.c.size(); ++i) {
      if (std::abs(r.c(i)) > kAttackZeroThreshold) {
        c[std::to_string(grid.buses[i].id)] = r.c(i);
      }
    }
    item["c"] = std::move(c);
    std::vector<double> dispatch(r.dispatch.data(),
                                 r.dispatch.data() + r.dispatch.size());
    item["dispatch"] = dispatch;
    std::vector<int> q, gens;
    for (int k : r.state.q) q.push_back(grid.branches[k].id);
    for (int g : r.state.r) gens.push_back(grid.generators[g].id);
    item["retained_lines"] = q;
    item["retained_generators"] = gens;
    item["binaries_initial"] = r.binaries_initial;
    item["binaries_final"] = r.binaries_final;
    item["iterations"] = r.iterations;
    item["nodes"] = r.nodes;
    item["big_m_resolves"] = r.big_m_resolves;
    list.push_back(std::move(item));
  }
  doc["instances"] = std::move(list);
  out << doc.dump(2) << '\n';
}

std::vector<int> ReportTargets(const BoundsReport& report) {
  std::set<int> targets;
  for (const InstanceRecord& rec : report.records) targets.insert(rec.target_line);
  return {targets.begin(), targets.end()};
}

namespace {

std::vector<Method> PlotMethods(const BoundsReport& report) {
  if (report.methods.empty()) {
    return {Method::kOriginal, Method::kA1, Method::kA2, Method::kA3};
  }
  std::vector<Method> methods = report.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  return methods;
}

std::string PlotHeader(const std::vector<Method>& methods) {
  std::string header = "n1";
  for (Method m : methods) {
    header += m == Method::kA3 ? ",A3_lb,A3_ub" : "," + std::string(ToString(m));
  }
  return header + ",rating\n";
}

void PlotRow(const std::vector<Method>& methods, double n1, const Point& p,
             std::ostream& out) {
  out << Number(n1);
  for (Method m : methods) {
    switch (m) {
      case Method::kOriginal:
        out << ',' << Optional(p.original);
        break;
      case Method::kA1:
        out << ',' << Optional(p.a1);
        break;
      case Method::kA2:
        out << ',' << Optional(p.a2);
        break;
      case Method::kA3:
        out << ',' << Optional(p.a3_lb) << ',' << Optional(p.a3_ub);
        break;
    }
  }
  out << ',' << Number(p.rating) << '\n';
}

}  // namespace

void WritePlotData(const BoundsReport& report, int target_line,
                   std::ostream& out) {
  const std::vector<Method> methods = PlotMethods(report);
  out << PlotHeader(methods);
  for (const auto& [key, p] : Collect(report)) {
    if (key.first == target_line) PlotRow(methods, key.second, p, out);
  }
}

void WritePlotDataAll(const BoundsReport& report, std::ostream& out) {
  const std::vector<Method> methods = PlotMethods(report);
  out << "target_line," << PlotHeader(methods);
  for (const auto& [key, p] : Collect(report)) {
    out << key.first << ',';
    PlotRow(methods, key.second, p, out);
  }
}

std::vector<std::string> CheckBoundOrdering(const BoundsReport& report,
                                            double tolerance) {
  std::vector<std::string> problems;
  for (const auto& [key, p] : Collect(report)) {
    const std::string where =
        "target " + std::to_string(key.first) + " N1 " + Number(key.second) + ": ";
    // The exact optimum, from whichever exact method converged.
    for (const std::optional<double>& exact : {p.a1, p.original}) {
      if (!exact) continue;
      if (p.a3_lb && *p.a3_lb > *exact + tolerance) {
        problems.push_back(where + "A3 lower bound " + Number(*p.a3_lb) +
                           " exceeds optimum " + Number(*exact));
      }
      if (p.a3_ub && *exact + tolerance > *p.a3_ub + 2 * tolerance) {
        problems.push_back(where + "optimum " + Number(*exact) +
                           " exceeds A3 upper bound " + Number(*p.a3_ub));
      }
      if (p.a2 && *p.a2 > *exact + tolerance) {
        problems.push_back(where + "A2 " + Number(*p.a2) + " exceeds optimum " +
                           Number(*exact));
      }
    }
    if (p.a1 && p.original && std::abs(*p.a1 - *p.original) > tolerance) {
      problems.push_back(where + "A1 " + Number(*p.a1) + " differs from original " +
                         Number(*p.original));
    }
  }
  return problems;
}

}  // namespace gridfdi
