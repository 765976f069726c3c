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

#include "gridfdi/attack_model.h"

#include <cmath>

#include <json.hpp>

namespace gridfdi {
namespace {

struct Incidence {
  std::vector<std::vector<int>> branches;  // per bus, incident branch ids
};

Incidence BuildIncidence(const InjectionModel& model) {
  Incidence inc;
  inc.branches.resize(model.num_buses());
  for (int k = 0; k < model.num_branches(); ++k) {
    inc.branches[model.from(k)].push_back(k);
    inc.branches[model.to(k)].push_back(k);
  }
  return inc;
}

int OtherEnd(const InjectionModel& model, int branch, int bus) {
  return model.from(branch) == bus ? model.to(branch) : model.from(branch);
}

}  // namespace

AttackSubgraph BuildSubgraph(const AttackVector& attack, const GridCase& grid,
                             const InjectionModel& model) {
  const int nb = model.num_buses();
  if (attack.c.size() != nb) {
    throw std::invalid_argument("attack vector has wrong length");
  }
  AttackSubgraph s;
  std::vector<int> seeds;
  for (int i = 0; i < nb; ++i) {
    if (std::abs(attack.c(i)) <= kAttackZeroThreshold) continue;
    seeds.push_back(i);
    if (grid.buses[i].is_load()) s.center_buses.insert(i);
  }
  if (seeds.empty()) {
    throw EmptyAttackError("attack vector has no nonzero entries");
  }
  const Incidence inc = BuildIncidence(model);
  auto include_neighborhood = [&](int bus) {
    s.buses.insert(bus);
    for (int k : inc.branches[bus]) {
      s.branches.insert(k);
      s.buses.insert(OtherEnd(model, k, bus));
    }
  };

  // Steps 1 and 2: the center buses and everything adjacent to them.
  for (int bus : seeds) include_neighborhood(bus);

  // Steps 3 and 4: open up non-load buses on the boundary until none remain.
  std::set<int> expanded(seeds.begin(), seeds.end());
  while (true) {
    std::vector<int> to_expand;
    for (int bus : s.buses) {
      if (grid.buses[bus].is_load() || expanded.count(bus) != 0) continue;
      bool on_boundary = false;
      for (int k : inc.branches[bus]) {
        if (s.branches.count(k) == 0) on_boundary = true;
      }
      if (on_boundary) to_expand.push_back(bus);
    }
    if (to_expand.empty()) break;
    ++s.expansion_rounds;
    for (int bus : to_expand) {
      expanded.insert(bus);
      include_neighborhood(bus);
    }
  }
  s.full_network = static_cast<int>(s.buses.size()) == nb;
  return s;
}

Eigen::VectorXd CyberLoads(const Eigen::VectorXd& c, const GridCase& grid,
                           const InjectionModel& model) {
  Eigen::VectorXd loads = Eigen::Map<const Eigen::VectorXd>(
      grid.Loads().data(), grid.num_buses());
  return loads - model.h_inj() * c;
}

Eigen::VectorXd LoadShiftBounds(const GridCase& grid, double load_shift) {
  Eigen::VectorXd bound(grid.num_buses());
  for (int i = 0; i < grid.num_buses(); ++i) {
    bound(i) = load_shift * std::max(0.0, grid.buses[i].pd);
  }
  return bound;
}

AttackCheck CheckAttack(const AttackVector& attack, const GridCase& grid,
                        const InjectionModel& model, double tolerance) {
  const int nb = model.num_buses();
  if (attack.c.size() != nb) {
    throw std::invalid_argument("attack vector has wrong length");
  }
  AttackCheck report;
  report.n1 = attack.n1;
  for (int i = 0; i < nb; ++i) {
    const double v = attack.c(i);
    const bool nonzero = std::abs(v) > kAttackZeroThreshold;
    if (grid.buses[i].is_load()) report.l1_usage += std::abs(v);
    if (!nonzero) continue;
    ++report.l0;
    if (grid.buses[i].is_load() && i != model.slack()) {
      ++report.center_count;
    } else {
      report.support_violations.push_back(i);
    }
  }
  report.l1_ok = report.l1_usage <= attack.n1 + tolerance;

  const Eigen::VectorXd shift = model.h_inj() * attack.c;
  const Eigen::VectorXd bound = LoadShiftBounds(grid, attack.load_shift);
  report.shift_slack = bound - shift.cwiseAbs();
  for (int i = 0; i < nb; ++i) {
    if (report.shift_slack(i) < -tolerance) report.shift_violations.push_back(i);
  }
  if (report.l0 > 0) {
    const AttackSubgraph s = BuildSubgraph(attack, grid, model);
    report.subgraph_buses = static_cast<int>(s.buses.size());
    report.subgraph_branches = static_cast<int>(s.branches.size());
  }
  return report;
}

std::string AttackDescriptorToJson(const AttackDescriptor& descriptor,
                                   const GridCase& grid) {
  nlohmann::ordered_json doc;
  doc["target_line"] = descriptor.target_line;
  doc["N1"] = descriptor.attack.n1;
  doc["LS"] = descriptor.attack.load_shift;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (int i = 0; i < descriptor.attack.c.size(); ++i) {
    const double v = descriptor.attack.c(i);
    if (std::abs(v) > kAttackZeroThreshold) {
      c[std::to_string(grid.buses[i].id)] = v;
    }
  }
  doc["c"] = std::move(c);
  return doc.dump(2) + "\n";
}

AttackDescriptor AttackDescriptorFromJson(const std::string& text,
                                          const GridCase& grid) {
  AttackDescriptor d;
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    d.target_line = doc.at("target_line").get<int>();
    d.attack.n1 = doc.at("N1").get<double>();
    d.attack.load_shift = doc.value("LS", 0.1);
    d.attack.c = Eigen::VectorXd::Zero(grid.num_buses());
    const std::map<int, int> index = grid.BusIndex();
    for (const auto& [key, value] : doc.at("c").items()) {
      const int id = std::stoi(key);
      auto it = index.find(id);
      if (it == index.end()) {
        throw std::invalid_argument("attack descriptor references unknown bus " +
                                    key);
      }
      d.attack.c(it->second) = value.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed attack descriptor: ") +
                                e.what());
  }
  if (grid.BranchPosition(d.target_line) < 0) {
    throw std::invalid_argument("attack descriptor targets unknown line " +
                                std::to_string(d.target_line));
  }
  return d;
}

}  // namespace gridfdi
