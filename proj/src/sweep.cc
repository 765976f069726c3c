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

#include "gridfdi/sweep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gridfdi/solver/backend.h"

namespace gridfdi {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& KnownKeys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"case", {"path"}},
      {"sweep",
       {"methods", "targets", "n1_start", "n1_stop", "n1_step", "load_shift",
        "sigma", "critical_threshold", "iteration_cap", "seed"}},
      {"solver", {"backend", "time_limit", "node_limit"}},
      {"run", {"threads", "output", "timing"}},
  };
  return keys;
}

template <typename T>
T Get(const pt::ptree& tree, const std::string& key, T fallback) {
  auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_error&) {
    throw ConfigError("bad value for " + key + ": '" + node->data() + "'");
  }
}

bool ParseBool(const std::string& key, std::string text) {
  boost::algorithm::to_lower(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("bad value for " + key + ": '" + text + "'");
}

std::string Join(const std::vector<std::string>& parts) {
  return boost::algorithm::join(parts, ",");
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct Instance {
  int target_line = 0;
  double n1 = 0.0;
  Method method = Method::kA1;
};

InstanceRecord Solve(const SweepConfig& config, const GridCase& grid,
                     const AttackContext& ctx, const Instance& inst) {
  InstanceRecord rec;
  rec.target_line = inst.target_line;
  rec.n1 = inst.n1;
  rec.rating = grid.branches[grid.BranchPosition(inst.target_line)].rate;
  rec.result.method = inst.method;
  AttackProblemSpec spec;
  spec.target_line = inst.target_line;
  spec.n1 = inst.n1;
  spec.load_shift = config.load_shift;
  spec.sigma = config.sigma;
  spec.critical_threshold = config.critical_threshold;
  spec.iteration_cap = config.iteration_cap;
  if (config.time_limit > 0.0) spec.milp.time_limit_seconds = config.time_limit;
  spec.milp.node_limit = config.node_limit;
  try {
    rec.result = RunMethod(inst.method, ctx, spec);
  } catch (const std::exception& e) {
    rec.result = AttackResult{};
    rec.result.method = inst.method;
    rec.result.status = AttackStatus::kError;
    rec.result.message = e.what();
  }
  return rec;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw OutputError("write failed for " + path.string());
}

}  // namespace

void SweepConfig::Validate() const {
  if (case_path.empty()) throw ConfigError("no case path given");
  if (methods.empty()) throw ConfigError("no methods selected");
  if (!(n1_step > 0.0)) throw ConfigError("n1_step must be positive");
  if (!(n1_start >= 0.0)) throw ConfigError("n1_start must be nonnegative");
  if (!(n1_start <= n1_stop)) throw ConfigError("n1_start exceeds n1_stop");
  if (!(load_shift > 0.0 && load_shift < 1.0)) {
    throw ConfigError("load_shift must lie in (0, 1)");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be positive");
  }
  if (!(critical_threshold > 0.0)) {
    throw ConfigError("critical_threshold must be positive");
  }
  if (iteration_cap < 1) throw ConfigError("iteration_cap must be at least 1");
  if (time_limit < 0.0) throw ConfigError("time_limit must be nonnegative");
  if (node_limit < 1) throw ConfigError("node_limit must be at least 1");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (backend != "native" && backend != "external") {
    throw ConfigError("unknown backend '" + backend + "'");
  }
  if (!critical_targets && !all_targets && targets.empty()) {
    throw ConfigError("no target lines given");
  }
  if (BudgetGrid().size() > 100000) throw ConfigError("N1 grid is too large");
}

std::vector<double> SweepConfig::BudgetGrid() const {
  std::vector<double> grid;
  const double span = (n1_stop - n1_start) / n1_step;
  const auto count = static_cast<int64_t>(std::floor(span + 1e-9)) + 1;
  for (int64_t i = 0; i < count && i <= 100000; ++i) {
    const double v = n1_start + static_cast<double>(i) * n1_step;
    grid.push_back(std::round(v * 1e12) / 1e12);
  }
  return grid;
}

std::vector<Method> ParseMethodList(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(", "),
                          boost::token_compress_on);
  std::vector<Method> methods;
  for (const std::string& part : parts) {
    if (part.empty()) continue;
    const std::optional<Method> m = ParseMethod(part);
    if (!m) throw ConfigError("unknown method '" + part + "'");
    if (std::find(methods.begin(), methods.end(), *m) == methods.end()) {
      methods.push_back(*m);
    }
  }
  if (methods.empty()) throw ConfigError("empty method list");
  std::sort(methods.begin(), methods.end());
  return methods;
}

void ParseTargets(const std::string& text, SweepConfig& config) {
  std::string t = boost::algorithm::trim_copy(text);
  boost::algorithm::to_lower(t);
  config.targets.clear();
  config.critical_targets = t == "critical";
  config.all_targets = t == "all";
  if (config.critical_targets || config.all_targets) return;
  std::vector<std::string> parts;
  boost::algorithm::split(parts, t, boost::is_any_of(", "),
                          boost::token_compress_on);
  for (const std::string& part : parts) {
    if (part.empty()) continue;
    size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size()) throw ConfigError("bad target '" + part + "'");
    config.targets.push_back(id);
  }
  if (config.targets.empty()) throw ConfigError("empty target list");
  std::sort(config.targets.begin(), config.targets.end());
  config.targets.erase(std::unique(config.targets.begin(), config.targets.end()),
                       config.targets.end());
}

SweepConfig LoadSweepConfig(const fs::path& path, SweepConfig base) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    if (!fs::exists(path)) {
      throw OutputError("cannot read config " + path.string());
    }
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    auto known = KnownKeys().find(section);
    if (known == KnownKeys().end() || body.data().size() > 0) {
      throw ConfigError("unknown config section or key '" + section + "'");
    }
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) {
        throw ConfigError("unknown config key '" + section + "." + key + "'");
      }
    }
  }
  SweepConfig c = std::move(base);
  if (auto v = tree.get_optional<std::string>("case.path")) {
    fs::path p = *v;
    // Relative case paths are taken from the config file's directory.
    if (p.is_relative() && !fs::exists(p)) p = path.parent_path() / p;
    c.case_path = p;
  }
  if (auto v = tree.get_optional<std::string>("sweep.methods")) {
    c.methods = ParseMethodList(*v);
  }
  if (auto v = tree.get_optional<std::string>("sweep.targets")) {
    ParseTargets(*v, c);
  }
  c.n1_start = Get(tree, "sweep.n1_start", c.n1_start);
  c.n1_stop = Get(tree, "sweep.n1_stop", c.n1_stop);
  c.n1_step = Get(tree, "sweep.n1_step", c.n1_step);
  c.load_shift = Get(tree, "sweep.load_shift", c.load_shift);
  c.sigma = Get(tree, "sweep.sigma", c.sigma);
  c.critical_threshold = Get(tree, "sweep.critical_threshold", c.critical_threshold);
  c.iteration_cap = Get(tree, "sweep.iteration_cap", c.iteration_cap);
  c.seed = Get(tree, "sweep.seed", c.seed);
  c.backend = Get(tree, "solver.backend", c.backend);
  c.time_limit = Get(tree, "solver.time_limit", c.time_limit);
  c.node_limit = Get(tree, "solver.node_limit", c.node_limit);
  c.threads = Get(tree, "run.threads", c.threads);
  if (auto v = tree.get_optional<std::string>("run.output")) c.output = *v;
  if (auto v = tree.get_optional<std::string>("run.timing")) {
    c.timing = ParseBool("run.timing", *v);
  }
  return c;
}

std::string SweepConfigToIni(const SweepConfig& c) {
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(ToString(m));
  std::string targets = "critical";
  if (c.all_targets) {
    targets = "all";
  } else if (!c.critical_targets) {
    std::vector<std::string> ids;
    for (int t : c.targets) ids.push_back(std::to_string(t));
    targets = Join(ids);
  }
  std::ostringstream out;
  out << "[case]\npath = " << c.case_path.string() << "\n\n"
      << "[sweep]\nmethods = " << Join(methods) << "\ntargets = " << targets
      << "\nn1_start = " << Num(c.n1_start) << "\nn1_stop = " << Num(c.n1_stop)
      << "\nn1_step = " << Num(c.n1_step) << "\nload_shift = " << Num(c.load_shift)
      << "\nsigma = " << Num(c.sigma)
      << "\ncritical_threshold = " << Num(c.critical_threshold)
      << "\niteration_cap = " << c.iteration_cap << "\nseed = " << c.seed
      << "\n\n[solver]\nbackend = " << c.backend
      << "\ntime_limit = " << Num(c.time_limit)
      << "\nnode_limit = " << c.node_limit << "\n\n"
      << "[run]\nthreads = " << c.threads << "\noutput = " << c.output.string()
      << "\ntiming = " << (c.timing ? "true" : "false") << "\n";
  return out.str();
}

std::vector<int> ResolveTargets(const SweepConfig& config,
                                const AttackContext& ctx) {
  const GridCase& grid = *ctx.grid;
  std::vector<int> ids;
  if (config.critical_targets) {
    for (int k : CriticalLines(ctx, config.critical_threshold)) {
      ids.push_back(grid.branches[k].id);
    }
  } else if (config.all_targets) {
    for (const Branch& br : grid.branches) ids.push_back(br.id);
  } else {
    for (int id : config.targets) {
      if (grid.BranchPosition(id) < 0) {
        throw ConfigError("target line " + std::to_string(id) +
                          " is not in the case");
      }
      ids.push_back(id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

BoundsReport RunSweep(const SweepConfig& config, const GridCase& grid,
                      const AttackContext& ctx,
                      const std::function<void(const SweepProgress&)>& progress) {
  config.Validate();
  if (config.backend == "external" && !solver::ExternalBackend()) {
    throw ConfigError("backend 'external' requested but none is registered");
  }
  std::vector<Instance> instances;
  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end());
  for (int target : ResolveTargets(config, ctx)) {
    for (double n1 : config.BudgetGrid()) {
      for (Method m : methods) instances.push_back({target, n1, m});
    }
  }

  BoundsReport report;
  report.case_name = grid.name;
  report.load_shift = config.load_shift;
  report.sigma = config.sigma;
  report.methods = methods;
  report.records.resize(instances.size());

  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max<int>(1, instances.size()));
  std::atomic<size_t> next{0};
  std::mutex mu;
  int done = 0;
  auto work = [&] {
    for (size_t i = next++; i < instances.size(); i = next++) {
      InstanceRecord rec = Solve(config, grid, ctx, instances[i]);
      std::lock_guard<std::mutex> lock(mu);
      report.records[i] = std::move(rec);
      ++done;
      if (progress) {
        progress({&report.records[i], done, static_cast<int>(instances.size())});
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return report;
}

void WriteSweepOutputs(const SweepConfig& config, const BoundsReport& report,
                       const GridCase& grid) {
  const fs::path dir = config.output;
  std::error_code ec;
  fs::create_directories(dir / "plot", ec);
  if (ec) throw OutputError("cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream csv, json, plot, log;
  WriteBoundsCsv(report, grid, csv, CsvOptions{config.timing});
  WriteBoundsJson(report, grid, json);
  WritePlotDataAll(report, plot);
  WriteFile(dir / "bounds.csv", csv.str());
  WriteFile(dir / "bounds.json", json.str());
  WriteFile(dir / "plot_data.csv", plot.str());
  WriteFile(dir / "config.ini", SweepConfigToIni(config));
  for (int target : ReportTargets(report)) {
    std::ostringstream one;
    WritePlotData(report, target, one);
    WriteFile(dir / "plot" / ("target_" + std::to_string(target) + ".csv"),
              one.str());
  }
  for (const InstanceRecord& rec : report.records) {
    const AttackResult& r = rec.result;
    char line[512];
    std::snprintf(line, sizeof(line),
                  "target=%d n1=%s method=%s status=%s iterations=%d "
                  "milp_solves=%d dispatch_rounds=%d overflow_rounds=%d "
                  "nodes=%lld big_m_resolves=%d binaries=%d/%d ms=%.1f",
                  rec.target_line, Num(rec.n1).c_str(),
                  std::string(ToString(r.method)).c_str(),
                  std::string(ToString(r.status)).c_str(), r.iterations,
                  r.state.milp_solves, r.state.dispatch_rounds,
                  r.state.overflow_rounds, static_cast<long long>(r.nodes),
                  r.big_m_resolves, r.binaries_initial, r.binaries_final,
                  r.solve_ms);
    log << line;
    if (!r.message.empty()) log << " message=\"" << r.message << '"';
    log << '\n';
  }
  WriteFile(dir / "instances.log", log.str());
}

}  // namespace gridfdi
