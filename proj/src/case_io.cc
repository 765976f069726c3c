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

#include "gridfdi/case_io.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace gridfdi {
namespace {

using Table = std::vector<std::vector<double>>;

const std::set<std::string>& KnownTables() {
  static const std::set<std::string> known = {"bus", "gen", "branch",
                                              "gencost"};
  return known;
}

// Column positions in the MATPOWER version 2 tables.
constexpr int kBusId = 0, kBusType = 1, kBusPd = 2;
constexpr int kBusMinWidth = 13;
constexpr int kGenBus = 0, kGenStatus = 7, kGenPmax = 8, kGenPmin = 9;
constexpr int kGenMinWidth = 10;
constexpr int kBrFrom = 0, kBrTo = 1, kBrX = 3, kBrRateA = 5, kBrStatus = 10;
constexpr int kBranchMinWidth = 11;
constexpr int kCostModel = 0, kCostN = 3, kCostFirst = 4;

class Scanner {
 public:
  explicit Scanner(const std::string& text) : text_(text) {}

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return AtEnd() ? '\0' : text_[pos_]; }
  int line() const { return line_; }
  int column() const { return column_; }

  char Get() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw CaseSyntaxError(line_, column_, what);
  }

  // Skips blanks and comments; newlines are skipped only if `newlines`.
  void SkipSpace(bool newlines) {
    while (!AtEnd()) {
      const char c = Peek();
      if (c == '%') {
        while (!AtEnd() && Peek() != '\n') Get();
      } else if (c == ' ' || c == '\t' || c == '\r' ||
                 (newlines && c == '\n')) {
        Get();
      } else if (c == '.' && text_.compare(pos_, 3, "...") == 0) {
        // Line continuation: drop the rest of the line and the newline.
        while (!AtEnd() && Peek() != '\n') Get();
        if (!AtEnd()) Get();
      } else {
        break;
      }
    }
  }

  std::string Identifier() {
    if (!(std::isalpha(static_cast<unsigned char>(Peek())) || Peek() == '_')) {
      Fail("expected identifier");
    }
    std::string id;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) ||
                        Peek() == '_')) {
      id.push_back(Get());
    }
    return id;
  }

  void Expect(char c) {
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    Get();
  }

  std::string QuotedString() {
    Expect('\'');
    std::string s;
    while (!AtEnd() && Peek() != '\'' && Peek() != '\n') s.push_back(Get());
    if (Peek() != '\'') Fail("unterminated string");
    Get();
    return s;
  }

  double Number() {
    const size_t start = pos_;
    std::string token;
    while (!AtEnd()) {
      const char c = Peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
          c == '+' || c == '-') {
        // A sign is only part of the number at the start or after an
        // exponent marker.
        if ((c == '+' || c == '-') && !token.empty() &&
            token.back() != 'e' && token.back() != 'E') {
          break;
        }
        token.push_back(Get());
      } else {
        break;
      }
    }
    if (token.empty()) Fail("expected number");
    std::string body = token;
    bool negative = false;
    if (body[0] == '+' || body[0] == '-') {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "Inf" || body == "inf") {
      return negative ? -HUGE_VAL : HUGE_VAL;
    }
    if (body == "NaN" || body == "nan") return std::nan("");
    double value = 0.0;
    const auto [end, ec] =
        std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc() || end != body.data() + body.size()) {
      // Rewind the column so the report points at the token start.
      column_ -= static_cast<int>(pos_ - start);
      Fail("malformed number '" + token + "'");
    }
    return negative ? -value : value;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

Table ParseMatrix(Scanner& s, const std::string& field) {
  const int open_line = s.line();
  const int open_column = s.column();
  s.Expect('[');
  Table rows;
  std::vector<double> row;
  auto end_row = [&]() {
    if (row.empty()) return;
    if (!rows.empty() && rows.front().size() != row.size()) {
      s.Fail("row " + std::to_string(rows.size() + 1) + " of '" + field +
             "' has " + std::to_string(row.size()) + " columns, expected " +
             std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
    row.clear();
  };
  while (true) {
    s.SkipSpace(false);
    if (s.AtEnd()) {
      throw CaseSyntaxError(open_line, open_column,
                            "unterminated matrix for '" + field + "'");
    }
    const char c = s.Peek();
    if (c == ']') {
      end_row();
      s.Get();
      break;
    }
    if (c == ';' || c == '\n') {
      s.Get();
      end_row();
      continue;
    }
    if (c == ',') {
      s.Get();
      continue;
    }
    row.push_back(s.Number());
  }
  return rows;
}

void ParseStatement(Scanner& s, RawCaseDocument& doc, std::string& out_var) {
  const int line = s.line();
  const int column = s.column();
  std::string head = s.Identifier();
  if (head == "function") {
    s.SkipSpace(false);
    out_var = s.Identifier();
    s.SkipSpace(false);
    s.Expect('=');
    s.SkipSpace(false);
    doc.name = s.Identifier();
    return;
  }
  if (head != out_var || s.Peek() != '.') {
    throw CaseSyntaxError(line, column,
                          "expected assignment to '" + out_var + ".<field>'");
  }
  s.Get();
  const std::string field = s.Identifier();
  s.SkipSpace(false);
  s.Expect('=');
  s.SkipSpace(false);
  if (field == "version") {
    doc.version = s.Peek() == '\'' ? s.QuotedString()
                                   : std::to_string(
                                         static_cast<int>(s.Number()));
  } else if (field == "baseMVA") {
    doc.base_mva = s.Number();
  } else if (KnownTables().count(field) != 0) {
    if (s.Peek() != '[') s.Fail("expected '[' for table '" + field + "'");
    doc.tables[field] = ParseMatrix(s, field);
  } else {
    throw UnsupportedFeatureError(
        field, "table '" + field + "' at line " + std::to_string(line) +
                   " is not supported (accepted: baseMVA, bus, branch, "
                   "gen, gencost)");
  }
  s.SkipSpace(false);
  if (s.Peek() == ';') s.Get();
}

double Cell(const Table& t, size_t row, int col) { return t[row][col]; }

void RequireWidth(const Table& t, const std::string& name, int width) {
  if (!t.empty() && static_cast<int>(t.front().size()) < width) {
    throw CaseValidationError("table '" + name + "' has " +
                              std::to_string(t.front().size()) +
                              " columns, at least " + std::to_string(width) +
                              " required");
  }
}

void RequireFinite(const Table& t, const std::string& name) {
  for (size_t r = 0; r < t.size(); ++r) {
    for (size_t c = 0; c < t[r].size(); ++c) {
      if (!std::isfinite(t[r][c])) {
        throw CaseValidationError("table '" + name + "' row " +
                                  std::to_string(r + 1) + " column " +
                                  std::to_string(c + 1) + " is not finite");
      }
    }
  }
}

GridCase FromRawDocument(const RawCaseDocument& doc) {
  if (!doc.version.empty() && doc.version != "2") {
    throw UnsupportedFeatureError("version", "case format version '" +
                                                 doc.version +
                                                 "' is not supported");
  }
  for (const char* required : {"bus", "gen", "branch", "gencost"}) {
    if (doc.tables.count(required) == 0) {
      throw CaseValidationError(std::string("missing table '") + required +
                                "'");
    }
  }
  if (!(doc.base_mva > 0.0) || !std::isfinite(doc.base_mva)) {
    throw CaseValidationError("baseMVA must be positive and finite");
  }
  const Table& bus = doc.tables.at("bus");
  const Table& gen = doc.tables.at("gen");
  const Table& branch = doc.tables.at("branch");
  const Table& gencost = doc.tables.at("gencost");
  RequireWidth(bus, "bus", kBusMinWidth);
  RequireWidth(gen, "gen", kGenMinWidth);
  RequireWidth(branch, "branch", kBranchMinWidth);
  RequireWidth(gencost, "gencost", kCostFirst);
  for (const auto& [name, table] : doc.tables) RequireFinite(table, name);

  GridCase grid;
  grid.name = doc.name;
  grid.base_mva = doc.base_mva;
  const double base = doc.base_mva;

  for (size_t r = 0; r < bus.size(); ++r) {
    Bus b;
    b.id = static_cast<int>(Cell(bus, r, kBusId));
    const int type = static_cast<int>(Cell(bus, r, kBusType));
    if (type == 4) {
      throw UnsupportedFeatureError(
          "bus", "isolated bus (type 4) at bus row " + std::to_string(r + 1));
    }
    if (type < 1 || type > 3) {
      throw CaseValidationError("bus row " + std::to_string(r + 1) +
                                " has unknown type " + std::to_string(type));
    }
    b.pd = Cell(bus, r, kBusPd) / base;
    b.type = type == 3 ? BusType::kSlack
                       : (b.pd > 0.0 ? BusType::kLoad : BusType::kNonLoad);
    grid.buses.push_back(b);
  }

  if (gencost.size() != gen.size() && gencost.size() != 2 * gen.size()) {
    throw CaseValidationError(
        "gencost has " + std::to_string(gencost.size()) + " rows for " +
        std::to_string(gen.size()) + " generators");
  }
  for (size_t r = 0; r < gen.size(); ++r) {
    if (Cell(gen, r, kGenStatus) <= 0.0) continue;
    const std::vector<double>& cost_row = gencost[r];
    if (static_cast<int>(cost_row[kCostModel]) != 2) {
      throw UnsupportedFeatureError(
          "gencost", "cost model " +
                         std::to_string(static_cast<int>(cost_row[kCostModel])) +
                         " in gencost row " + std::to_string(r + 1) +
                         " (only polynomial model 2 is supported)");
    }
    const int n = static_cast<int>(cost_row[kCostN]);
    if (n < 0 || kCostFirst + n > static_cast<int>(cost_row.size())) {
      throw CaseValidationError("gencost row " + std::to_string(r + 1) +
                                " declares " + std::to_string(n) +
                                " coefficients but has fewer columns");
    }
    Generator g;
    g.id = static_cast<int>(r + 1);
    g.bus = static_cast<int>(Cell(gen, r, kGenBus));
    const double pmax_mw = Cell(gen, r, kGenPmax);
    const double pmin_mw = Cell(gen, r, kGenPmin);
    g.pmax = pmax_mw / base;
    g.pmin = pmin_mw / base;
    const LinearCost lin = LinearizeCost(
        std::vector<double>(cost_row.begin() + kCostFirst,
                            cost_row.begin() + kCostFirst + n),
        pmin_mw, pmax_mw);
    g.cost = lin.slope * base;
    g.cost_constant = lin.constant;
    grid.generators.push_back(g);
  }

  for (size_t r = 0; r < branch.size(); ++r) {
    if (Cell(branch, r, kBrStatus) <= 0.0) continue;
    Branch br;
    br.id = static_cast<int>(r + 1);
    br.from_bus = static_cast<int>(Cell(branch, r, kBrFrom));
    br.to_bus = static_cast<int>(Cell(branch, r, kBrTo));
    br.x = Cell(branch, r, kBrX);
    br.rate = Cell(branch, r, kBrRateA) / base;
    br.in_service = true;
    grid.branches.push_back(br);
  }
  ValidateCase(grid);
  return grid;
}

nlohmann::ordered_json ToJson(const GridCase& grid) {
  nlohmann::ordered_json doc;
  doc["format"] = "gridfdi-case";
  doc["version"] = 1;
  doc["name"] = grid.name;
  doc["base_mva"] = grid.base_mva;
  auto& buses = doc["buses"] = nlohmann::ordered_json::array();
  for (const Bus& b : grid.buses) {
    buses.push_back({{"id", b.id}, {"type", ToString(b.type)}, {"pd", b.pd}});
  }
  auto& branches = doc["branches"] = nlohmann::ordered_json::array();
  for (const Branch& br : grid.branches) {
    branches.push_back({{"id", br.id},
                        {"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"x", br.x},
                        {"rate", br.rate},
                        {"in_service", br.in_service}});
  }
  auto& gens = doc["generators"] = nlohmann::ordered_json::array();
  for (const Generator& g : grid.generators) {
    gens.push_back({{"id", g.id},
                    {"bus", g.bus},
                    {"pmin", g.pmin},
                    {"pmax", g.pmax},
                    {"cost", g.cost},
                    {"cost_constant", g.cost_constant}});
  }
  return doc;
}

BusType ParseBusType(const std::string& s) {
  if (s == "load") return BusType::kLoad;
  if (s == "non-load") return BusType::kNonLoad;
  if (s == "slack") return BusType::kSlack;
  throw CaseValidationError("unknown bus type '" + s + "'");
}

GridCase FromJson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports a byte offset; translate it to line and column.
    int line = 1, column = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw CaseSyntaxError(line, column, e.what());
  }
  try {
    if (doc.value("format", "") != "gridfdi-case") {
      throw CaseValidationError("JSON document is not a gridfdi-case");
    }
    for (const auto& [key, value] : doc.items()) {
      static const std::set<std::string> allowed = {
          "format", "version", "name", "base_mva",
          "buses",  "branches", "generators"};
      if (allowed.count(key) == 0) {
        throw UnsupportedFeatureError(key, "field '" + key +
                                               "' is not supported");
      }
    }
    GridCase grid;
    grid.name = doc.value("name", "");
    grid.base_mva = doc.at("base_mva").get<double>();
    for (const auto& b : doc.at("buses")) {
      Bus bus;
      bus.id = b.at("id").get<int>();
      bus.type = ParseBusType(b.at("type").get<std::string>());
      bus.pd = b.at("pd").get<double>();
      grid.buses.push_back(bus);
    }
    for (const auto& b : doc.at("branches")) {
      Branch br;
      br.id = b.at("id").get<int>();
      br.from_bus = b.at("from_bus").get<int>();
      br.to_bus = b.at("to_bus").get<int>();
      br.x = b.at("x").get<double>();
      br.rate = b.at("rate").get<double>();
      br.in_service = b.value("in_service", true);
      if (br.in_service) grid.branches.push_back(br);
    }
    for (const auto& g : doc.at("generators")) {
      Generator gen;
      gen.id = g.at("id").get<int>();
      gen.bus = g.at("bus").get<int>();
      gen.pmin = g.at("pmin").get<double>();
      gen.pmax = g.at("pmax").get<double>();
      gen.cost = g.at("cost").get<double>();
      gen.cost_constant = g.value("cost_constant", 0.0);
      grid.generators.push_back(gen);
    }
    ValidateCase(grid);
    return grid;
  } catch (const nlohmann::json::exception& e) {
    throw CaseValidationError(std::string("malformed case JSON: ") + e.what());
  }
}

}  // namespace

CaseSyntaxError::CaseSyntaxError(int line, int column, const std::string& what)
    : CaseError("syntax error at line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

UnsupportedFeatureError::UnsupportedFeatureError(const std::string& table,
                                                 const std::string& what)
    : CaseError("unsupported feature: " + what), table_(table) {}

std::map<int, int> GridCase::BusIndex() const {
  std::map<int, int> index;
  for (int i = 0; i < num_buses(); ++i) index[buses[i].id] = i;
  return index;
}

int GridCase::SlackIndex() const {
  for (int i = 0; i < num_buses(); ++i) {
    if (buses[i].type == BusType::kSlack) return i;
  }
  return -1;
}

int GridCase::BranchPosition(int branch_id) const {
  for (int k = 0; k < num_branches(); ++k) {
    if (branches[k].id == branch_id) return k;
  }
  return -1;
}

std::vector<double> GridCase::Loads() const {
  std::vector<double> loads;
  loads.reserve(buses.size());
  for (const Bus& b : buses) loads.push_back(b.pd);
  return loads;
}

double GridCase::TotalLoad() const {
  double total = 0.0;
  for (const Bus& b : buses) total += b.pd;
  return total;
}

std::string ToString(BusType type) {
  switch (type) {
    case BusType::kLoad:
      return "load";
    case BusType::kNonLoad:
      return "non-load";
    case BusType::kSlack:
      return "slack";
  }
  return "unknown";
}

LinearCost LinearizeCost(const std::vector<double>& coefficients,
                         double pmin_mw, double pmax_mw) {
  const int n = static_cast<int>(coefficients.size());
  const double mid = 0.5 * (pmin_mw + pmax_mw);
  double value = 0.0, slope = 0.0;
  for (int i = 0; i < n; ++i) {
    const int power = n - 1 - i;
    value += coefficients[i] * std::pow(mid, power);
    if (power >= 1) {
      slope += power * coefficients[i] * std::pow(mid, power - 1);
    }
  }
  return {slope, value - slope * mid};
}

void ValidateCase(const GridCase& grid) {
  if (!(grid.base_mva > 0.0) || !std::isfinite(grid.base_mva)) {
    throw CaseValidationError("base_mva must be positive and finite");
  }
  if (grid.buses.empty()) throw CaseValidationError("case has no buses");
  std::set<int> ids;
  int slack_count = 0;
  for (size_t i = 0; i < grid.buses.size(); ++i) {
    const Bus& b = grid.buses[i];
    const std::string where = "bus " + std::to_string(b.id);
    if (!ids.insert(b.id).second) {
      throw CaseValidationError("duplicate bus id " + std::to_string(b.id));
    }
    if (!std::isfinite(b.pd)) throw CaseValidationError(where + ": load is not finite");
    if (b.type == BusType::kSlack) {
      ++slack_count;
    } else if ((b.type == BusType::kLoad) != b.is_load()) {
      throw CaseValidationError(where + ": type '" + ToString(b.type) +
                                "' does not match its load");
    }
  }
  if (slack_count != 1) {
    throw CaseValidationError("exactly one slack bus required, found " +
                              std::to_string(slack_count));
  }
  for (size_t k = 0; k < grid.branches.size(); ++k) {
    const Branch& br = grid.branches[k];
    const std::string where = "branch row " + std::to_string(br.id);
    for (int end : {br.from_bus, br.to_bus}) {
      if (ids.count(end) == 0) {
        throw CaseValidationError(where + " references missing bus " +
                                  std::to_string(end));
      }
    }
    if (br.from_bus == br.to_bus) {
      throw CaseValidationError(where + " connects bus " +
                                std::to_string(br.from_bus) + " to itself");
    }
    if (!(br.x > 0.0) || !std::isfinite(br.x)) {
      throw CaseValidationError(where + ": reactance must be positive");
    }
    if (br.in_service && (!(br.rate > 0.0) || !std::isfinite(br.rate))) {
      throw CaseValidationError(where + ": thermal limit must be positive");
    }
  }
  double capacity = 0.0;
  for (const Generator& g : grid.generators) {
    const std::string where = "generator row " + std::to_string(g.id);
    if (ids.count(g.bus) == 0) {
      throw CaseValidationError(where + " references missing bus " +
                                std::to_string(g.bus));
    }
    if (!std::isfinite(g.pmin) || !std::isfinite(g.pmax) ||
        !std::isfinite(g.cost) || !std::isfinite(g.cost_constant)) {
      throw CaseValidationError(where + ": non-finite data");
    }
    if (g.pmin > g.pmax) {
      throw CaseValidationError(where + ": pmin exceeds pmax");
    }
    capacity += g.pmax;
  }
  if (capacity < grid.TotalLoad()) {
    throw CaseValidationError(
        "total generation capacity is below total load (infeasible case)");
  }
}

RawCaseDocument ParseMatpowerText(const std::string& text) {
  Scanner s(text);
  RawCaseDocument doc;
  std::string out_var = "mpc";
  while (true) {
    s.SkipSpace(true);
    while (s.Peek() == ';') {
      s.Get();
      s.SkipSpace(true);
    }
    if (s.AtEnd()) break;
    ParseStatement(s, doc, out_var);
    s.SkipSpace(false);
    if (!s.AtEnd() && s.Peek() != '\n') s.Fail("unexpected trailing input");
  }
  return doc;
}

GridCase ParseCase(const std::string& text) {
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return FromJson(text);
  return FromRawDocument(ParseMatpowerText(text));
}

GridCase LoadCaseFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::filesystem::filesystem_error(
        "cannot open case file", path,
        std::make_error_code(std::errc::no_such_file_or_directory));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCase(buffer.str());
}

std::string SerializeCase(const GridCase& grid) {
  return ToJson(grid).dump(2) + "\n";
}

}  // namespace gridfdi
