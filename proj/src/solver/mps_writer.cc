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

#include "gridfdi/solver/mps_writer.h"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace gridfdi::solver {
namespace {

std::string RowName(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "R%07d", i + 1);
  return buf;
}

std::string ColumnName(int j) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%07d", j + 1);
  return buf;
}

std::string Number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Pads `s` with spaces so the next field starts at 1-based column `col`.
void PadTo(std::string& s, size_t col) {
  if (s.size() < col - 1) {
    s.append(col - 1 - s.size(), ' ');
  } else {
    s.push_back(' ');
  }
}

std::string Line(const std::string& f1, const std::string& f2,
                 const std::string& f3 = {}, const std::string& f4 = {},
                 const std::string& f5 = {}, const std::string& f6 = {}) {
  std::string s = " " + f1;
  PadTo(s, 5);
  s += f2;
  if (f3.empty()) return s;
  PadTo(s, 15);
  s += f3;
  PadTo(s, 25);
  s += f4;
  if (f5.empty()) return s;
  PadTo(s, 40);
  s += f5;
  PadTo(s, 50);
  s += f6;
  return s;
}

std::string Write(const LinearProgram& lp, const std::vector<bool>& is_binary,
                  const std::string& name) {
  std::string out;
  auto emit = [&out](const std::string& line) {
    out += line;
    out += '\n';
  };
  emit("NAME          " + name);
  if (lp.sense() == Sense::kMaximize) {
    emit("OBJSENSE");
    emit("    MAX");
  }
  emit("ROWS");
  emit(Line("N", "OBJ"));
  for (int i = 0; i < lp.num_rows(); ++i) {
    const char* type = "L";
    if (lp.row(i).relation == Relation::kEqual) type = "E";
    if (lp.row(i).relation == Relation::kGreaterEqual) type = "G";
    emit(Line(type, RowName(i)));
  }

  std::vector<std::vector<std::pair<int, double>>> by_column(lp.num_columns());
  for (int i = 0; i < lp.num_rows(); ++i) {
    for (const Term& t : lp.row(i).terms) {
      by_column[t.column].emplace_back(i, t.value);
    }
  }
  emit("COLUMNS");
  bool in_integer_block = false;
  int marker = 0;
  for (int j = 0; j < lp.num_columns(); ++j) {
    if (is_binary[j] != in_integer_block) {
      char mname[16];
      std::snprintf(mname, sizeof(mname), "M%07d", ++marker);
      emit(Line("", mname, "'MARKER'", "",
                is_binary[j] ? "'INTORG'" : "'INTEND'"));
      in_integer_block = is_binary[j];
    }
    const std::string cname = ColumnName(j);
    std::vector<std::pair<std::string, double>> entries;
    if (lp.column(j).objective != 0.0) {
      entries.emplace_back("OBJ", lp.column(j).objective);
    }
    for (const auto& [i, v] : by_column[j]) entries.emplace_back(RowName(i), v);
    if (entries.empty()) entries.emplace_back("OBJ", 0.0);
    for (size_t k = 0; k < entries.size(); k += 2) {
      if (k + 1 < entries.size()) {
        emit(Line("", cname, entries[k].first, Number(entries[k].second),
                  entries[k + 1].first, Number(entries[k + 1].second)));
      } else {
        emit(Line("", cname, entries[k].first, Number(entries[k].second)));
      }
    }
  }
  if (in_integer_block) {
    char mname[16];
    std::snprintf(mname, sizeof(mname), "M%07d", ++marker);
    emit(Line("", mname, "'MARKER'", "", "'INTEND'"));
  }

  emit("RHS");
  for (int i = 0; i < lp.num_rows(); ++i) {
    if (lp.row(i).rhs != 0.0) {
      emit(Line("", "RHS", RowName(i), Number(lp.row(i).rhs)));
    }
  }
  if (lp.objective_offset() != 0.0) {
    emit(Line("", "RHS", "OBJ", Number(-lp.objective_offset())));
  }

  emit("BOUNDS");
  for (int j = 0; j < lp.num_columns(); ++j) {
    const Column& c = lp.column(j);
    const std::string cname = ColumnName(j);
    if (is_binary[j] && c.lower == 0.0 && c.upper == 1.0) {
      emit(Line("BV", "BND", cname, ""));
      continue;
    }
    const bool lo_inf = !std::isfinite(c.lower);
    const bool hi_inf = !std::isfinite(c.upper);
    if (!lo_inf && !hi_inf && c.lower == c.upper) {
      emit(Line("FX", "BND", cname, Number(c.lower)));
      continue;
    }
    if (lo_inf && hi_inf) {
      emit(Line("FR", "BND", cname, ""));
      continue;
    }
    if (lo_inf) {
      emit(Line("MI", "BND", cname, ""));
    } else if (c.lower != 0.0) {
      emit(Line("LO", "BND", cname, Number(c.lower)));
    }
    if (!hi_inf) emit(Line("UP", "BND", cname, Number(c.upper)));
  }
  emit("ENDATA");
  return out;
}

}  // namespace

std::string WriteMps(const LinearProgram& lp, const std::string& name) {
  return Write(lp, std::vector<bool>(lp.num_columns(), false), name);
}

std::string WriteMps(const MilpProgram& milp, const std::string& name) {
  std::vector<bool> is_binary(milp.lp.num_columns(), false);
  for (int j : milp.binaries) is_binary[j] = true;
  return Write(milp.lp, is_binary, name);
}

}  // namespace gridfdi::solver
