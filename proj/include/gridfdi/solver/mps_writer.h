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

#ifndef GRIDFDI_SOLVER_MPS_WRITER_H_
#define GRIDFDI_SOLVER_MPS_WRITER_H_

#include <string>

#include "gridfdi/solver/linear_program.h"

namespace gridfdi::solver {

// Fixed-form MPS. Rows are named R0000001.., columns C0000001..; binaries are
// wrapped in INTORG/INTEND markers and given BV bounds. Maximization is
// written through an OBJSENSE section. Numbers use up to 12 significant
// digits, so a value may spill past its 12-character field; free-form MPS
// readers accept the output unchanged.
std::string WriteMps(const LinearProgram& lp, const std::string& name = "GRIDFDI");
std::string WriteMps(const MilpProgram& milp,
                     const std::string& name = "GRIDFDI");

}  // namespace gridfdi::solver

#endif  // GRIDFDI_SOLVER_MPS_WRITER_H_
