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

#ifndef GRIDFDI_TESTS_TEST_UTIL_H_
#define GRIDFDI_TESTS_TEST_UTIL_H_

#include <string>

namespace gridfdi::testing_util {

inline std::string CasePath(const std::string& name) {
  return std::string(GRIDFDI_DATA_DIR) + "/cases/" + name;
}

inline std::string FixturePath(const std::string& name) {
  return std::string(GRIDFDI_FIXTURE_DIR) + "/" + name;
}

}  // namespace gridfdi::testing_util

#endif  // GRIDFDI_TESTS_TEST_UTIL_H_
