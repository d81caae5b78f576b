// Copyright 2026 the retrievalguard authors
//
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

#pragma once

#include <cstdint>
#include <vector>

#include "rguard/oracle.h"

namespace rguard {

struct OracleSuiteOptions {
  std::uint64_t seed = 0;
  // Negative control: zero the Chernoff epsilon used by the concentration
  // checks, which must then fail.
  bool inject_zero_epsilon = false;
};

/// Cross-checks the engine against the independent oracles: closed form
/// vs quadrature, the sign-model equality case of the tight bound,
/// empirical Lipschitz checks, Monte-Carlo concentration, and the fixed
/// constants of the Chernoff correction and the radius formula.
std::vector<OracleReport> run_oracle_suite(const OracleSuiteOptions& opts = {});

}  // namespace rguard
