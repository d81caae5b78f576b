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

namespace rguard {

/// Standard normal CDF, via erfc so the lower tail keeps full relative
/// precision.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS 241, PPND16). Relative error
/// is about 1e-16 across (0, 1). Returns -inf/+inf at 0/1; throws for p
/// outside [0, 1] or NaN.
double normal_quantile(double p);

}  // namespace rguard
