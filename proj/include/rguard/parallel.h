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

#include <cstddef>
#include <functional>

namespace rguard {

/// Worker cap: RG_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(0..count-1) on up to `workers` threads (0 means worker_count()).
/// If any call throws, the exception from the lowest index is rethrown
/// after all workers finish, so failures are reported deterministically.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, std::size_t workers = 0);

}  // namespace rguard
