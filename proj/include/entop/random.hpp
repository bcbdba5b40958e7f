// Copyright 2026 The entop Authors
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
#include <cstdint>
#include <functional>
#include <random>

namespace entop {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for sub-stream `stream` of a scenario seeded with `seed`:
/// splitmix64(seed ^ splitmix64(stream + 1)). Every repeat, phi point and
/// noise batch draws from its own sub-stream, so results do not depend on
/// execution order.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// Worker cap from ENTOP_THREADS (default: hardware concurrency, minimum 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Exceptions
/// are rethrown on the caller; the first one by index wins.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace entop
