/**
 * Copyright 2026 The visbias Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace visbias {

// Sub-seed derived by stable hashing of (seed, id, purpose). Independent of
// evaluation order, so parallel construction gives the same results.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view id, std::string_view purpose);

// 64-bit FNV-1a, used wherever a stable non-cryptographic hash is needed.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// mt19937_64 output is fixed by the standard; uniform_int_distribution is
// not, so bounded draws go through this rejection sampler instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double unit();

 private:
  std::mt19937_64 engine_;
};

}  // namespace visbias
