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

#include <array>
#include <string>
#include <string_view>

namespace visbias {

enum class Domain { Animals, People, Outdoor, Indoor, Illustrations };

inline constexpr std::array<Domain, 5> kAllDomains = {
    Domain::Animals, Domain::People, Domain::Outdoor, Domain::Indoor, Domain::Illustrations};

// Lower-case wire name: "animals", "people", "outdoor", "indoor", "illustrations".
std::string_view to_string(Domain d) noexcept;

// Accepts wire names case-insensitively plus a few aliases ("animal",
// "outdoor_scenes", ...). Throws Error(Parameter) on anything else.
Domain parse_domain(std::string_view name);

// Integer score scale shared by human annotations and judges.
struct ScoreScale {
  int min = 1;
  int max = 5;

  bool contains(double v) const noexcept { return v >= min && v <= max; }
  friend bool operator==(const ScoreScale&, const ScoreScale&) = default;
};

void validate(const ScoreScale& scale);

}  // namespace visbias
