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

#include "visbias/domain.hpp"

#include <algorithm>
#include <cctype>

#include "visbias/error.hpp"

namespace visbias {

std::string_view to_string(Domain d) noexcept {
  switch (d) {
    case Domain::Animals: return "animals";
    case Domain::People: return "people";
    case Domain::Outdoor: return "outdoor";
    case Domain::Indoor: return "indoor";
    case Domain::Illustrations: return "illustrations";
  }
  return "unknown";
}

Domain parse_domain(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(s.begin(), s.end(), ' ', '_');
  if (s == "animals" || s == "animal") return Domain::Animals;
  if (s == "people" || s == "person") return Domain::People;
  if (s == "outdoor" || s == "outdoor_scenes" || s == "outdoors") return Domain::Outdoor;
  if (s == "indoor" || s == "indoor_scenes") return Domain::Indoor;
  if (s == "illustrations" || s == "illustration") return Domain::Illustrations;
  throw Error(ErrorKind::Parameter, "unknown domain '" + std::string(name) + "'");
}

void validate(const ScoreScale& scale) {
  if (scale.min >= scale.max) {
    throw Error(ErrorKind::Config, "score scale min must be below max");
  }
}

}  // namespace visbias
