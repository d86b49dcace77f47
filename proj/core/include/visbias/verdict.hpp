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

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "visbias/domain.hpp"
#include "visbias/error.hpp"

namespace visbias {

// Pairwise preference in presentation order.
enum class Preference { First, Second, Tie };

std::string_view to_string(Preference p) noexcept;
Preference parse_preference_name(std::string_view name);

struct JudgeVerdict {
  enum class Kind { Absolute, Preference };
  Kind kind = Kind::Absolute;
  double score = 0.0;                       // Absolute
  Preference preference = Preference::Tie;  // Preference
  std::string raw_text;
  bool cached = false;

  static JudgeVerdict absolute(double score, std::string raw);
  static JudgeVerdict pairwise(Preference p, std::string raw);
};

// `cached` is deliberately left out; it describes the lookup, not the verdict.
nlohmann::json to_json(const JudgeVerdict& v);
JudgeVerdict verdict_from_json(const nlohmann::json& j);

// Unparseable judge reply. Keeps the text for the record log.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string raw_text);
  const std::string& raw_text() const noexcept { return raw_; }

 private:
  std::string raw_;
};

/// Score grammar:
///  1. the last JSON object in the text with a numeric "score" field; the
///     value must lie in the scale (fractional values are allowed);
///  2. otherwise the last integer token inside the scale, skipping decimals
///     and integers introduced by "out of" or "/".
/// Throws ParseError when nothing qualifies or a JSON score is out of range.
double parse_score(std::string_view raw, ScoreScale scale);

/// JSON "preference" field ("1", "2", "first", "second", "tie", ...) first,
/// then the last "image 1"/"image 2"/"tie" mention in free text.
Preference parse_preference(std::string_view raw);

}  // namespace visbias
