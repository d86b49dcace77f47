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

#include "visbias/verdict.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

namespace visbias {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// End index (exclusive) of the balanced object starting at `open`, or npos.
std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// Every parseable JSON object in the text that has `key`, in order of start.
std::vector<nlohmann::json> json_objects_with(std::string_view s, const char* key) {
  std::vector<nlohmann::json> found;
  for (std::size_t i = s.find('{'); i != std::string_view::npos; i = s.find('{', i + 1)) {
    const std::size_t end = match_brace(s, i);
    if (end == std::string_view::npos) continue;
    auto j = nlohmann::json::parse(s.substr(i, end - i), nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains(key)) found.push_back(std::move(j));
  }
  return found;
}

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  const auto tail = s.substr(s.size() - suffix.size());
  return std::equal(tail.begin(), tail.end(), suffix.begin(), [](char a, char b) { return lower(a) == b; });
}

// True when the integer starting at `start` is a scale mention such as the
// 5 in "3 out of 5" or "3/5".
bool is_scale_mention(std::string_view s, std::size_t start) {
  std::size_t k = start;
  while (k > 0 && std::isspace(static_cast<unsigned char>(s[k - 1]))) --k;
  const auto before = s.substr(0, k);
  if (!before.empty() && before.back() == '/') return true;
  if (!ends_with_ci(before, "out of")) return false;
  return before.size() == 6 || !std::isalnum(static_cast<unsigned char>(before[before.size() - 7]));
}

std::optional<Preference> preference_token(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), lower);
  if (s == "1" || s == "first" || s == "image 1" || s == "image_1" || s == "a") return Preference::First;
  if (s == "2" || s == "second" || s == "image 2" || s == "image_2" || s == "b") return Preference::Second;
  if (s == "tie" || s == "equal" || s == "none" || s == "0") return Preference::Tie;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Preference p) noexcept {
  switch (p) {
    case Preference::First: return "first";
    case Preference::Second: return "second";
    case Preference::Tie: return "tie";
  }
  return "tie";
}

Preference parse_preference_name(std::string_view name) {
  if (name == "first") return Preference::First;
  if (name == "second") return Preference::Second;
  if (name == "tie") return Preference::Tie;
  throw Error(ErrorKind::Parse, "unknown preference '" + std::string(name) + "'");
}

JudgeVerdict JudgeVerdict::absolute(double score, std::string raw) {
  JudgeVerdict v;
  v.kind = Kind::Absolute;
  v.score = score;
  v.raw_text = std::move(raw);
  return v;
}

JudgeVerdict JudgeVerdict::pairwise(Preference p, std::string raw) {
  JudgeVerdict v;
  v.kind = Kind::Preference;
  v.preference = p;
  v.raw_text = std::move(raw);
  return v;
}

nlohmann::json to_json(const JudgeVerdict& v) {
  nlohmann::json j;
  if (v.kind == JudgeVerdict::Kind::Absolute) {
    j["kind"] = "absolute";
    j["score"] = v.score;
  } else {
    j["kind"] = "preference";
    j["preference"] = std::string(to_string(v.preference));
  }
  j["raw_text"] = v.raw_text;
  return j;
}

JudgeVerdict verdict_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "absolute") {
      return JudgeVerdict::absolute(j.at("score").get<double>(), j.at("raw_text").get<std::string>());
    }
    if (kind == "preference") {
      return JudgeVerdict::pairwise(parse_preference_name(j.at("preference").get<std::string>()),
                                    j.at("raw_text").get<std::string>());
    }
    throw Error(ErrorKind::Parse, "unknown verdict kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed verdict: ") + e.what());
  }
}

ParseError::ParseError(const std::string& message, std::string raw_text)
    : Error(ErrorKind::Parse, message), raw_(std::move(raw_text)) {}

double parse_score(std::string_view raw, ScoreScale scale) {
  const auto objects = json_objects_with(raw, "score");
  if (!objects.empty()) {
    const auto& field = objects.back()["score"];
    std::optional<double> value;
    if (field.is_number()) {
      value = field.get<double>();
    } else if (field.is_string()) {
      const auto text = field.get<std::string>();
      char* end = nullptr;
      const double d = std::strtod(text.c_str(), &end);
      if (end != text.c_str() && *end == '\0') value = d;
    }
    if (!value || !std::isfinite(*value)) {
      throw ParseError("\"score\" field is not a number", std::string(raw));
    }
    if (!scale.contains(*value)) {
      throw ParseError("score " + nlohmann::json(*value).dump() + " outside scale " +
                           std::to_string(scale.min) + ".." + std::to_string(scale.max),
                       std::string(raw));
    }
    return *value;
  }

  std::optional<long long> last;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (!is_digit(raw[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < raw.size() && is_digit(raw[i])) ++i;
    const bool decimal_tail = i + 1 < raw.size() && raw[i] == '.' && is_digit(raw[i + 1]);
    const bool decimal_head = start >= 2 && raw[start - 1] == '.' && is_digit(raw[start - 2]);
    if (decimal_tail) {
      while (i < raw.size() && (raw[i] == '.' || is_digit(raw[i]))) ++i;
      continue;
    }
    if (decimal_head || i - start > 6 || is_scale_mention(raw, start)) continue;
    const long long v = std::stoll(std::string(raw.substr(start, i - start)));
    if (v >= scale.min && v <= scale.max) last = v;
  }
  if (!last) throw ParseError("no score found in judge reply", std::string(raw));
  return static_cast<double>(*last);
}

Preference parse_preference(std::string_view raw) {
  const auto objects = json_objects_with(raw, "preference");
  if (!objects.empty()) {
    const auto& field = objects.back()["preference"];
    std::string token;
    if (field.is_string()) {
      token = field.get<std::string>();
    } else if (field.is_number_integer()) {
      token = std::to_string(field.get<long long>());
    }
    if (auto p = preference_token(token)) return *p;
    throw ParseError("unrecognised \"preference\" value " + field.dump(), std::string(raw));
  }

  std::string text(raw);
  std::transform(text.begin(), text.end(), text.begin(), lower);
  std::optional<Preference> best;
  std::size_t best_pos = 0;
  auto consider = [&](std::string_view needle, Preference p) {
    const std::size_t pos = text.rfind(needle);
    if (pos == std::string::npos) return;
    const std::size_t after = pos + needle.size();
    if (after < text.size() && std::isalnum(static_cast<unsigned char>(text[after]))) return;
    if (pos > 0 && std::isalnum(static_cast<unsigned char>(text[pos - 1]))) return;
    if (!best || pos > best_pos) {
      best = p;
      best_pos = pos;
    }
  };
  consider("image 1", Preference::First);
  consider("image 2", Preference::Second);
  consider("tie", Preference::Tie);
  if (!best) throw ParseError("no preference found in judge reply", std::string(raw));
  return *best;
}

}  // namespace visbias
