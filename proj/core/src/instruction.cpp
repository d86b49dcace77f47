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

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "visbias/benchmark.hpp"
#include "visbias/error.hpp"

namespace visbias {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_singular_number(const std::string& number) {
  const std::string n = lower(number);
  return n == "one" || n == "1" || n == "a" || n == "an" || n == "single";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::map<Domain, std::string> builtin_patterns() {
  return {
      {Domain::Animals, "Generate an image of {number|lower} {object|lower|plural} {action|lower} in "
                        "{background|lower|article}."},
      {Domain::People, "Generate an image of {number|lower} {object|lower|plural} wearing {color|lower} "
                       "clothes, {action|lower} in {background|lower|article}."},
      {Domain::Outdoor, "Generate an image of {scene|lower|article} at {time|lower} in {season|lower} "
                        "with {weather|lower} weather."},
      {Domain::Indoor, "Generate an image of {number|lower} {color|lower} {object|lower|plural} in "
                       "{style|lower|article} {room|lower}."},
      {Domain::Illustrations, "Generate {style|lower|article} illustration of {number|lower} {color|lower} "
                              "{object|lower|plural} in {background|lower|article}."},
  };
}

}  // namespace

std::string pluralize(const std::string& noun) {
  if (noun.empty()) return noun;
  // pluralize the head noun of phrases like "bottle of water"
  if (auto of = noun.find(" of "); of != std::string::npos) {
    return pluralize(noun.substr(0, of)) + noun.substr(of);
  }
  if (auto space = noun.rfind(' '); space != std::string::npos) {
    return noun.substr(0, space + 1) + pluralize(noun.substr(space + 1));
  }
  static const std::array<std::pair<const char*, const char*>, 12> irregular = {{
      {"man", "men"}, {"woman", "women"}, {"child", "children"}, {"person", "people"},
      {"mouse", "mice"}, {"goose", "geese"}, {"foot", "feet"}, {"tooth", "teeth"},
      {"sheep", "sheep"}, {"deer", "deer"}, {"fish", "fish"}, {"moose", "moose"},
  }};
  const std::string l = lower(noun);
  for (const auto& [one, many] : irregular) {
    if (l == one) {
      std::string out = many;
      if (std::isupper(static_cast<unsigned char>(noun[0]))) {
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
      }
      return out;
    }
  }
  auto ends_with = [&](std::string_view suffix) { return l.ends_with(suffix); };
  if (ends_with("s") || ends_with("x") || ends_with("z") || ends_with("ch") || ends_with("sh")) {
    return noun + "es";
  }
  if (l.size() >= 2 && l.back() == 'y' && std::string_view("aeiou").find(l[l.size() - 2]) == std::string_view::npos) {
    return noun.substr(0, noun.size() - 1) + "ies";
  }
  if (ends_with("fe")) return noun.substr(0, noun.size() - 2) + "ves";
  if (ends_with("lf") || ends_with("af")) return noun.substr(0, noun.size() - 1) + "ves";
  return noun + "s";
}

std::string with_article(const std::string& phrase) {
  if (phrase.empty()) return phrase;
  const std::string l = lower(phrase);
  bool vowel = std::string_view("aeiou").find(l[0]) != std::string_view::npos;
  if (l.starts_with("uni") || l.starts_with("use") || l.starts_with("eu") || l.starts_with("one")) vowel = false;
  if (l.starts_with("hour") || l.starts_with("honest") || l.starts_with("heir")) vowel = true;
  return (vowel ? "an " : "a ") + phrase;
}

TemplateInstructionBackend::TemplateInstructionBackend() : patterns_(builtin_patterns()) {}

TemplateInstructionBackend::TemplateInstructionBackend(std::map<Domain, std::string> patterns)
    : patterns_(std::move(patterns)) {}

const std::string& TemplateInstructionBackend::pattern(Domain d) const {
  auto it = patterns_.find(d);
  if (it == patterns_.end()) {
    throw Error(ErrorKind::Generation, "no instruction pattern for domain '" + std::string(to_string(d)) + "'");
  }
  return it->second;
}

std::string TemplateInstructionBackend::render(const ConceptAssignment& assignment) const {
  const std::string& pat = pattern(assignment.domain);
  std::string out;
  std::size_t pos = 0;
  while (pos < pat.size()) {
    const std::size_t open = pat.find('{', pos);
    if (open == std::string::npos) {
      out.append(pat, pos, std::string::npos);
      break;
    }
    out.append(pat, pos, open - pos);
    const std::size_t close = pat.find('}', open);
    if (close == std::string::npos) throw Error(ErrorKind::Generation, "unterminated placeholder in pattern");
    const auto parts = split(pat.substr(open + 1, close - open - 1), '|');
    const std::string* value = assignment.find(parts[0]);
    if (value == nullptr) {
      throw Error(ErrorKind::Generation, "assignment is missing concept slot '" + parts[0] + "'");
    }
    std::string v = *value;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const std::string& f = parts[i];
      if (f == "lower") {
        v = lower(v);
      } else if (f == "plural") {
        const std::string* number = assignment.find("number");
        if (number == nullptr || !is_singular_number(*number)) v = pluralize(v);
      } else if (f == "article") {
        v = with_article(v);
      } else if (f == "upper_first") {
        if (!v.empty()) v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
      } else {
        throw Error(ErrorKind::Generation, "unknown placeholder filter '" + f + "'");
      }
    }
    out += v;
    pos = close + 1;
  }
  return out;
}

std::string render_instruction(const ConceptAssignment& assignment, const InstructionBackend& backend) {
  return backend.render(assignment);
}

}  // namespace visbias
