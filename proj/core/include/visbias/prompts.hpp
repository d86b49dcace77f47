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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visbias/bias.hpp"
#include "visbias/domain.hpp"

namespace visbias {

enum class TemplateId { Standard, Cot, BiasAware, BiasDef, Pairwise };

std::string_view to_string(TemplateId id) noexcept;
// Accepts "standard", "cot", "bias_aware"/"bias-aware", "bias_def"/"bias-def",
// "pairwise".
TemplateId parse_template_id(std::string_view name);

inline constexpr std::string_view kBiasAwareSentence =
    "You must disregard any superficial or stylistic perturbations that do not materially affect "
    "the semantic alignment between the instruction and the generated image.";

// One-paragraph description of each manipulation, inserted by bias_def.
std::string_view bias_definition(BiasKind kind) noexcept;

/// A prompt template. `body` may contain {instruction}, {bias_definition},
/// {scale_min}, {scale_max} and image slots {image_1}, {image_2}; any other
/// braces are literal text.
struct PromptTemplate {
  TemplateId id = TemplateId::Standard;
  std::string system;
  std::string body;

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

struct MessagePart {
  enum class Kind { Text, Image };
  Kind kind = Kind::Text;
  std::string text;     // Text parts
  int image_index = 0;  // Image parts, 0-based presentation order

  friend bool operator==(const MessagePart&, const MessagePart&) = default;
};

struct PromptPayload {
  TemplateId template_id = TemplateId::Standard;
  std::string system;
  std::vector<MessagePart> parts;

  int image_slots() const;
  // System text and all text parts joined, with image slots as markers.
  std::string rendered_text() const;
  friend bool operator==(const PromptPayload&, const PromptPayload&) = default;
};

class PromptLibrary {
 public:
  static PromptLibrary builtin();

  // Reads <id>.txt for every template id found in `dir`; missing files fall
  // back to the built-in text. A line "---" separates system text from body.
  static PromptLibrary load_dir(const std::filesystem::path& dir);
  static PromptTemplate parse_file_text(TemplateId id, std::string_view text);
  static std::string to_file_text(const PromptTemplate& t);

  const PromptTemplate& get(TemplateId id) const;
  void set(PromptTemplate t);

 private:
  std::map<TemplateId, PromptTemplate> templates_;
};

// bias_kinds must be non-empty exactly when the template is bias_def; each
// kind's definition is inserted in order. Throws Error(Template).
PromptPayload render_prompt(const PromptTemplate& tmpl, std::string_view instruction,
                            std::span<const BiasKind> bias_kinds = {}, ScoreScale scale = {});

}  // namespace visbias
