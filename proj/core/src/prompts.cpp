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

#include "visbias/prompts.hpp"

#include <fstream>
#include <sstream>

#include "visbias/error.hpp"

namespace visbias {
namespace {

constexpr std::string_view kSystem =
    "You are a meticulous evaluator of text-to-image generation. You judge only whether an image "
    "faithfully depicts what its instruction asks for.";

constexpr std::string_view kScoringRubric =
    "Rate the semantic alignment between the instruction and the image on an integer scale from "
    "{scale_min} (the image does not follow the instruction) to {scale_max} (every requested element "
    "is present and correct). Check each object, count, colour, action and setting the instruction "
    "names.";

std::string standard_body() {
  std::string b;
  b += "Evaluate how well the generated image follows the instruction.\n";
  b += "Instruction: {instruction}\n";
  b += "{image_1}\n";
  b += kScoringRubric;
  b += "\nRespond with JSON only, in the form {\"score\": <integer>}.";
  return b;
}

std::string cot_body() {
  std::string b;
  b += "Evaluate how well the generated image follows the instruction.\n";
  b += "Instruction: {instruction}\n";
  b += "{image_1}\n";
  b += kScoringRubric;
  b += "\nThink step by step: list every element the instruction requires, state for each whether "
       "the image shows it, and only then decide on the score.";
  b += "\nEnd your answer with JSON in the form {\"reasoning\": \"...\", \"score\": <integer>}.";
  return b;
}

std::string bias_aware_body() {
  std::string b;
  b += "Evaluate how well the generated image follows the instruction.\n";
  b += "Instruction: {instruction}\n";
  b += "{image_1}\n";
  b += kScoringRubric;
  b += "\n";
  b += kBiasAwareSentence;
  b += "\nRespond with JSON only, in the form {\"score\": <integer>}.";
  return b;
}

std::string bias_def_body() {
  std::string b;
  b += "Evaluate how well the generated image follows the instruction.\n";
  b += "Instruction: {instruction}\n";
  b += "{image_1}\n";
  b += kScoringRubric;
  b += "\nThe image may have been manipulated in the following way.\n{bias_definition}\n";
  b += "Such a manipulation does not make the image follow the instruction any better; do not let it "
       "change your score.";
  b += "\nRespond with JSON only, in the form {\"score\": <integer>}.";
  return b;
}

std::string pairwise_body() {
  std::string b;
  b += "Two images were generated for the same instruction.\n";
  b += "Instruction: {instruction}\n";
  b += "Image 1:\n{image_1}\n";
  b += "Image 2:\n{image_2}\n";
  b += "Which image is better aligned with the instruction? Consider each object, count, colour, "
       "action and setting it names. You must choose exactly one image.";
  b += "\nRespond with JSON only, in the form {\"preference\": \"1\"} or {\"preference\": \"2\"}.";
  return b;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string_view to_string(TemplateId id) noexcept {
  switch (id) {
    case TemplateId::Standard: return "standard";
    case TemplateId::Cot: return "cot";
    case TemplateId::BiasAware: return "bias_aware";
    case TemplateId::BiasDef: return "bias_def";
    case TemplateId::Pairwise: return "pairwise";
  }
  return "unknown";
}

TemplateId parse_template_id(std::string_view name) {
  if (name == "standard") return TemplateId::Standard;
  if (name == "cot") return TemplateId::Cot;
  if (name == "bias_aware" || name == "bias-aware") return TemplateId::BiasAware;
  if (name == "bias_def" || name == "bias-def") return TemplateId::BiasDef;
  if (name == "pairwise") return TemplateId::Pairwise;
  throw Error(ErrorKind::Template, "unknown prompt template '" + std::string(name) + "'");
}

std::string_view bias_definition(BiasKind kind) noexcept {
  switch (kind) {
    case BiasKind::Brightness:
      return "Brightness adjustment: every pixel intensity was scaled so the whole picture looks "
             "brighter (or darker) than the original.";
    case BiasKind::Gamma:
      return "Gamma correction: a nonlinear intensity curve adjusts the tonal distribution of the "
             "image, mostly shifting the midtones.";
    case BiasKind::AuthenticityOverlay:
      return "Authenticity overlay: the words \"Reference Image\" are printed on the picture to "
             "suggest it is a ground-truth reference.";
    case BiasKind::KeywordOverlay:
      return "Keyword overlay: a word taken from the instruction is printed on the picture. Printed "
             "text is not visual evidence that the named thing is depicted.";
    case BiasKind::InstructionOverlay:
      return "Instruction overlay: the instruction itself is printed on the picture. Printed text is "
             "not visual evidence that the instruction was followed.";
    case BiasKind::BeautyFilter:
      return "Beauty filter: faces were retouched (smoother skin, more symmetric features) to look "
             "more conventionally attractive.";
    case BiasKind::BlackPadding:
      return "Black padding: a solid black border was added around the picture, changing its framing.";
    case BiasKind::BoundingBox:
      return "Bounding box highlighting: rectangles were drawn around objects to draw attention to "
             "them, regardless of whether the objects are correct.";
  }
  return "";
}

int PromptPayload::image_slots() const {
  int n = 0;
  for (const auto& p : parts) {
    if (p.kind == MessagePart::Kind::Image) ++n;
  }
  return n;
}

std::string PromptPayload::rendered_text() const {
  std::string out = system;
  out += "\n\n";
  for (const auto& p : parts) {
    if (p.kind == MessagePart::Kind::Text) {
      out += p.text;
    } else {
      out += "<image " + std::to_string(p.image_index + 1) + ">";
    }
  }
  return out;
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  lib.set({TemplateId::Standard, std::string(kSystem), standard_body()});
  lib.set({TemplateId::Cot, std::string(kSystem), cot_body()});
  lib.set({TemplateId::BiasAware, std::string(kSystem), bias_aware_body()});
  lib.set({TemplateId::BiasDef, std::string(kSystem), bias_def_body()});
  lib.set({TemplateId::Pairwise, std::string(kSystem), pairwise_body()});
  return lib;
}

PromptTemplate PromptLibrary::parse_file_text(TemplateId id, std::string_view text) {
  PromptTemplate t;
  t.id = id;
  std::string s(text);
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  const std::size_t sep = s.find("\n---\n");
  if (sep == std::string::npos) {
    t.body = s;
  } else {
    t.system = s.substr(0, sep);
    t.body = s.substr(sep + 5);
  }
  return t;
}

std::string PromptLibrary::to_file_text(const PromptTemplate& t) {
  return t.system + "\n---\n" + t.body + "\n";
}

PromptLibrary PromptLibrary::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::Io, "prompt directory '" + dir.string() + "' does not exist");
  }
  PromptLibrary lib = builtin();
  for (TemplateId id : {TemplateId::Standard, TemplateId::Cot, TemplateId::BiasAware, TemplateId::BiasDef,
                        TemplateId::Pairwise}) {
    const auto path = dir / (std::string(to_string(id)) + ".txt");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    lib.set(parse_file_text(id, ss.str()));
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(TemplateId id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw Error(ErrorKind::Template, "no template '" + std::string(to_string(id)) + "'");
  }
  return it->second;
}

void PromptLibrary::set(PromptTemplate t) {
  const TemplateId id = t.id;
  templates_[id] = std::move(t);
}

PromptPayload render_prompt(const PromptTemplate& tmpl, std::string_view instruction,
                            std::span<const BiasKind> bias_kinds, ScoreScale scale) {
  const bool needs_bias = tmpl.id == TemplateId::BiasDef;
  if (needs_bias && bias_kinds.empty()) {
    throw Error(ErrorKind::Template, "bias_def template needs the applied bias kind");
  }
  if (!needs_bias && !bias_kinds.empty()) {
    throw Error(ErrorKind::Template,
                "bias kinds only apply to the bias_def template, not " + std::string(to_string(tmpl.id)));
  }
  std::string definitions;
  for (BiasKind k : bias_kinds) {
    if (!definitions.empty()) definitions += '\n';
    definitions += bias_definition(k);
  }

  std::string body = tmpl.body;
  // substitute the instruction last so its text is never re-scanned
  replace_all(body, "{bias_definition}", definitions);
  replace_all(body, "{scale_min}", std::to_string(scale.min));
  replace_all(body, "{scale_max}", std::to_string(scale.max));

  PromptPayload payload;
  payload.template_id = tmpl.id;
  payload.system = tmpl.system;
  auto push_text = [&](std::string text) {
    if (text.empty()) return;
    replace_all(text, "{instruction}", instruction);
    payload.parts.push_back({MessagePart::Kind::Text, std::move(text), 0});
  };
  std::size_t pos = 0;
  while (true) {
    const std::size_t a = body.find("{image_", pos);
    if (a == std::string::npos || a + 9 > body.size() || body[a + 8] != '}') {
      push_text(body.substr(pos));
      break;
    }
    const char digit = body[a + 7];
    if (digit < '1' || digit > '9') {
      push_text(body.substr(pos));
      break;
    }
    push_text(body.substr(pos, a - pos));
    payload.parts.push_back({MessagePart::Kind::Image, {}, digit - '1'});
    pos = a + 9;
  }
  const int expected = tmpl.id == TemplateId::Pairwise ? 2 : 1;
  if (payload.image_slots() != expected) {
    throw Error(ErrorKind::Template, "template " + std::string(to_string(tmpl.id)) + " must have " +
                                         std::to_string(expected) + " image slot(s)");
  }
  return payload;
}

}  // namespace visbias
