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

#include "visbias/recipe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "visbias/error.hpp"

namespace visbias {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool params_match_kind(const BiasStep& s) {
  switch (s.kind) {
    case BiasKind::Brightness: return std::holds_alternative<BrightnessParams>(s.params);
    case BiasKind::Gamma: return std::holds_alternative<GammaParams>(s.params);
    case BiasKind::AuthenticityOverlay:
    case BiasKind::KeywordOverlay:
    case BiasKind::InstructionOverlay: return std::holds_alternative<OverlayParams>(s.params);
    case BiasKind::BeautyFilter: return std::holds_alternative<BeautyParams>(s.params);
    case BiasKind::BlackPadding: return std::holds_alternative<PaddingParams>(s.params);
    case BiasKind::BoundingBox: return std::holds_alternative<BoxParams>(s.params);
  }
  return false;
}

std::string fmt_number(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

int anchor_index(Anchor a) {
  for (std::size_t i = 0; i < kAllAnchors.size(); ++i) {
    if (kAllAnchors[i] == a) return static_cast<int>(i);
  }
  return 0;
}

}  // namespace

void validate(const BiasStep& step) {
  if (!params_match_kind(step)) {
    throw Error(ErrorKind::Parameter,
                "parameters do not match bias kind " + std::string(to_string(step.kind)));
  }
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  std::visit(Overloaded{
                 [&](const BrightnessParams& p) {
                   if (!positive(p.factor)) throw Error(ErrorKind::Parameter, "brightness factor must be > 0");
                 },
                 [&](const GammaParams& p) {
                   if (!positive(p.gamma)) throw Error(ErrorKind::Parameter, "gamma must be > 0");
                 },
                 [&](const OverlayParams& p) {
                   if (!positive(p.font_size)) throw Error(ErrorKind::Parameter, "font_size must be > 0");
                   if (p.margin < 0) throw Error(ErrorKind::Parameter, "margin must be >= 0");
                   if (p.text.empty()) throw Error(ErrorKind::Parameter, "overlay text is empty");
                 },
                 [&](const BeautyParams& p) {
                   if (p.command.find("{in}") == std::string::npos ||
                       p.command.find("{out}") == std::string::npos) {
                     throw Error(ErrorKind::Parameter, "beauty filter command needs {in} and {out}");
                   }
                 },
                 [&](const PaddingParams& p) {
                   if (p.thickness < 0) throw Error(ErrorKind::Parameter, "thickness must be >= 0");
                 },
                 [&](const BoxParams& p) {
                   if (p.style.stroke_width < 1) throw Error(ErrorKind::Parameter, "stroke_width must be >= 1");
                 },
             },
             step.params);
}

void validate(const BiasRecipe& recipe, std::size_t max_length) {
  if (recipe.steps.size() > max_length) {
    throw Error(ErrorKind::Parameter, "recipe has " + std::to_string(recipe.steps.size()) +
                                          " steps, limit is " + std::to_string(max_length));
  }
  std::set<BiasKind> seen;
  for (const auto& s : recipe.steps) {
    validate(s);
    if (!seen.insert(s.kind).second) {
      throw Error(ErrorKind::Parameter,
                  "bias kind " + std::string(to_string(s.kind)) + " appears twice in one recipe");
    }
  }
}

void check_applicable(const BiasRecipe& recipe, Domain domain) {
  for (const auto& s : recipe.steps) {
    if (!is_applicable(s.kind, domain)) {
      throw Error(ErrorKind::Applicability,
                  std::string(to_string(s.kind)) + " is not applicable to the " +
                      std::string(to_string(domain)) + " domain" +
                      (is_object_oriented(s.kind)
                           ? " (object-oriented manipulations need objects; outdoor scenes have none)"
                           : " (beauty filter only targets people)"));
    }
  }
}

std::string recipe_label(const BiasRecipe& recipe) {
  if (recipe.steps.empty()) return "baseline";
  std::string label;
  for (const auto& s : recipe.steps) {
    if (!label.empty()) label += '+';
    label += to_string(s.kind);
  }
  return label;
}

double primary_parameter(const BiasStep& step) {
  return std::visit(Overloaded{
                        [](const BrightnessParams& p) { return p.factor; },
                        [](const GammaParams& p) { return p.gamma; },
                        [](const OverlayParams& p) { return static_cast<double>(anchor_index(p.anchor)); },
                        [](const BeautyParams&) { return 0.0; },
                        [](const PaddingParams& p) { return static_cast<double>(p.thickness); },
                        [](const BoxParams& p) { return static_cast<double>(p.style.stroke_width); },
                    },
                    step.params);
}

std::string describe_params(const BiasStep& step) {
  return std::visit(Overloaded{
                        [](const BrightnessParams& p) { return "factor=" + fmt_number(p.factor); },
                        [](const GammaParams& p) { return "gamma=" + fmt_number(p.gamma); },
                        [](const OverlayParams& p) {
                          return "anchor=" + std::string(to_string(p.anchor)) +
                                 ";font_size=" + fmt_number(p.font_size);
                        },
                        [](const BeautyParams&) { return std::string("external"); },
                        [](const PaddingParams& p) {
                          return "thickness=" + std::to_string(p.thickness) +
                                 (p.mode == PaddingMode::Inward ? ";inward" : "");
                        },
                        [](const BoxParams& p) { return "stroke=" + std::to_string(p.style.stroke_width); },
                    },
                    step.params);
}

RasterImage apply_step(const RasterImage& img, const BiasStep& step, RecipeTrace* trace) {
  validate(step);
  return std::visit(
      Overloaded{
          [&](const BrightnessParams& p) { return adjust_brightness(img, p.factor); },
          [&](const GammaParams& p) { return gamma_correct(img, p.gamma); },
          [&](const OverlayParams& p) { return overlay_text(img, p.text, p.anchor, p.font_size, p.margin); },
          [&](const BeautyParams& p) {
            auto result = apply_beauty_filter(img, p.command);
            if (trace) trace->commands.push_back(result.command_line);
            return std::move(result.image);
          },
          [&](const PaddingParams& p) { return add_padding(img, p.thickness, p.mode); },
          [&](const BoxParams& p) { return draw_boxes(img, p.boxes, p.style); },
      },
      step.params);
}

RasterImage apply_recipe(const RasterImage& img, const BiasRecipe& recipe, Domain domain,
                         RecipeTrace* trace, std::size_t max_length) {
  validate(recipe, max_length);
  check_applicable(recipe, domain);
  RasterImage current = img;
  for (const auto& s : recipe.steps) current = apply_step(current, s, trace);
  return current;
}

// ---------------------------------------------------------------------------

TextSource parse_text_source(std::string_view spec) {
  if (spec == "instruction") return {TextSource::Kind::Instruction, {}};
  if (spec.starts_with("keyword:")) {
    std::string slot(spec.substr(8));
    if (slot.empty()) throw Error(ErrorKind::Parameter, "keyword text source needs a slot name");
    return {TextSource::Kind::Keyword, slot};
  }
  if (spec.starts_with("literal:")) return {TextSource::Kind::Literal, std::string(spec.substr(8))};
  if (spec.empty()) throw Error(ErrorKind::Parameter, "empty text_source");
  return {TextSource::Kind::Literal, std::string(spec)};
}

std::string to_string(const TextSource& src) {
  switch (src.kind) {
    case TextSource::Kind::Instruction: return "instruction";
    case TextSource::Kind::Keyword: return "keyword:" + src.value;
    case TextSource::Kind::Literal:
      if (src.value == "instruction" || src.value.starts_with("keyword:") ||
          src.value.starts_with("literal:")) {
        return "literal:" + src.value;
      }
      return src.value;
  }
  return src.value;
}

std::vector<BiasKind> RecipeTemplate::kinds() const {
  std::vector<BiasKind> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.step.kind);
  return out;
}

BiasRecipe resolve(const RecipeTemplate& tmpl, const InstanceContext& ctx) {
  BiasRecipe recipe;
  for (const auto& st : tmpl.steps) {
    BiasStep step = st.step;
    if (st.text_source) {
      auto& p = std::get<OverlayParams>(step.params);
      switch (st.text_source->kind) {
        case TextSource::Kind::Instruction:
          if (ctx.instruction.empty()) throw Error(ErrorKind::Reference, "instance has no instruction text");
          p.text = ctx.instruction;
          break;
        case TextSource::Kind::Keyword: {
          auto it = ctx.concepts.find(st.text_source->value);
          if (it == ctx.concepts.end()) {
            throw Error(ErrorKind::Reference, "instance has no concept slot '" + st.text_source->value + "'");
          }
          p.text = it->second;
          break;
        }
        case TextSource::Kind::Literal:
          p.text = st.text_source->value;
          break;
      }
    }
    if (st.boxes_from_sidecar) std::get<BoxParams>(step.params).boxes = ctx.boxes;
    recipe.steps.push_back(std::move(step));
  }
  return recipe;
}

RecipeTemplate canonicalize(RecipeTemplate tmpl) {
  std::stable_sort(tmpl.steps.begin(), tmpl.steps.end(), [](const StepTemplate& a, const StepTemplate& b) {
    return canonical_rank(a.step.kind) < canonical_rank(b.step.kind);
  });
  return tmpl;
}

std::string recipe_label(const RecipeTemplate& tmpl) {
  if (tmpl.steps.empty()) return "baseline";
  std::string label;
  for (const auto& s : tmpl.steps) {
    if (!label.empty()) label += '+';
    label += to_string(s.step.kind);
  }
  return label;
}

namespace {

using nlohmann::json;

std::vector<BoxAnnotation> boxes_from_json(const json& arr) {
  std::vector<BoxAnnotation> boxes;
  for (const auto& b : arr) {
    BoxAnnotation box;
    box.x = b.at("x").get<int>();
    box.y = b.at("y").get<int>();
    box.w = b.at("w").get<int>();
    box.h = b.at("h").get<int>();
    if (b.contains("label") && !b["label"].is_null()) box.label = b["label"].get<std::string>();
    boxes.push_back(std::move(box));
  }
  return boxes;
}

json boxes_to_json(const std::vector<BoxAnnotation>& boxes) {
  json arr = json::array();
  for (const auto& b : boxes) {
    json o = {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
    if (b.label) o["label"] = *b.label;
    arr.push_back(std::move(o));
  }
  return arr;
}

json params_to_json(const BiasStep& step) {
  json j = {{"kind", std::string(to_string(step.kind))}};
  std::visit(Overloaded{
                 [&](const BrightnessParams& p) { j["factor"] = p.factor; },
                 [&](const GammaParams& p) { j["gamma"] = p.gamma; },
                 [&](const OverlayParams& p) {
                   j["anchor"] = std::string(to_string(p.anchor));
                   j["font_size"] = p.font_size;
                   if (p.margin != kDefaultOverlayMargin) j["margin"] = p.margin;
                   if (!p.text.empty()) j["text"] = p.text;
                 },
                 [&](const BeautyParams& p) { j["command"] = p.command; },
                 [&](const PaddingParams& p) {
                   j["thickness"] = p.thickness;
                   if (p.mode == PaddingMode::Inward) j["mode"] = "inward";
                 },
                 [&](const BoxParams& p) {
                   j["stroke_width"] = p.style.stroke_width;
                   j["color"] = {p.style.color.r, p.style.color.g, p.style.color.b};
                   if (p.style.draw_labels) {
                     j["draw_labels"] = true;
                     j["label_font_size"] = p.style.label_font_size;
                   }
                   j["boxes"] = boxes_to_json(p.boxes);
                 },
             },
             step.params);
  return j;
}

}  // namespace

StepTemplate step_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw Error(ErrorKind::Parameter, "recipe step must be an object with a \"kind\"");
  }
  StepTemplate st;
  const BiasKind kind = parse_bias_kind(j.at("kind").get<std::string>());
  st.step.kind = kind;
  try {
    switch (kind) {
      case BiasKind::Brightness:
        st.step.params = BrightnessParams{j.at("factor").get<double>()};
        break;
      case BiasKind::Gamma:
        st.step.params = GammaParams{j.at("gamma").get<double>()};
        break;
      case BiasKind::AuthenticityOverlay:
      case BiasKind::KeywordOverlay:
      case BiasKind::InstructionOverlay: {
        OverlayParams p;
        p.anchor = parse_anchor(j.value("anchor", std::string("bottom_right")));
        p.font_size = j.value("font_size", kind == BiasKind::InstructionOverlay ? 20.0 : 30.0);
        p.margin = j.value("margin", kDefaultOverlayMargin);
        if (j.contains("text")) {
          p.text = j["text"].get<std::string>();
        } else {
          std::string src = j.value("text_source", std::string());
          if (src.empty()) {
            src = kind == BiasKind::InstructionOverlay ? "instruction"
                  : kind == BiasKind::KeywordOverlay   ? "keyword:object"
                                                       : "Reference Image";
          }
          st.text_source = parse_text_source(src);
          if (st.text_source->kind == TextSource::Kind::Literal) {
            p.text = st.text_source->value;
            st.text_source.reset();
          }
        }
        st.step.params = std::move(p);
        break;
      }
      case BiasKind::BeautyFilter:
        st.step.params = BeautyParams{j.at("command").get<std::string>()};
        break;
      case BiasKind::BlackPadding: {
        PaddingParams p;
        p.thickness = j.at("thickness").get<int>();
        const std::string mode = j.value("mode", std::string("outward"));
        if (mode == "inward") {
          p.mode = PaddingMode::Inward;
        } else if (mode != "outward") {
          throw Error(ErrorKind::Parameter, "padding mode must be outward or inward");
        }
        st.step.params = p;
        break;
      }
      case BiasKind::BoundingBox: {
        BoxParams p;
        p.style.stroke_width = j.value("stroke_width", 3);
        if (j.contains("color")) {
          const auto& c = j["color"];
          p.style.color = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
                           c.at(2).get<std::uint8_t>()};
        }
        p.style.draw_labels = j.value("draw_labels", false);
        p.style.label_font_size = j.value("label_font_size", 16.0);
        if (j.contains("boxes")) {
          p.boxes = boxes_from_json(j["boxes"]);
        } else {
          st.boxes_from_sidecar = true;
        }
        st.step.params = std::move(p);
        break;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parameter,
                "bad " + std::string(to_string(kind)) + " step: " + std::string(e.what()));
  }
  BiasStep probe = st.step;
  if (auto* p = std::get_if<OverlayParams>(&probe.params); p && p->text.empty()) p->text = "x";
  validate(probe);
  return st;
}

json to_json(const StepTemplate& st) {
  json j = params_to_json(st.step);
  if (st.text_source) {
    j.erase("text");
    j["text_source"] = to_string(*st.text_source);
  }
  if (st.boxes_from_sidecar) j.erase("boxes");
  return j;
}

RecipeTemplate recipe_from_json(const json& j) {
  if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
    throw Error(ErrorKind::Parameter, "recipe must be an object with a \"steps\" array");
  }
  RecipeTemplate tmpl;
  std::set<BiasKind> seen;
  for (const auto& s : j["steps"]) {
    auto st = step_from_json(s);
    if (!seen.insert(st.step.kind).second) {
      throw Error(ErrorKind::Parameter,
                  "bias kind " + std::string(to_string(st.step.kind)) + " appears twice in one recipe");
    }
    tmpl.steps.push_back(std::move(st));
  }
  return tmpl;
}

json to_json(const RecipeTemplate& tmpl) {
  json steps = json::array();
  for (const auto& s : tmpl.steps) steps.push_back(to_json(s));
  return {{"steps", steps}};
}

json to_json(const BiasRecipe& recipe) {
  json steps = json::array();
  for (const auto& s : recipe.steps) steps.push_back(params_to_json(s));
  return steps;
}

RecipeTemplate load_recipe(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open recipe '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parameter, "recipe '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return recipe_from_json(j);
}

BoxSidecar box_sidecar_from_json(const json& j) {
  try {
    BoxSidecar s;
    s.image = j.value("image", std::string());
    s.boxes = boxes_from_json(j.at("boxes"));
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("bad box sidecar: ") + e.what());
  }
}

json to_json(const BoxSidecar& sidecar) {
  return {{"image", sidecar.image}, {"boxes", boxes_to_json(sidecar.boxes)}};
}

BoxSidecar load_box_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open box sidecar '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, "box sidecar '" + path.string() + "' is not valid JSON");
  }
  return box_sidecar_from_json(j);
}

}  // namespace visbias
