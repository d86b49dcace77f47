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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "visbias/bias.hpp"

namespace visbias {

struct BrightnessParams {
  double factor = 1.0;
  friend bool operator==(const BrightnessParams&, const BrightnessParams&) = default;
};

struct GammaParams {
  double gamma = 1.0;
  friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

struct OverlayParams {
  std::string text;
  Anchor anchor = Anchor::BottomRight;
  double font_size = 30.0;
  int margin = kDefaultOverlayMargin;
  friend bool operator==(const OverlayParams&, const OverlayParams&) = default;
};

struct BeautyParams {
  std::string command;
  friend bool operator==(const BeautyParams&, const BeautyParams&) = default;
};

struct PaddingParams {
  int thickness = 0;
  PaddingMode mode = PaddingMode::Outward;
  friend bool operator==(const PaddingParams&, const PaddingParams&) = default;
};

struct BoxParams {
  std::vector<BoxAnnotation> boxes;
  BoxStyle style;
  friend bool operator==(const BoxParams&, const BoxParams&) = default;
};

using BiasParams =
    std::variant<BrightnessParams, GammaParams, OverlayParams, BeautyParams, PaddingParams, BoxParams>;

struct BiasStep {
  BiasKind kind;
  BiasParams params;
  friend bool operator==(const BiasStep&, const BiasStep&) = default;
};

inline constexpr std::size_t kDefaultMaxRecipeLength = 3;

/// Ordered manipulation applied to one image. Kinds are distinct.
struct BiasRecipe {
  std::vector<BiasStep> steps;

  bool empty() const noexcept { return steps.empty(); }
  friend bool operator==(const BiasRecipe&, const BiasRecipe&) = default;
};

// Checks parameter invariants, kind/params agreement, distinct kinds and the
// length bound. Throws Error(Parameter).
void validate(const BiasStep& step);
void validate(const BiasRecipe& recipe, std::size_t max_length = kDefaultMaxRecipeLength);

// Throws Error(Applicability) if any step cannot be used on `domain`.
void check_applicable(const BiasRecipe& recipe, Domain domain);

// "baseline" for an empty recipe, otherwise kinds joined by '+'.
std::string recipe_label(const BiasRecipe& recipe);

// Scalar that identifies the step's main parameter: factor, gamma, padding
// thickness, anchor index for overlays, stroke width for boxes, 0 otherwise.
double primary_parameter(const BiasStep& step);

// Compact human-readable parameters, e.g. "factor=1.2" or "anchor=top_right".
std::string describe_params(const BiasStep& step);

// Execution log of a recipe (external commands run by the beauty filter).
struct RecipeTrace {
  std::vector<std::string> commands;
};

RasterImage apply_step(const RasterImage& img, const BiasStep& step, RecipeTrace* trace = nullptr);

// Applies steps left to right after validation and the applicability check.
RasterImage apply_recipe(const RasterImage& img, const BiasRecipe& recipe, Domain domain,
                         RecipeTrace* trace = nullptr,
                         std::size_t max_length = kDefaultMaxRecipeLength);

// ---------------------------------------------------------------------------
// Recipe files describe steps whose text and boxes are bound per instance.

struct TextSource {
  enum class Kind { Instruction, Keyword, Literal };
  Kind kind = Kind::Literal;
  std::string value;  // concept slot for Keyword, text for Literal

  friend bool operator==(const TextSource&, const TextSource&) = default;
};

TextSource parse_text_source(std::string_view spec);
std::string to_string(const TextSource& src);

struct StepTemplate {
  BiasStep step;
  std::optional<TextSource> text_source;  // overlays only
  bool boxes_from_sidecar = false;        // bounding_box only

  friend bool operator==(const StepTemplate&, const StepTemplate&) = default;
};

struct RecipeTemplate {
  std::vector<StepTemplate> steps;

  bool empty() const noexcept { return steps.empty(); }
  std::vector<BiasKind> kinds() const;
  friend bool operator==(const RecipeTemplate&, const RecipeTemplate&) = default;
};

// Instance data a template is bound against.
struct InstanceContext {
  std::string instruction;
  std::map<std::string, std::string> concepts;
  std::vector<BoxAnnotation> boxes;
};

BiasRecipe resolve(const RecipeTemplate& tmpl, const InstanceContext& ctx);

// Sorts steps into canonical_rank order.
RecipeTemplate canonicalize(RecipeTemplate tmpl);

std::string recipe_label(const RecipeTemplate& tmpl);

// Recipe JSON: {"steps":[{"kind":"brightness","factor":1.2}, ...]}.
RecipeTemplate recipe_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RecipeTemplate& tmpl);
nlohmann::json to_json(const StepTemplate& step);
StepTemplate step_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BiasRecipe& recipe);
RecipeTemplate load_recipe(const std::filesystem::path& path);

struct BoxSidecar {
  std::string image;
  std::vector<BoxAnnotation> boxes;
};

BoxSidecar box_sidecar_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BoxSidecar& sidecar);
BoxSidecar load_box_sidecar(const std::filesystem::path& path);

}  // namespace visbias
