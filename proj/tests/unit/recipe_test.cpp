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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "visbias/error.hpp"
#include "visbias/recipe.hpp"

using namespace visbias;
using visbias::testing::noise_image;
using visbias::testing::TempDir;

namespace {

BiasStep brightness(double f) { return {BiasKind::Brightness, BrightnessParams{f}}; }
BiasStep padding(int t) { return {BiasKind::BlackPadding, PaddingParams{t}}; }

}  // namespace

TEST(Recipe, EmptyRecipeIsIdentity) {
  const auto img = noise_image(12, 12, 1);
  EXPECT_EQ(apply_recipe(img, {}, Domain::Animals), img);
  EXPECT_EQ(recipe_label(BiasRecipe{}), "baseline");
}

TEST(Recipe, StepsApplyLeftToRight) {
  const auto img = noise_image(12, 12, 2);
  const BiasRecipe r{{brightness(1.2), padding(3)}};
  EXPECT_EQ(apply_recipe(img, r, Domain::Indoor), add_padding(adjust_brightness(img, 1.2), 3));
  EXPECT_EQ(recipe_label(r), "brightness+black_padding");
}

TEST(Recipe, ValidationRules) {
  EXPECT_THROW(validate(BiasRecipe{{brightness(1.2), brightness(1.1)}}), Error);
  EXPECT_THROW(validate(BiasRecipe{{brightness(0.0)}}), Error);
  BiasRecipe four{{brightness(1.2), padding(3), {BiasKind::Gamma, GammaParams{1.2}},
                   {BiasKind::AuthenticityOverlay, OverlayParams{"Reference Image"}}}};
  EXPECT_THROW(validate(four), Error);
  EXPECT_NO_THROW(validate(four, 4));
  EXPECT_THROW(validate(BiasStep{BiasKind::Gamma, BrightnessParams{1.2}}), Error);
}

TEST(Recipe, Applicability) {
  EXPECT_FALSE(is_applicable(BiasKind::KeywordOverlay, Domain::Outdoor));
  EXPECT_FALSE(is_applicable(BiasKind::BoundingBox, Domain::Outdoor));
  EXPECT_TRUE(is_applicable(BiasKind::BeautyFilter, Domain::People));
  EXPECT_FALSE(is_applicable(BiasKind::BeautyFilter, Domain::Animals));
  const BiasRecipe r{{{BiasKind::KeywordOverlay, OverlayParams{"Lake"}}}};
  try {
    check_applicable(r, Domain::Outdoor);
    FAIL() << "expected an applicability error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Applicability);
  }
}

TEST(Recipe, CanonicalOrder) {
  RecipeTemplate t;
  t.steps.push_back({padding(10), std::nullopt, false});
  t.steps.push_back({{BiasKind::InstructionOverlay, OverlayParams{}}, TextSource{TextSource::Kind::Instruction, {}},
                     false});
  t.steps.push_back({brightness(1.2), std::nullopt, false});
  const auto c = canonicalize(t);
  ASSERT_EQ(c.steps.size(), 3u);
  EXPECT_EQ(c.steps[0].step.kind, BiasKind::Brightness);
  EXPECT_EQ(c.steps[1].step.kind, BiasKind::InstructionOverlay);
  EXPECT_EQ(c.steps[2].step.kind, BiasKind::BlackPadding);
}

TEST(Recipe, JsonRoundTripAndResolve) {
  const auto j = nlohmann::json::parse(R"({"steps":[
    {"kind":"keyword_overlay","text_source":"keyword:object","anchor":"top_left"},
    {"kind":"instruction_overlay"},
    {"kind":"gamma","gamma":1.5}]})");
  const RecipeTemplate t = recipe_from_json(j);
  EXPECT_EQ(recipe_from_json(to_json(t)), t);

  InstanceContext ctx;
  ctx.instruction = "Generate an image of two foxes.";
  ctx.concepts = {{"object", "Fox"}};
  const BiasRecipe r = resolve(t, ctx);
  ASSERT_EQ(r.steps.size(), 3u);
  EXPECT_EQ(std::get<OverlayParams>(r.steps[0].params).text, "Fox");
  EXPECT_EQ(std::get<OverlayParams>(r.steps[0].params).anchor, Anchor::TopLeft);
  EXPECT_EQ(std::get<OverlayParams>(r.steps[1].params).text, ctx.instruction);
  EXPECT_DOUBLE_EQ(std::get<GammaParams>(r.steps[2].params).gamma, 1.5);
}

TEST(Recipe, MissingKeywordSlotFails) {
  const RecipeTemplate t = recipe_from_json(nlohmann::json::parse(
      R"({"steps":[{"kind":"keyword_overlay","text_source":"keyword:scene"}]})"));
  EXPECT_THROW(resolve(t, InstanceContext{}), Error);
}

TEST(Recipe, ShippedRecipesParse) {
  for (const auto& entry : std::filesystem::directory_iterator(std::filesystem::path(VISBIAS_DATA_DIR) / "recipes")) {
    EXPECT_NO_THROW(load_recipe(entry.path())) << entry.path();
  }
}

TEST(BeautyFilter, RunsExternalCommand) {
  const auto img = noise_image(16, 16, 3);
  const auto out = apply_beauty_filter(img, "cp {in} {out}");
  EXPECT_EQ(out.image, img);
  EXPECT_NE(out.command_line.find("cp "), std::string::npos);

  const BiasRecipe r{{{BiasKind::BeautyFilter, BeautyParams{"cp {in} {out}"}}}};
  RecipeTrace trace;
  EXPECT_EQ(apply_recipe(img, r, Domain::People, &trace), img);
  EXPECT_EQ(trace.commands.size(), 1u);
}

TEST(BeautyFilter, MissingExecutableIsExternalToolError) {
  const auto img = noise_image(8, 8, 4);
  try {
    apply_beauty_filter(img, "visbias-no-such-enhancer {in} {out}");
    FAIL() << "expected an external tool error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ExternalTool);
  }
}

TEST(BeautyFilter, TemplateNeedsBothPlaceholders) {
  const auto img = noise_image(8, 8, 5);
  EXPECT_THROW(apply_beauty_filter(img, "cp {in} /tmp/x.png"), Error);
}
