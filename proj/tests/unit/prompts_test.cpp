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

#include "visbias/error.hpp"
#include "visbias/prompts.hpp"

using namespace visbias;

TEST(Prompts, ShippedFilesMatchBuiltins) {
  const auto builtin = PromptLibrary::builtin();
  const auto loaded = PromptLibrary::load_dir(std::filesystem::path(VISBIAS_DATA_DIR) / "prompts");
  for (auto id : {TemplateId::Standard, TemplateId::Cot, TemplateId::BiasAware, TemplateId::BiasDef,
                  TemplateId::Pairwise}) {
    EXPECT_EQ(loaded.get(id), builtin.get(id)) << to_string(id);
  }
}

TEST(Prompts, FileTextRoundTrip) {
  const auto t = PromptLibrary::builtin().get(TemplateId::Cot);
  EXPECT_EQ(PromptLibrary::parse_file_text(TemplateId::Cot, PromptLibrary::to_file_text(t)), t);
}

TEST(Prompts, StandardRendersInstructionAndScale) {
  const auto p = render_prompt(PromptLibrary::builtin().get(TemplateId::Standard), "Draw two owls", {}, {1, 10});
  EXPECT_EQ(p.image_slots(), 1);
  const auto text = p.rendered_text();
  EXPECT_NE(text.find("Draw two owls"), std::string::npos);
  EXPECT_NE(text.find("10"), std::string::npos);
  EXPECT_EQ(text.find("{instruction}"), std::string::npos);
  EXPECT_EQ(text.find("{scale_max}"), std::string::npos);
}

TEST(Prompts, BiasAwareContainsSentence) {
  const auto p = render_prompt(PromptLibrary::builtin().get(TemplateId::BiasAware), "x");
  EXPECT_NE(p.rendered_text().find(kBiasAwareSentence), std::string::npos);
}

TEST(Prompts, BiasDefInsertsDefinitions) {
  const auto& t = PromptLibrary::builtin().get(TemplateId::BiasDef);
  const BiasKind kinds[] = {BiasKind::Gamma};
  const auto p = render_prompt(t, "x", kinds);
  EXPECT_NE(p.rendered_text().find("adjusts the tonal distribution"), std::string::npos);
  EXPECT_THROW(render_prompt(t, "x"), Error);
  EXPECT_THROW(render_prompt(PromptLibrary::builtin().get(TemplateId::Standard), "x", kinds), Error);
}

TEST(Prompts, PairwiseHasTwoImageSlots) {
  const auto p = render_prompt(PromptLibrary::builtin().get(TemplateId::Pairwise), "x");
  EXPECT_EQ(p.image_slots(), 2);
}

TEST(Prompts, InstructionBracesStayLiteral) {
  const auto p = render_prompt(PromptLibrary::builtin().get(TemplateId::Standard), "a sign reading {image_2}");
  EXPECT_EQ(p.image_slots(), 1);
  EXPECT_NE(p.rendered_text().find("a sign reading {image_2}"), std::string::npos);
}

TEST(Prompts, TemplateIdNames) {
  EXPECT_EQ(parse_template_id("bias-aware"), TemplateId::BiasAware);
  EXPECT_EQ(parse_template_id("bias_def"), TemplateId::BiasDef);
  EXPECT_THROW(parse_template_id("fancy"), Error);
}
