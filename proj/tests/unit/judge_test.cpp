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
#include "visbias/cache.hpp"
#include "visbias/error.hpp"
#include "visbias/judge.hpp"

using namespace visbias;
using visbias::testing::TempDir;

namespace {

PromptPayload standard_payload(const std::string& instruction = "Two owls on a branch") {
  return render_prompt(PromptLibrary::builtin().get(TemplateId::Standard), instruction);
}

JudgeBackendConfig mock_config(BackendKind kind, nlohmann::json mock) {
  JudgeBackendConfig cfg;
  cfg.kind = kind;
  cfg.mock = std::move(mock);
  return cfg;
}

BiasRecipe overlay_recipe() {
  return BiasRecipe{{{BiasKind::InstructionOverlay, OverlayParams{"Two owls"}}}};
}

}  // namespace

TEST(JudgeConfig, ParsesAndValidates) {
  const auto cfg = judge_config_from_json(nlohmann::json::parse(R"({
    "kind":"http_chat_vision","base_url":"http://localhost:1/v1","model_id":"m",
    "max_parallel":3,"retry":{"max_attempts":2,"backoff_base_seconds":0.5},"credential_env":"X_KEY"})"));
  EXPECT_EQ(cfg.kind, BackendKind::HttpChatVision);
  EXPECT_EQ(cfg.max_parallel, 3);
  EXPECT_EQ(cfg.retry.max_attempts, 2);
  EXPECT_EQ(fingerprint(cfg), "http_chat_vision:m:t=0.0");
  EXPECT_EQ(judge_config_from_json(to_json(cfg)).credential_env, "X_KEY");

  EXPECT_THROW(judge_config_from_json(nlohmann::json::parse(R"({"kind":"http_chat_vision"})")), Error);
  EXPECT_THROW(judge_config_from_json(nlohmann::json::parse(R"({"kind":"mock_susceptible","max_parallel":0})")),
               Error);
  EXPECT_THROW(judge_config_from_json(nlohmann::json::parse(R"({"kind":"oracle"})")), Error);
}

TEST(JudgeConfig, ShippedConfigsLoad) {
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(VISBIAS_DATA_DIR) / "judges")) {
    EXPECT_NO_THROW(load_judge_config(e.path())) << e.path();
  }
}

TEST(JudgeConfig, FingerprintTracksMockSpec) {
  const auto a = mock_config(BackendKind::MockSusceptible, {{"susceptibility", {{"gamma", 0.5}}}});
  const auto b = mock_config(BackendKind::MockSusceptible, {{"susceptibility", {{"gamma", 0.6}}}});
  EXPECT_NE(fingerprint(a), fingerprint(b));
  EXPECT_EQ(fingerprint(a).rfind("mock_susceptible:", 0), 0u);
}

TEST(ScriptedMock, ReturnsScriptedScore) {
  Judge judge(mock_config(BackendKind::MockScripted, {{"scores", {{"id42", 3}}}}));
  const RasterImage img(8, 8);
  const ImageMeta meta{"id42", Domain::Animals, {}, {}};
  const auto v = judge.score_single(standard_payload(), img, meta);
  EXPECT_EQ(v.score, 3.0);
  EXPECT_FALSE(v.cached);
  const ImageMeta other{"id43", Domain::Animals, {}, {}};
  EXPECT_THROW(judge.score_single(standard_payload(), img, other), Error);
}

TEST(ScriptedMock, VerbatimRepliesGoThroughTheParser) {
  Judge judge(mock_config(BackendKind::MockScripted,
                          {{"replies", {{"a", "I'd give it a 3 out of 5."}, {"b", "excellent image"}}}}));
  const RasterImage img(8, 8);
  const ImageMeta a{"a", Domain::People, {}, {}};
  const ImageMeta b{"b", Domain::People, {}, {}};
  EXPECT_EQ(judge.score_single(standard_payload(), img, a).score, 3.0);
  EXPECT_THROW(judge.score_single(standard_payload(), img, b), ParseError);
}

TEST(SusceptibleMock, BasePlusDeltaAndCache) {
  TempDir dir;
  auto cache = std::make_shared<VerdictCache>(dir.path());
  const auto cfg = mock_config(BackendKind::MockSusceptible,
                               {{"base_scores", {{"x", 2}}}, {"susceptibility", {{"instruction_overlay", 1.0}}}});
  Judge judge(cfg, cache);
  const RasterImage img(8, 8);
  const ImageMeta biased{"x", Domain::Indoor, overlay_recipe(), {}};
  const ImageMeta plain{"x", Domain::Indoor, {}, {}};
  EXPECT_EQ(judge.score_single(standard_payload(), img, plain).score, 2.0);
  const auto first = judge.score_single(standard_payload(), img, biased);
  EXPECT_EQ(first.score, 3.0);
  EXPECT_FALSE(first.cached);
  const auto second = judge.score_single(standard_payload(), img, biased);
  EXPECT_EQ(second.score, 3.0);
  EXPECT_TRUE(second.cached);
  EXPECT_EQ(judge.backend_requests(), 2u);
  EXPECT_EQ(judge.cache_hits(), 1u);

  Judge warm(cfg, cache);
  EXPECT_TRUE(warm.score_single(standard_payload(), img, biased).cached);
  EXPECT_EQ(warm.backend_requests(), 0u);
}

TEST(SusceptibleMock, PeakedEffectAndClamp) {
  Susceptibility s{0.5, 1.2, 0.5};
  EXPECT_DOUBLE_EQ(s.effect(1.2), 0.5);
  EXPECT_DOUBLE_EQ(s.effect(1.45), 0.25);
  EXPECT_DOUBLE_EQ(s.effect(2.0), 0.0);

  SusceptibleMockSpec spec;
  spec.base_scores = {{"x", 4.5}};
  spec.susceptibility[BiasKind::InstructionOverlay] = {1.0, std::nullopt, 1.0};
  const ImageMeta m{"x", Domain::Animals, overlay_recipe(), {}};
  EXPECT_EQ(spec.score(m, {}), 5.0);
}

TEST(SusceptibleMock, DomainOverrideAndCap) {
  const auto spec = susceptible_spec_from_json(nlohmann::json::parse(R"({
    "base_scores":{"x":2},
    "susceptibility":{"instruction_overlay":1.0,"brightness":0.8},
    "domain_overrides":{"people":{"instruction_overlay":0.2}},
    "combo_cap":1.2})"));
  BiasRecipe r = overlay_recipe();
  r.steps.push_back({BiasKind::Brightness, BrightnessParams{1.2}});
  EXPECT_DOUBLE_EQ(spec.total_delta({"x", Domain::Animals, r, {}}), 1.2);
  EXPECT_DOUBLE_EQ(spec.total_delta({"x", Domain::People, r, {}}), 1.0);
}

TEST(SusceptibleMock, AnchorPeak) {
  const auto spec = susceptible_spec_from_json(nlohmann::json::parse(R"({
    "base_scores":{"x":2},
    "susceptibility":{"instruction_overlay":{"delta":1.0,"peak":"top_left","width":0.5}}})"));
  const BiasRecipe tl{{{BiasKind::InstructionOverlay, OverlayParams{"t", Anchor::TopLeft}}}};
  const BiasRecipe br{{{BiasKind::InstructionOverlay, OverlayParams{"t", Anchor::BottomRight}}}};
  EXPECT_DOUBLE_EQ(spec.total_delta({"x", Domain::Animals, tl, {}}), 1.0);
  EXPECT_DOUBLE_EQ(spec.total_delta({"x", Domain::Animals, br, {}}), 0.0);
}

TEST(SusceptibleMock, PairwiseRules) {
  const RasterImage img(8, 8);
  const auto payload = render_prompt(PromptLibrary::builtin().get(TemplateId::Pairwise), "x");
  const ImageMeta a{"x", Domain::Animals, overlay_recipe(), "A"};
  const ImageMeta b{"x", Domain::Animals, {}, "B"};
  Judge by_score(mock_config(BackendKind::MockSusceptible,
                             {{"base_scores", {{"x", 2}}}, {"susceptibility", {{"instruction_overlay", 1.0}}}}));
  EXPECT_EQ(by_score.compare_pair(payload, img, a, img, b).preference, Preference::First);
  EXPECT_EQ(by_score.compare_pair(payload, img, b, img, a).preference, Preference::Second);
  EXPECT_EQ(by_score.compare_pair(payload, img, b, img, b).preference, Preference::Tie);

  Judge first(mock_config(BackendKind::MockSusceptible, {{"pairwise_rule", "first"}}));
  EXPECT_EQ(first.compare_pair(payload, img, b, img, a).preference, Preference::First);
  EXPECT_THROW(Judge(mock_config(BackendKind::MockSusceptible, {{"pairwise_rule", "random"}})), Error);
}

TEST(Judge, CacheKeySeparatesPresentationOrder) {
  TempDir dir;
  auto cache = std::make_shared<VerdictCache>(dir.path());
  Judge judge(mock_config(BackendKind::MockSusceptible,
                          {{"base_scores", {{"x", 2}}}, {"susceptibility", {{"instruction_overlay", 1.0}}}}),
              cache);
  const RasterImage img(8, 8);
  const auto payload = render_prompt(PromptLibrary::builtin().get(TemplateId::Pairwise), "x");
  const ImageMeta a{"x", Domain::Animals, overlay_recipe(), "A"};
  const ImageMeta b{"x", Domain::Animals, {}, "B"};
  judge.compare_pair(payload, img, a, img, b);
  const auto swapped = judge.compare_pair(payload, img, b, img, a);
  EXPECT_FALSE(swapped.cached);
  EXPECT_EQ(swapped.preference, Preference::Second);
  EXPECT_TRUE(judge.compare_pair(payload, img, a, img, b).cached);
}
