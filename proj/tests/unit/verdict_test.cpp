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
#include "visbias/verdict.hpp"

using namespace visbias;
using visbias::testing::TempDir;

TEST(ParseScore, Examples) {
  EXPECT_EQ(parse_score(R"({"score": 4})", {}), 4.0);
  EXPECT_EQ(parse_score("I'd give it a 3 out of 5.", {}), 3.0);
  EXPECT_THROW(parse_score("excellent image", {}), ParseError);
}

TEST(ParseScore, JsonWinsAndLastObjectCounts) {
  EXPECT_EQ(parse_score("Reasoning: 5 objects.\n{\"score\": 2}", {}), 2.0);
  EXPECT_EQ(parse_score(R"({"score": 1} then revised {"score": "4"})", {}), 4.0);
  EXPECT_EQ(parse_score(R"({"score": 3.5})", {}), 3.5);
  EXPECT_THROW(parse_score(R"({"score": 9})", {}), ParseError);
}

TEST(ParseScore, TextFallbackSkipsDenominatorsAndDecimals) {
  EXPECT_EQ(parse_score("Score: 4/5", {}), 4.0);
  EXPECT_EQ(parse_score("4 / 5", {}), 4.0);
  EXPECT_EQ(parse_score("roughly 2.5, final answer 2", {}), 2.0);
  EXPECT_EQ(parse_score("Rating: 7 overall", {1, 10}), 7.0);
  EXPECT_THROW(parse_score("Rating: 7 overall", {}), ParseError);
  EXPECT_THROW(parse_score("12 out of 40", {}), ParseError);
}

TEST(ParseScore, KeepsRawTextOnError) {
  try {
    parse_score("no digits here", {});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.raw_text(), "no digits here");
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

TEST(ParsePreference, JsonAndText) {
  EXPECT_EQ(parse_preference(R"({"preference": "1"})"), Preference::First);
  EXPECT_EQ(parse_preference(R"({"preference": 2})"), Preference::Second);
  EXPECT_EQ(parse_preference(R"({"preference": "tie"})"), Preference::Tie);
  EXPECT_EQ(parse_preference("Image 1 is sharper but Image 2 follows the prompt."), Preference::Second);
  EXPECT_THROW(parse_preference("both are nice"), ParseError);
}

TEST(Verdict, JsonRoundTripDropsCachedFlag) {
  auto v = JudgeVerdict::absolute(3.0, "{\"score\":3}");
  v.cached = true;
  const auto j = to_json(v);
  EXPECT_FALSE(j.contains("cached"));
  const auto back = verdict_from_json(j);
  EXPECT_EQ(back.score, 3.0);
  EXPECT_EQ(back.raw_text, v.raw_text);
  EXPECT_FALSE(back.cached);
}

TEST(CacheKey, SensitiveToEveryField) {
  const auto& tmpl = PromptLibrary::builtin().get(TemplateId::Standard);
  const auto p1 = render_prompt(tmpl, "two owls");
  const auto p2 = render_prompt(tmpl, "three owls");
  const RasterImage a(4, 4, Rgb{1, 2, 3});
  RasterImage b = a;
  b.set(3, 3, {1, 2, 4});
  const RasterImage c(8, 2, Rgb{1, 2, 3});
  const RasterImage* ia[] = {&a};
  const RasterImage* ib[] = {&b};
  const RasterImage* ic[] = {&c};
  const std::string base = cache_key("fp", p1, ia, "single");
  EXPECT_EQ(base, cache_key("fp", p1, ia, "single"));
  EXPECT_EQ(base.size(), 64u);
  EXPECT_NE(base, cache_key("fp2", p1, ia, "single"));
  EXPECT_NE(base, cache_key("fp", p2, ia, "single"));
  EXPECT_NE(base, cache_key("fp", p1, ib, "single"));
  EXPECT_NE(base, cache_key("fp", p1, ic, "single"));
  EXPECT_NE(base, cache_key("fp", p1, ia, "pair:A>B"));
  const std::string extra[] = {"meta"};
  EXPECT_NE(base, cache_key("fp", p1, ia, "single", extra));
}

TEST(Cache, PutGetAcrossInstances) {
  TempDir dir;
  {
    VerdictCache cache(dir.path());
    EXPECT_FALSE(cache.get("abc").has_value());
    cache.put("abc", JudgeVerdict::pairwise(Preference::Second, "{\"preference\":\"2\"}"));
  }
  VerdictCache again(dir.path());
  const auto v = again.get("abc");
  ASSERT_TRUE(v.has_value());
  EXPECT_TRUE(v->cached);
  EXPECT_EQ(v->kind, JudgeVerdict::Kind::Preference);
  EXPECT_EQ(v->preference, Preference::Second);
}
