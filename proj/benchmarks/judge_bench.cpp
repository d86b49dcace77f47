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

#include <benchmark/benchmark.h>

#include "visbias/cache.hpp"
#include "visbias/judge.hpp"
#include "visbias/verdict.hpp"

namespace {

void BM_ParseScoreJson(benchmark::State& state) {
  const std::string reply = "The image shows two foxes.\n{\"score\": 4}";
  for (auto _ : state) benchmark::DoNotOptimize(visbias::parse_score(reply, {}));
}
BENCHMARK(BM_ParseScoreJson);

void BM_ParseScoreText(benchmark::State& state) {
  const std::string reply = "Most elements are present, so I'd give it a 3 out of 5.";
  for (auto _ : state) benchmark::DoNotOptimize(visbias::parse_score(reply, {}));
}
BENCHMARK(BM_ParseScoreText);

void BM_CacheKey(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const visbias::RasterImage img(side, side, visbias::Rgb{10, 20, 30});
  const auto payload = visbias::render_prompt(visbias::PromptLibrary::builtin().get(visbias::TemplateId::Standard),
                                              "A red fox in a snowy forest");
  const visbias::RasterImage* images[] = {&img};
  for (auto _ : state) {
    benchmark::DoNotOptimize(visbias::cache_key("mock", payload, images, "single", {}));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.bytes().size()));
}
BENCHMARK(BM_CacheKey)->Arg(256)->Arg(512);

void BM_MockScore(benchmark::State& state) {
  visbias::JudgeBackendConfig cfg;
  cfg.mock = {{"susceptibility", {{"instruction_overlay", 1.0}}}};
  visbias::Judge judge(cfg);
  const auto payload = visbias::render_prompt(visbias::PromptLibrary::builtin().get(visbias::TemplateId::Standard),
                                              "A red fox in a snowy forest");
  const visbias::RasterImage img(64, 64);
  visbias::ImageMeta meta{"animals-0001", visbias::Domain::Animals, {}, {}};
  for (auto _ : state) benchmark::DoNotOptimize(judge.score_single(payload, img, meta));
}
BENCHMARK(BM_MockScore);

}  // namespace
