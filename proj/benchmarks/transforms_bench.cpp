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

#include "visbias/bias.hpp"
#include "visbias/metrics.hpp"
#include "visbias/seeding.hpp"

namespace {

visbias::RasterImage noise_image(int side) {
  visbias::Rng rng(side);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(side) * side * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.below(256));
  return visbias::RasterImage(side, side, std::move(px));
}

void BM_Brightness(benchmark::State& state) {
  const auto img = noise_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(visbias::adjust_brightness(img, 1.2));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.bytes().size()));
}
BENCHMARK(BM_Brightness)->Arg(256)->Arg(512)->Arg(1024);

void BM_Gamma(benchmark::State& state) {
  const auto img = noise_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(visbias::gamma_correct(img, 1.5));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.bytes().size()));
}
BENCHMARK(BM_Gamma)->Arg(256)->Arg(512)->Arg(1024);

void BM_Padding(benchmark::State& state) {
  const auto img = noise_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(visbias::add_padding(img, 20));
}
BENCHMARK(BM_Padding)->Arg(512)->Arg(1024);

void BM_InstructionOverlay(benchmark::State& state) {
  const auto img = noise_image(512);
  const std::string text = "Three flamingos drinking from a watering hole in a tropical rainforest";
  for (auto _ : state) {
    benchmark::DoNotOptimize(visbias::overlay_text(img, text, visbias::Anchor::BottomRight, 20.0));
  }
}
BENCHMARK(BM_InstructionOverlay);

void BM_Boxes(benchmark::State& state) {
  const auto img = noise_image(512);
  std::vector<visbias::BoxAnnotation> boxes{{40, 40, 120, 90, "fox"}, {200, 220, 180, 160, "owl"}};
  visbias::BoxStyle style;
  style.draw_labels = true;
  for (auto _ : state) benchmark::DoNotOptimize(visbias::draw_boxes(img, boxes, style));
}
BENCHMARK(BM_Boxes);

void BM_Spearman(benchmark::State& state) {
  visbias::Rng rng(7);
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(rng.below(5) + 1);
    y[i] = static_cast<double>(rng.below(5) + 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(visbias::spearman(x, y));
}
BENCHMARK(BM_Spearman)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
