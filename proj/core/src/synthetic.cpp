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

#include "visbias/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "visbias/error.hpp"
#include "visbias/seeding.hpp"

namespace visbias {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

int count_from_word(const std::string* word) {
  if (word == nullptr) return 1;
  static const std::array<const char*, 10> words = {"one", "two",   "three", "four", "five",
                                                    "six", "seven", "eight", "nine", "ten"};
  const std::string w = lower(*word);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (w == words[i] || w == std::to_string(i + 1)) return static_cast<int>(i + 1);
  }
  return 1;
}

Rgb hashed_color(const std::string& key, std::uint8_t lo, std::uint8_t hi) {
  const std::uint64_t h = fnv1a64(key);
  const int span = hi - lo + 1;
  return {static_cast<std::uint8_t>(lo + static_cast<int>(h % span)),
          static_cast<std::uint8_t>(lo + static_cast<int>((h >> 16) % span)),
          static_cast<std::uint8_t>(lo + static_cast<int>((h >> 32) % span))};
}

Rgb named_color(const std::string* name, const std::string& fallback_key) {
  if (name != nullptr) {
    const std::string n = lower(*name);
    if (n == "red") return {220, 40, 40};
    if (n == "blue") return {40, 80, 220};
    if (n == "green") return {40, 170, 60};
    if (n == "yellow") return {235, 210, 40};
    if (n == "black") return {20, 20, 20};
    if (n == "white") return {245, 245, 245};
    if (n == "purple") return {140, 50, 170};
    if (n == "orange") return {240, 140, 30};
    if (n == "gold") return {212, 175, 55};
  }
  return hashed_color(fallback_key, 30, 230);
}

const std::string* first_of(const ConceptAssignment& c, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (const std::string* v = c.find(n)) return v;
  }
  return nullptr;
}

}  // namespace

SyntheticImage generate_placeholder_image(const ConceptAssignment& concepts, std::uint64_t seed,
                                          const SyntheticImageOptions& options) {
  if (options.width < 64 || options.height < 64) {
    throw Error(ErrorKind::Parameter, "placeholder images must be at least 64x64");
  }
  const std::string* scene = first_of(concepts, {"background", "room", "scene"});
  const std::string bg_key = scene ? *scene : std::string(to_string(concepts.domain));
  Rgb background = hashed_color(bg_key, 60, 200);
  if (const std::string* weather = concepts.find("weather")) {
    const Rgb tint = hashed_color(*weather, 0, 40);
    background = {static_cast<std::uint8_t>(std::min(255, background.r + tint.r)),
                  static_cast<std::uint8_t>(std::min(255, background.g + tint.g)),
                  static_cast<std::uint8_t>(std::min(255, background.b + tint.b))};
  }

  SyntheticImage out{RasterImage(options.width, options.height, background), {}};
  Rng rng(seed);

  // horizon band so scenes without objects still have structure
  const Rgb ground = hashed_color(bg_key + "/ground", 40, 160);
  const int horizon = options.height * 2 / 3 + static_cast<int>(rng.below(options.height / 8));
  for (int y = horizon; y < options.height; ++y) {
    for (int x = 0; x < options.width; ++x) out.image.set(x, y, ground);
  }

  if (concepts.domain == Domain::Outdoor) return out;

  const std::string* object = concepts.find("object");
  const int count = std::min(count_from_word(concepts.find("number")), 6);
  const Rgb color = named_color(concepts.find("color"), object ? *object : "object");
  const bool round = object != nullptr && (fnv1a64(*object) & 1U) != 0;

  const int cell_w = options.width / count;
  for (int i = 0; i < count; ++i) {
    const int max_w = std::max(8, cell_w - 8);
    const int w = std::max(8, max_w / 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_w / 2) + 1)));
    const int h = std::max(8, options.height / 5 + static_cast<int>(rng.below(options.height / 5)));
    const int x = i * cell_w + (cell_w - w) / 2;
    const int y = std::clamp(horizon - h + static_cast<int>(rng.below(16)), 4, options.height - h - 4);
    const int cx2 = w * w, cy2 = h * h;
    for (int py = y; py < y + h; ++py) {
      for (int px = x; px < x + w; ++px) {
        if (round) {
          const int dx = 2 * (px - x) - w + 1;
          const int dy = 2 * (py - y) - h + 1;
          if (static_cast<long>(dx) * dx * cy2 + static_cast<long>(dy) * dy * cx2 > static_cast<long>(cx2) * cy2) {
            continue;
          }
        }
        out.image.set(px, py, color);
      }
    }
    BoxAnnotation box{x, y, w, h, std::nullopt};
    if (object) box.label = *object;
    out.boxes.push_back(std::move(box));
  }
  return out;
}

}  // namespace visbias
