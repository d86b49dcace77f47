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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace visbias::detail {

// Tight-cropped rendering of one or more text lines. Each cell is 0 (untouched),
// 1 (outline, drawn black) or 2 (glyph, drawn white).
struct GlyphMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  std::uint8_t at(int x, int y) const {
    return cells[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(x)];
  }
};

// Greedy word wrap against `max_width` pixels. Returns an empty vector when a
// single word is wider than the limit.
std::vector<std::string> wrap_text(std::string_view text, double font_size, int max_width);

int line_width(std::string_view line, double font_size);

GlyphMask render_lines(const std::vector<std::string>& lines, double font_size);

}  // namespace visbias::detail
