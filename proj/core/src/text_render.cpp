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

#include "text_render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

namespace visbias::detail {
namespace {

constexpr int kFontFace = cv::FONT_HERSHEY_SIMPLEX;

struct FontMetrics {
  double scale;
  int thickness;
};

FontMetrics metrics_for(double font_size) {
  static const int cap_height_at_unit = [] {
    int baseline = 0;
    return cv::getTextSize("H", kFontFace, 1.0, 1, &baseline).height;
  }();
  FontMetrics m;
  m.scale = font_size / static_cast<double>(cap_height_at_unit);
  m.thickness = std::max(1, static_cast<int>(std::lround(font_size / 12.0)));
  return m;
}

// Hershey fonts cover printable ASCII only.
std::string printable(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back((c >= 32 && c < 127) ? static_cast<char>(c) : '?');
  return out;
}

}  // namespace

int line_width(std::string_view line, double font_size) {
  const FontMetrics m = metrics_for(font_size);
  int baseline = 0;
  const cv::Size sz = cv::getTextSize(printable(line), kFontFace, m.scale, m.thickness, &baseline);
  // stroke overhang on both sides plus the outline ring
  return sz.width + m.thickness + 2;
}

std::vector<std::string> wrap_text(std::string_view text, double font_size, int max_width) {
  std::istringstream words{std::string(text)};
  std::vector<std::string> lines;
  std::string current;
  std::string word;
  while (words >> word) {
    if (line_width(word, font_size) > max_width) return {};
    if (current.empty()) {
      current = word;
      continue;
    }
    std::string candidate = current + " " + word;
    if (line_width(candidate, font_size) <= max_width) {
      current = std::move(candidate);
    } else {
      lines.push_back(std::move(current));
      current = word;
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

GlyphMask render_lines(const std::vector<std::string>& lines, double font_size) {
  const FontMetrics m = metrics_for(font_size);
  int baseline = 0;
  const cv::Size cap = cv::getTextSize("H", kFontFace, m.scale, m.thickness, &baseline);
  const int line_advance = cap.height + baseline + std::max(2, cap.height / 3);
  const int pad = m.thickness + 4;

  int widest = 1;
  for (const auto& line : lines) {
    widest = std::max(widest, cv::getTextSize(printable(line), kFontFace, m.scale, m.thickness,
                                              &baseline).width);
  }
  const int canvas_w = widest + 2 * pad;
  const int canvas_h = static_cast<int>(lines.size()) * line_advance + cap.height + 2 * pad;

  cv::Mat ink = cv::Mat::zeros(canvas_h, canvas_w, CV_8UC1);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const cv::Point org(pad, pad + cap.height + static_cast<int>(i) * line_advance);
    cv::putText(ink, printable(lines[i]), org, kFontFace, m.scale, cv::Scalar(255), m.thickness,
                cv::LINE_8, false);
  }

  cv::Mat ring;
  cv::dilate(ink, ring, cv::getStructuringElement(cv::MORPH_RECT, cv::Size(3, 3)));

  int x0 = canvas_w, y0 = canvas_h, x1 = -1, y1 = -1;
  for (int y = 0; y < canvas_h; ++y) {
    const std::uint8_t* row = ring.ptr<std::uint8_t>(y);
    for (int x = 0; x < canvas_w; ++x) {
      if (row[x] != 0) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
  }

  GlyphMask mask;
  if (x1 < 0) return mask;
  mask.width = x1 - x0 + 1;
  mask.height = y1 - y0 + 1;
  mask.cells.assign(static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height), 0);
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* ink_row = ink.ptr<std::uint8_t>(y + y0);
    const std::uint8_t* ring_row = ring.ptr<std::uint8_t>(y + y0);
    for (int x = 0; x < mask.width; ++x) {
      std::uint8_t v = 0;
      if (ink_row[x + x0] != 0) {
        v = 2;
      } else if (ring_row[x + x0] != 0) {
        v = 1;
      }
      mask.cells[static_cast<std::size_t>(y) * static_cast<std::size_t>(mask.width) +
                 static_cast<std::size_t>(x)] = v;
    }
  }
  return mask;
}

}  // namespace visbias::detail
