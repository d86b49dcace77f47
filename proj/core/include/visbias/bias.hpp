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

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visbias/domain.hpp"
#include "visbias/image.hpp"

namespace visbias {

enum class BiasKind {
  Brightness,
  Gamma,
  AuthenticityOverlay,
  KeywordOverlay,
  InstructionOverlay,
  BeautyFilter,
  BlackPadding,
  BoundingBox,
};

inline constexpr std::array<BiasKind, 8> kAllBiasKinds = {
    BiasKind::Brightness,         BiasKind::Gamma,        BiasKind::AuthenticityOverlay,
    BiasKind::KeywordOverlay,     BiasKind::InstructionOverlay, BiasKind::BeautyFilter,
    BiasKind::BlackPadding,       BiasKind::BoundingBox};

// Snake-case wire name, e.g. "instruction_overlay".
std::string_view to_string(BiasKind k) noexcept;
BiasKind parse_bias_kind(std::string_view name);

// Keyword overlay and bounding boxes point at objects; Outdoor scenes have none.
bool is_object_oriented(BiasKind k) noexcept;

// Object-oriented kinds are excluded from Outdoor; the beauty filter only
// targets faces and therefore only People.
bool is_applicable(BiasKind k, Domain d) noexcept;

// Position in the canonical combination order: beauty filter, photometric
// (brightness, gamma), boxes, overlays, padding last.
int canonical_rank(BiasKind k) noexcept;

enum class Anchor { BottomRight, BottomLeft, TopRight, TopLeft, Center };

inline constexpr std::array<Anchor, 5> kAllAnchors = {
    Anchor::BottomRight, Anchor::BottomLeft, Anchor::TopRight, Anchor::TopLeft, Anchor::Center};

std::string_view to_string(Anchor a) noexcept;
Anchor parse_anchor(std::string_view name);

inline constexpr int kDefaultOverlayMargin = 10;

// Pixel rectangle, half-open: [x, x + w) x [y, y + h).
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(int px, int py) const noexcept {
    return px >= x && py >= y && px < x + w && py < y + h;
  }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct BoxAnnotation {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  std::optional<std::string> label;

  friend bool operator==(const BoxAnnotation&, const BoxAnnotation&) = default;
};

struct BoxStyle {
  int stroke_width = 3;
  Rgb color{255, 0, 0};
  bool draw_labels = false;
  double label_font_size = 16.0;

  friend bool operator==(const BoxStyle&, const BoxStyle&) = default;
};

enum class PaddingMode { Outward, Inward };

// Every channel becomes clamp(round(v * factor)), rounding half away from zero.
RasterImage adjust_brightness(const RasterImage& img, double factor);

// v -> clamp(round(255 * (v / 255)^(1 / gamma))). gamma > 1 brightens midtones.
RasterImage gamma_correct(const RasterImage& img, double gamma);

// Where overlay_text would draw `text`, without drawing it. Throws
// Error(Overlay) when the wrapped text does not fit inside the margins.
PixelRect overlay_text_box(int image_width, int image_height, std::string_view text,
                           Anchor anchor, double font_size, int margin = kDefaultOverlayMargin);

// White glyphs with a one-pixel black outline, word-wrapped to 90% of the
// image width. Only pixels inside overlay_text_box() can change.
RasterImage overlay_text(const RasterImage& img, std::string_view text, Anchor anchor,
                         double font_size, int margin = kDefaultOverlayMargin);

// Outward grows the canvas by `thickness` on every side; inward blacks out a
// border of that width and keeps the dimensions.
RasterImage add_padding(const RasterImage& img, int thickness,
                        PaddingMode mode = PaddingMode::Outward);

// Frames of `stroke_width` pixels drawn inward from each box edge. Throws
// Error(Validation) naming the first box that falls outside the image.
RasterImage draw_boxes(const RasterImage& img, std::span<const BoxAnnotation> boxes,
                       const BoxStyle& style = {});

// Region a label for `box` occupies when style.draw_labels is set (empty
// optional if the box has no label).
std::optional<PixelRect> box_label_rect(const RasterImage& img, const BoxAnnotation& box,
                                        const BoxStyle& style);

struct BeautyFilterOutput {
  RasterImage image;
  std::string command_line;
};

// Runs an external enhancer. The template must contain "{in}" and "{out}";
// both are replaced with shell-quoted paths. Non-zero exit, a missing output
// file or an undecodable output raise Error(ExternalTool) carrying stderr.
BeautyFilterOutput apply_beauty_filter(const std::filesystem::path& input,
                                       std::string_view command_template);
BeautyFilterOutput apply_beauty_filter(const RasterImage& img, std::string_view command_template);

}  // namespace visbias
