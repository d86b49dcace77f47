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

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "text_render.hpp"
#include "visbias/bias.hpp"
#include "visbias/error.hpp"

namespace visbias {

std::string_view to_string(BiasKind k) noexcept {
  switch (k) {
    case BiasKind::Brightness: return "brightness";
    case BiasKind::Gamma: return "gamma";
    case BiasKind::AuthenticityOverlay: return "authenticity_overlay";
    case BiasKind::KeywordOverlay: return "keyword_overlay";
    case BiasKind::InstructionOverlay: return "instruction_overlay";
    case BiasKind::BeautyFilter: return "beauty_filter";
    case BiasKind::BlackPadding: return "black_padding";
    case BiasKind::BoundingBox: return "bounding_box";
  }
  return "unknown";
}

BiasKind parse_bias_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  for (BiasKind k : kAllBiasKinds) {
    if (s == to_string(k)) return k;
  }
  if (s == "padding") return BiasKind::BlackPadding;
  if (s == "bbox" || s == "bounding_boxes") return BiasKind::BoundingBox;
  throw Error(ErrorKind::Parameter, "unknown bias kind '" + std::string(name) + "'");
}

bool is_object_oriented(BiasKind k) noexcept {
  return k == BiasKind::KeywordOverlay || k == BiasKind::BoundingBox;
}

bool is_applicable(BiasKind k, Domain d) noexcept {
  if (d == Domain::Outdoor && is_object_oriented(k)) return false;
  if (k == BiasKind::BeautyFilter && d != Domain::People) return false;
  return true;
}

int canonical_rank(BiasKind k) noexcept {
  switch (k) {
    case BiasKind::BeautyFilter: return 0;
    case BiasKind::Brightness: return 1;
    case BiasKind::Gamma: return 2;
    case BiasKind::BoundingBox: return 3;
    case BiasKind::AuthenticityOverlay: return 4;
    case BiasKind::KeywordOverlay: return 5;
    case BiasKind::InstructionOverlay: return 6;
    case BiasKind::BlackPadding: return 7;
  }
  return 8;
}

std::string_view to_string(Anchor a) noexcept {
  switch (a) {
    case Anchor::BottomRight: return "bottom_right";
    case Anchor::BottomLeft: return "bottom_left";
    case Anchor::TopRight: return "top_right";
    case Anchor::TopLeft: return "top_left";
    case Anchor::Center: return "center";
  }
  return "unknown";
}

Anchor parse_anchor(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  for (Anchor a : kAllAnchors) {
    if (s == to_string(a)) return a;
  }
  if (s == "centre") return Anchor::Center;
  throw Error(ErrorKind::Parameter, "unknown overlay anchor '" + std::string(name) + "'");
}

namespace {

std::uint8_t clamp_round(double v) {
  // std::round rounds half away from zero.
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

RasterImage map_channels(const RasterImage& img, const std::array<std::uint8_t, 256>& lut) {
  RasterImage out = img;
  for (auto& c : out.bytes()) c = lut[c];
  return out;
}

struct TextLayout {
  detail::GlyphMask mask;
  PixelRect box;
};

TextLayout layout_text(int image_width, int image_height, std::string_view text, Anchor anchor,
                       double font_size, int margin) {
  if (!(font_size > 0.0) || !std::isfinite(font_size)) {
    throw Error(ErrorKind::Parameter, "font size must be positive");
  }
  if (margin < 0) throw Error(ErrorKind::Parameter, "overlay margin must be non-negative");
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorKind::Overlay, "overlay text is empty");
  }
  const int usable_w = image_width - 2 * margin;
  const int usable_h = image_height - 2 * margin;
  const int wrap_limit = std::min(static_cast<int>(std::floor(0.9 * image_width)), usable_w);
  if (wrap_limit <= 0 || usable_h <= 0) {
    throw Error(ErrorKind::Overlay, "image too small for overlay margins");
  }
  const auto lines = detail::wrap_text(text, font_size, wrap_limit);
  if (lines.empty()) {
    throw Error(ErrorKind::Overlay, "a word of \"" + std::string(text) + "\" is wider than " +
                                        std::to_string(wrap_limit) + " px at font size " +
                                        std::to_string(font_size));
  }
  TextLayout layout;
  layout.mask = detail::render_lines(lines, font_size);
  const int w = layout.mask.width;
  const int h = layout.mask.height;
  if (w > usable_w || h > usable_h) {
    throw Error(ErrorKind::Overlay, "text block " + std::to_string(w) + "x" + std::to_string(h) +
                                        " does not fit in " + std::to_string(image_width) + "x" +
                                        std::to_string(image_height) + " with margin " +
                                        std::to_string(margin));
  }
  int x = margin, y = margin;
  switch (anchor) {
    case Anchor::BottomRight:
      x = image_width - margin - w;
      y = image_height - margin - h;
      break;
    case Anchor::BottomLeft:
      y = image_height - margin - h;
      break;
    case Anchor::TopRight:
      x = image_width - margin - w;
      break;
    case Anchor::TopLeft:
      break;
    case Anchor::Center:
      x = (image_width - w) / 2;
      y = (image_height - h) / 2;
      break;
  }
  layout.box = {x, y, w, h};
  return layout;
}

void stamp(RasterImage& img, const detail::GlyphMask& mask, int x0, int y0) {
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const std::uint8_t cell = mask.at(x, y);
      if (cell == 0) continue;
      img.set(x0 + x, y0 + y, cell == 2 ? Rgb{255, 255, 255} : Rgb{0, 0, 0});
    }
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "visbias-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw Error(ErrorKind::Io, "cannot create temporary directory");
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

RasterImage adjust_brightness(const RasterImage& img, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorKind::Parameter, "brightness factor must be positive, got " +
                                          std::to_string(factor));
  }
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) lut[v] = clamp_round(v * factor);
  return map_channels(img, lut);
}

RasterImage gamma_correct(const RasterImage& img, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::Parameter, "gamma must be positive, got " + std::to_string(gamma));
  }
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) lut[v] = clamp_round(255.0 * std::pow(v / 255.0, 1.0 / gamma));
  return map_channels(img, lut);
}

PixelRect overlay_text_box(int image_width, int image_height, std::string_view text, Anchor anchor,
                           double font_size, int margin) {
  return layout_text(image_width, image_height, text, anchor, font_size, margin).box;
}

RasterImage overlay_text(const RasterImage& img, std::string_view text, Anchor anchor,
                         double font_size, int margin) {
  const TextLayout layout = layout_text(img.width(), img.height(), text, anchor, font_size, margin);
  RasterImage out = img;
  stamp(out, layout.mask, layout.box.x, layout.box.y);
  return out;
}

RasterImage add_padding(const RasterImage& img, int thickness, PaddingMode mode) {
  if (thickness < 0) {
    throw Error(ErrorKind::Parameter, "padding thickness must be non-negative");
  }
  if (thickness == 0) return img;
  if (mode == PaddingMode::Inward) {
    RasterImage out = img;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (x < thickness || y < thickness || x >= img.width() - thickness ||
            y >= img.height() - thickness) {
          out.set(x, y, {});
        }
      }
    }
    return out;
  }
  RasterImage out(img.width() + 2 * thickness, img.height() + 2 * thickness);
  const auto src = img.bytes();
  auto dst = out.bytes();
  const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * 3;
  for (int y = 0; y < img.height(); ++y) {
    const std::size_t s = static_cast<std::size_t>(y) * row_bytes;
    const std::size_t d = (static_cast<std::size_t>(y + thickness) * out.width() + thickness) * 3;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(s), row_bytes,
                dst.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return out;
}

std::optional<PixelRect> box_label_rect(const RasterImage& img, const BoxAnnotation& box,
                                        const BoxStyle& style) {
  if (!style.draw_labels || !box.label || box.label->empty()) return std::nullopt;
  const auto mask = detail::render_lines({*box.label}, style.label_font_size);
  if (mask.width > img.width() || mask.height > img.height()) {
    throw Error(ErrorKind::Overlay, "label \"" + *box.label + "\" larger than the image");
  }
  int x = std::min(box.x, img.width() - mask.width);
  int y = box.y - mask.height - 1;
  if (y < 0) y = std::min(box.y + style.stroke_width + 1, img.height() - mask.height);
  return PixelRect{x, y, mask.width, mask.height};
}

RasterImage draw_boxes(const RasterImage& img, std::span<const BoxAnnotation> boxes,
                       const BoxStyle& style) {
  if (style.stroke_width < 1) {
    throw Error(ErrorKind::Parameter, "stroke width must be at least 1");
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const bool ok = b.x >= 0 && b.y >= 0 && b.w > 0 && b.h > 0 && b.x + b.w <= img.width() &&
                    b.y + b.h <= img.height();
    if (!ok) {
      std::ostringstream msg;
      msg << "box " << i << " (" << b.x << "," << b.y << "," << b.w << "," << b.h
          << ") is outside the " << img.width() << "x" << img.height() << " image";
      throw Error(ErrorKind::Validation, msg.str());
    }
  }
  RasterImage out = img;
  const int s = style.stroke_width;
  for (const auto& b : boxes) {
    for (int y = b.y; y < b.y + b.h; ++y) {
      for (int x = b.x; x < b.x + b.w; ++x) {
        const bool on_frame = x < b.x + s || x >= b.x + b.w - s || y < b.y + s || y >= b.y + b.h - s;
        if (on_frame) out.set(x, y, style.color);
      }
    }
  }
  for (const auto& b : boxes) {
    if (auto rect = box_label_rect(img, b, style)) {
      const auto mask = detail::render_lines({*b.label}, style.label_font_size);
      stamp(out, mask, rect->x, rect->y);
    }
  }
  return out;
}

BeautyFilterOutput apply_beauty_filter(const std::filesystem::path& input,
                                       std::string_view command_template) {
  const std::string tmpl(command_template);
  if (tmpl.find("{in}") == std::string::npos || tmpl.find("{out}") == std::string::npos) {
    throw Error(ErrorKind::Parameter, "beauty filter command must contain {in} and {out}");
  }
  if (!std::filesystem::exists(input)) {
    throw Error(ErrorKind::Io, "beauty filter input '" + input.string() + "' does not exist");
  }
  TempDir work;
  const auto out_path = work.path() / "out.png";
  const auto err_path = work.path() / "stderr.txt";
  std::string command = tmpl;
  replace_all(command, "{in}", shell_quote(std::filesystem::absolute(input).string()));
  replace_all(command, "{out}", shell_quote(out_path.string()));

  const std::string full = command + " 2> " + shell_quote(err_path.string()) + " > /dev/null";
  const int status = std::system(full.c_str());

  auto captured_stderr = [&] {
    std::ifstream in(err_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    throw Error(ErrorKind::ExternalTool, "command `" + command + "` exited with status " +
                                             std::to_string(code) + ": " + captured_stderr());
  }
  if (!std::filesystem::exists(out_path)) {
    throw Error(ErrorKind::ExternalTool, "command `" + command + "` produced no output file: " +
                                             captured_stderr());
  }
  try {
    return {read_image(out_path), command};
  } catch (const Error& e) {
    throw Error(ErrorKind::ExternalTool, "output of `" + command + "` is not an image: " + e.what());
  }
}

BeautyFilterOutput apply_beauty_filter(const RasterImage& img, std::string_view command_template) {
  TempDir work;
  const auto in_path = work.path() / "in.png";
  write_png(img, in_path);
  return apply_beauty_filter(in_path, command_template);
}

}  // namespace visbias
