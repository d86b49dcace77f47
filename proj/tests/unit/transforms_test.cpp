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
#include "visbias/bias.hpp"
#include "visbias/error.hpp"

using namespace visbias;
using visbias::testing::noise_image;

TEST(Brightness, IdentityAtFactorOne) {
  const auto img = noise_image(17, 9, 1);
  EXPECT_EQ(adjust_brightness(img, 1.0), img);
}

TEST(Brightness, RoundsHalfAwayFromZeroAndClamps) {
  RasterImage img(3, 1);
  img.set(0, 0, {1, 3, 5});
  img.set(1, 0, {200, 250, 255});
  img.set(2, 0, {0, 10, 128});
  const auto out = adjust_brightness(img, 1.5);
  EXPECT_EQ(out.at(0, 0), (Rgb{2, 5, 8}));  // 1.5 -> 2, 4.5 -> 5, 7.5 -> 8
  EXPECT_EQ(out.at(1, 0), (Rgb{255, 255, 255}));
  EXPECT_EQ(out.at(2, 0), (Rgb{0, 15, 192}));
}

TEST(Brightness, RejectsNonPositiveFactor) {
  const RasterImage img(2, 2);
  EXPECT_THROW(adjust_brightness(img, 0.0), Error);
  EXPECT_THROW(adjust_brightness(img, -1.2), Error);
}

TEST(Gamma, KnownValues) {
  RasterImage img(1, 1, Rgb{128, 0, 255});
  EXPECT_EQ(gamma_correct(img, 2.0).at(0, 0), (Rgb{181, 0, 255}));
  EXPECT_EQ(gamma_correct(img, 1.0), img);
  EXPECT_THROW(gamma_correct(img, 0.0), Error);
}

TEST(Padding, OutwardGeometry) {
  const auto img = noise_image(10, 6, 2);
  const auto out = add_padding(img, 4);
  ASSERT_EQ(out.width(), 18);
  ASSERT_EQ(out.height(), 14);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const bool inner = x >= 4 && y >= 4 && x < 14 && y < 10;
      if (inner) {
        EXPECT_EQ(out.at(x, y), img.at(x - 4, y - 4));
      } else {
        EXPECT_EQ(out.at(x, y), (Rgb{0, 0, 0}));
      }
    }
  }
}

TEST(Padding, InwardKeepsSize) {
  const auto img = noise_image(10, 8, 3);
  const auto out = add_padding(img, 2, PaddingMode::Inward);
  ASSERT_EQ(out.width(), 10);
  ASSERT_EQ(out.height(), 8);
  EXPECT_EQ(out.at(0, 0), (Rgb{0, 0, 0}));
  EXPECT_EQ(out.at(9, 7), (Rgb{0, 0, 0}));
  EXPECT_EQ(out.at(2, 2), img.at(2, 2));
  EXPECT_EQ(add_padding(img, 0), img);
  EXPECT_THROW(add_padding(img, -1), Error);
}

TEST(Overlay, ChangesOnlyTheTextBox) {
  const auto img = noise_image(200, 120, 4);
  for (Anchor a : kAllAnchors) {
    const auto box = overlay_text_box(img.width(), img.height(), "Reference Image", a, 16.0);
    const auto out = overlay_text(img, "Reference Image", a, 16.0);
    bool changed = false;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (!box.contains(x, y)) {
          ASSERT_EQ(out.at(x, y), img.at(x, y)) << to_string(a) << " at " << x << "," << y;
        } else if (out.at(x, y) != img.at(x, y)) {
          changed = true;
        }
      }
    }
    EXPECT_TRUE(changed) << to_string(a);
  }
}

TEST(Overlay, AnchorsRespectMargin) {
  const auto br = overlay_text_box(300, 200, "Tiger", Anchor::BottomRight, 20.0);
  EXPECT_EQ(br.x + br.w, 290);
  EXPECT_EQ(br.y + br.h, 190);
  const auto tl = overlay_text_box(300, 200, "Tiger", Anchor::TopLeft, 20.0);
  EXPECT_EQ(tl.x, 10);
  EXPECT_EQ(tl.y, 10);
}

TEST(Overlay, WrapsLongTextWithinNinetyPercent) {
  const std::string text = "Generate an image of three flamingos drinking from a watering hole in a meadow.";
  const auto box = overlay_text_box(512, 512, text, Anchor::BottomRight, 20.0);
  EXPECT_LE(box.w, 512 * 9 / 10 + 2);
  EXPECT_GT(box.h, 30);  // more than one line
}

TEST(Overlay, ThrowsWhenTextCannotFit) {
  EXPECT_THROW(overlay_text_box(40, 40, "Incomprehensibilities", Anchor::Center, 30.0), Error);
}

TEST(Boxes, DrawsFramesOnly) {
  const auto img = noise_image(50, 40, 5);
  const std::vector<BoxAnnotation> boxes{{5, 6, 20, 15, std::nullopt}};
  BoxStyle style;
  style.stroke_width = 2;
  const auto out = draw_boxes(img, boxes, style);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const bool in_box = x >= 5 && y >= 6 && x < 25 && y < 21;
      const bool interior = x >= 7 && y >= 8 && x < 23 && y < 19;
      if (in_box && !interior) {
        EXPECT_EQ(out.at(x, y), style.color);
      } else {
        EXPECT_EQ(out.at(x, y), img.at(x, y));
      }
    }
  }
}

TEST(Boxes, RejectsOutOfBoundsBox) {
  const RasterImage img(20, 20);
  const std::vector<BoxAnnotation> boxes{{15, 15, 10, 10, std::nullopt}};
  EXPECT_THROW(draw_boxes(img, boxes), Error);
}

TEST(Image, PngRoundTrip) {
  const auto img = noise_image(31, 17, 6);
  EXPECT_EQ(decode_image(encode_png(img)), img);
}

TEST(Image, ConstructorRejectsBadBuffers) {
  EXPECT_THROW(RasterImage(0, 5), Error);
  EXPECT_THROW(RasterImage(2, 2, std::vector<std::uint8_t>(5)), Error);
}
