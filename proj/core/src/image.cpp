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

#include "visbias/image.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "visbias/error.hpp"

namespace visbias {

RasterImage::RasterImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::Validation, "image dimensions must be positive, got " +
                                           std::to_string(width) + "x" + std::to_string(height));
  }
  data_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::Validation, "image dimensions must be positive, got " +
                                           std::to_string(width) + "x" + std::to_string(height));
  }
  if (data_.size() != pixel_count() * 3) {
    throw Error(ErrorKind::Validation, "pixel buffer holds " + std::to_string(data_.size()) +
                                           " bytes, expected " + std::to_string(pixel_count() * 3));
  }
}

Rgb RasterImage::at(int x, int y) const {
  if (!contains(x, y)) {
    throw Error(ErrorKind::Parameter, "pixel (" + std::to_string(x) + "," + std::to_string(y) +
                                          ") outside image");
  }
  const std::size_t o = offset(x, y);
  return {data_[o], data_[o + 1], data_[o + 2]};
}

void RasterImage::set(int x, int y, Rgb value) {
  if (!contains(x, y)) {
    throw Error(ErrorKind::Parameter, "pixel (" + std::to_string(x) + "," + std::to_string(y) +
                                          ") outside image");
  }
  const std::size_t o = offset(x, y);
  data_[o] = value.r;
  data_[o + 1] = value.g;
  data_[o + 2] = value.b;
}

namespace {

std::uint8_t over_white(std::uint32_t c, std::uint32_t a) {
  return static_cast<std::uint8_t>((c * a + 255u * (255u - a) + 127u) / 255u);
}

RasterImage from_mat(const cv::Mat& decoded) {
  cv::Mat m = decoded;
  if (m.depth() == CV_16U) {
    m.convertTo(m, CV_8U, 1.0 / 257.0);
  } else if (m.depth() != CV_8U) {
    throw Error(ErrorKind::Io, "unsupported sample depth");
  }
  const int channels = m.channels();
  RasterImage out(m.cols, m.rows);
  auto dst = out.bytes();
  std::size_t o = 0;
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      switch (channels) {
        case 1:
          dst[o] = dst[o + 1] = dst[o + 2] = px[0];
          break;
        case 2:  // gray + alpha
          dst[o] = dst[o + 1] = dst[o + 2] = over_white(px[0], px[1]);
          break;
        case 3:  // BGR
          dst[o] = px[2];
          dst[o + 1] = px[1];
          dst[o + 2] = px[0];
          break;
        case 4:  // BGRA
          dst[o] = over_white(px[2], px[3]);
          dst[o + 1] = over_white(px[1], px[3]);
          dst[o + 2] = over_white(px[0], px[3]);
          break;
        default:
          throw Error(ErrorKind::Io, "unsupported channel count " + std::to_string(channels));
      }
      o += 3;
    }
  }
  return out;
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> encoded) {
  if (encoded.empty()) throw Error(ErrorKind::Io, "empty image buffer");
  const cv::Mat buf(1, static_cast<int>(encoded.size()), CV_8U,
                    const_cast<std::uint8_t*>(encoded.data()));
  cv::Mat m = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw Error(ErrorKind::Io, "cannot decode image data");
  return from_mat(m);
}

RasterImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open image '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(ErrorKind::Io, "'" + path.string() + "': " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  auto src = image.bytes();
  std::size_t o = 0;
  for (int y = 0; y < image.height(); ++y) {
    std::uint8_t* row = bgr.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width(); ++x, o += 3) {
      row[x * 3] = src[o + 2];
      row[x * 3 + 1] = src[o + 1];
      row[x * 3 + 2] = src[o];
    }
  }
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", bgr, out, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
    throw Error(ErrorKind::Io, "PNG encoding failed");
  }
  return out;
}

void write_png(const RasterImage& image, const std::filesystem::path& path) {
  const auto png = encode_png(image);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to '" + path.string() + "'");
}

}  // namespace visbias
