// Copyright 2026 The ugcrank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ugcrank/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace ugcrank {
namespace {

std::uint8_t to_u8(float v) noexcept {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

cv::Mat to_bgr8(const RgbImage& img) {
  cv::Mat mat(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      const float* p = img.pixel(x, y);
      row[3 * x + 0] = to_u8(p[2]);
      row[3 * x + 1] = to_u8(p[1]);
      row[3 * x + 2] = to_u8(p[0]);
    }
  }
  return mat;
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("image not found: " + path.string());
  }
  cv::Mat mat;
  try {
    mat = cv::imread(path.string(), cv::IMREAD_COLOR | cv::IMREAD_ANYDEPTH);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode image " + path.string() + ": " + e.what());
  }
  if (mat.empty() || mat.channels() != 3) {
    throw IoError("cannot decode image " + path.string());
  }
  RgbImage img(mat.cols, mat.rows);
  auto fill = [&](auto sample_type, float denom) {
    using T = decltype(sample_type);
    for (int y = 0; y < mat.rows; ++y) {
      const T* row = mat.ptr<T>(y);
      for (int x = 0; x < mat.cols; ++x) {
        float* p = img.pixel(x, y);
        for (int c = 0; c < 3; ++c) {
          const float v = static_cast<float>(row[3 * x + 2 - c]) / denom;
          p[c] = std::clamp(v, 0.0f, 1.0f);
        }
      }
    }
  };
  // Same arithmetic as quantize8 for 8-bit files, so write -> read is exact.
  switch (mat.depth()) {
    case CV_8U: fill(std::uint8_t{}, 255.0f); break;
    case CV_16U: fill(std::uint16_t{}, 65535.0f); break;
    case CV_32F: fill(float{}, 1.0f); break;
    default: throw IoError("unsupported sample depth in " + path.string());
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  if (img.empty()) throw DegenerateInputError("cannot encode an empty image");
  std::vector<std::uint8_t> buf;
  // Fixed compression settings so identical pixels give identical bytes.
  const std::vector<int> params = {cv::IMWRITE_PNG_COMPRESSION, 6, cv::IMWRITE_PNG_STRATEGY,
                                   cv::IMWRITE_PNG_STRATEGY_DEFAULT};
  if (!cv::imencode(".png", to_bgr8(img), buf, params)) {
    throw IoError("PNG encoding failed");
  }
  return buf;
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

RgbImage quantize8(const RgbImage& img) {
  RgbImage out = img;
  for (float& v : out.data()) v = static_cast<float>(to_u8(v)) / 255.0f;
  return out;
}

}  // namespace ugcrank
