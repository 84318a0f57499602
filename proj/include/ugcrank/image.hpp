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

#pragma once

#include <cstddef>
#include <cstring>
#include <span>
#include <vector>

#include "ugcrank/error.hpp"

namespace ugcrank {

// Interleaved RGB, row-major, float samples nominally in [0,1].
class RgbImage {
 public:
  static constexpr int kChannels = 3;

  RgbImage() = default;
  RgbImage(int width, int height, float fill = 0.0f) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw DegenerateInputError("image dimensions must be at least 1x1, got " +
                                 std::to_string(width) + "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kChannels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  float* pixel(int x, int y) noexcept { return data_.data() + index(x, y); }
  const float* pixel(int x, int y) const noexcept { return data_.data() + index(x, y); }

  float& at(int x, int y, int c) noexcept { return data_[index(x, y) + c]; }
  float at(int x, int y, int c) const noexcept { return data_[index(x, y) + c]; }

  // Buffer equality, bit for bit (NaN payloads included).
  friend bool operator==(const RgbImage& a, const RgbImage& b) noexcept {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           (a.data_.empty() ||
            std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0);
  }

 private:
  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
           kChannels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// Rec.601 luma.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double luminance(const float* rgb) noexcept {
  return kLumaR * rgb[0] + kLumaG * rgb[1] + kLumaB * rgb[2];
}

}  // namespace ugcrank
