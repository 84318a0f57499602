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

#include <cmath>
#include <cstddef>

#include "pixel_ops.hpp"
#include "ugcrank/kernels.hpp"

namespace ugcrank::kernels::parallel {

// Separable: horizontal pass into a double buffer, then vertical pass. Rows
// are independent work items in both passes.
RgbImage gaussian_blur(const RgbImage& img, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = img.width();
  const int h = img.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float* centre = img.pixel(x, y);
      double acc[3] = {0.0, 0.0, 0.0};
      for (int i = -r; i <= r; ++i) {
        const float* p = img.pixel(std::clamp(x + i, 0, w - 1), y);
        for (int c = 0; c < 3; ++c) acc[c] += taps[i + r] * (static_cast<double>(p[c]) - centre[c]);
      }
      double* t = &tmp[(static_cast<std::size_t>(y) * w + x) * 3];
      for (int c = 0; c < 3; ++c) t[c] = centre[c] + acc[c];
    }
  }

  RgbImage out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double* centre = &tmp[(static_cast<std::size_t>(y) * w + x) * 3];
      double acc[3] = {0.0, 0.0, 0.0};
      for (int j = -r; j <= r; ++j) {
        const double* p = &tmp[(static_cast<std::size_t>(std::clamp(y + j, 0, h - 1)) * w + x) * 3];
        for (int c = 0; c < 3; ++c) acc[c] += taps[j + r] * (p[c] - centre[c]);
      }
      float* o = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) o[c] = detail::clip01(centre[c] + acc[c]);
    }
  }
  return out;
}

RgbImage add_gaussian_noise(const RgbImage& img, double sigma, std::uint64_t key) {
  RgbImage out(img.width(), img.height());
  const float* in = img.data().data();
  float* dst = out.data().data();
  const auto n = static_cast<std::ptrdiff_t>(img.data().size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    dst[k] = detail::noisy_sample(in[k], sigma, key, static_cast<std::size_t>(k));
  }
  return out;
}

RgbImage rotate_bilinear(const RgbImage& img, double degrees) {
  RgbImage out(img.width(), img.height());
  const detail::RotationFrame frame(img.width(), img.height(), degrees);
  const int w = img.width();
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) detail::rotated_pixel(img, frame, x, y, out.pixel(x, y));
  return out;
}

RgbImage resize_bilinear(const RgbImage& img, int width, int height) {
  RgbImage out(width, height);
  std::vector<detail::Tap> xtaps(width);
  for (int x = 0; x < width; ++x) xtaps[x] = detail::resample_tap(x, width, img.width());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const auto ty = detail::resample_tap(y, height, img.height());
    for (int x = 0; x < width; ++x) detail::bilinear_pixel(img, xtaps[x], ty, out.pixel(x, y));
  }
  return out;
}

RgbImage hue_shift(const RgbImage& img, double turns) {
  RgbImage out(img.width(), img.height());
  const int w = img.width();
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) detail::hue_shifted_pixel(img.pixel(x, y), turns, out.pixel(x, y));
  return out;
}

}  // namespace ugcrank::kernels::parallel
