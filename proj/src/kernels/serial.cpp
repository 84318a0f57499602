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

#include "pixel_ops.hpp"
#include "ugcrank/kernels.hpp"

namespace ugcrank::kernels {

std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("gaussian sigma must be positive and finite");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[i + radius] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  return taps;
}

namespace serial {

// Direct 2-D convolution with the outer-product kernel, edge-replicate.
// Accumulated as centre + sum w * (neighbour - centre) so a constant image
// maps to itself exactly.
RgbImage gaussian_blur(const RgbImage& img, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = img.width();
  const int h = img.height();
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float* centre = img.pixel(x, y);
      double acc[3] = {0.0, 0.0, 0.0};
      for (int j = -r; j <= r; ++j) {
        const int yy = std::clamp(y + j, 0, h - 1);
        for (int i = -r; i <= r; ++i) {
          const int xx = std::clamp(x + i, 0, w - 1);
          const double wgt = taps[j + r] * taps[i + r];
          const float* p = img.pixel(xx, yy);
          for (int c = 0; c < 3; ++c) acc[c] += wgt * (static_cast<double>(p[c]) - centre[c]);
        }
      }
      float* o = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) o[c] = detail::clip01(centre[c] + acc[c]);
    }
  }
  return out;
}

RgbImage add_gaussian_noise(const RgbImage& img, double sigma, std::uint64_t key) {
  RgbImage out(img.width(), img.height());
  const auto in = img.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < in.size(); ++k) dst[k] = detail::noisy_sample(in[k], sigma, key, k);
  return out;
}

RgbImage rotate_bilinear(const RgbImage& img, double degrees) {
  RgbImage out(img.width(), img.height());
  const detail::RotationFrame frame(img.width(), img.height(), degrees);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) detail::rotated_pixel(img, frame, x, y, out.pixel(x, y));
  return out;
}

RgbImage resize_bilinear(const RgbImage& img, int width, int height) {
  RgbImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const auto ty = detail::resample_tap(y, height, img.height());
    for (int x = 0; x < width; ++x) {
      const auto tx = detail::resample_tap(x, width, img.width());
      detail::bilinear_pixel(img, tx, ty, out.pixel(x, y));
    }
  }
  return out;
}

RgbImage hue_shift(const RgbImage& img, double turns) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) detail::hue_shifted_pixel(img.pixel(x, y), turns, out.pixel(x, y));
  return out;
}

}  // namespace serial
}  // namespace ugcrank::kernels
