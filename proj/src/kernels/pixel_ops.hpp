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

// Per-pixel arithmetic shared by the serial and parallel kernels. Keeping it
// in one place is what makes the two variants bit-identical.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ugcrank/image.hpp"
#include "ugcrank/rng.hpp"

namespace ugcrank::kernels::detail {

inline float clip01(double v) noexcept { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

inline float noisy_sample(float in, double sigma, std::uint64_t key, std::size_t index) noexcept {
  return clip01(static_cast<double>(in) + sigma * CounterRng::normal_at(key, index));
}

struct RotationFrame {
  double cos_t, sin_t, cx, cy;
  RotationFrame(int width, int height, double degrees) noexcept
      : cos_t(std::cos(degrees * std::numbers::pi / 180.0)),
        sin_t(std::sin(degrees * std::numbers::pi / 180.0)),
        cx(0.5 * (width - 1)),
        cy(0.5 * (height - 1)) {}
};

// Counter-clockwise rotation (y axis pointing down); samples outside the
// source read as black.
inline void rotated_pixel(const RgbImage& src, const RotationFrame& f, int x, int y, float* out) noexcept {
  const double dx = x - f.cx;
  const double dy = y - f.cy;
  // Inverse map output -> source.
  const double sx = f.cos_t * dx - f.sin_t * dy + f.cx;
  const double sy = f.sin_t * dx + f.cos_t * dy + f.cy;
  const double fx = std::floor(sx);
  const double fy = std::floor(sy);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double tx = sx - fx;
  const double ty = sy - fy;
  const int w = src.width();
  const int h = src.height();
  double acc[3] = {0.0, 0.0, 0.0};
  const int xs[2] = {x0, x0 + 1};
  const int ys[2] = {y0, y0 + 1};
  const double wx[2] = {1.0 - tx, tx};
  const double wy[2] = {1.0 - ty, ty};
  for (int j = 0; j < 2; ++j) {
    if (ys[j] < 0 || ys[j] >= h) continue;
    for (int i = 0; i < 2; ++i) {
      if (xs[i] < 0 || xs[i] >= w) continue;
      const double wgt = wx[i] * wy[j];
      const float* p = src.pixel(xs[i], ys[j]);
      acc[0] += wgt * p[0];
      acc[1] += wgt * p[1];
      acc[2] += wgt * p[2];
    }
  }
  out[0] = clip01(acc[0]);
  out[1] = clip01(acc[1]);
  out[2] = clip01(acc[2]);
}

// Half-pixel-centre source coordinate for bilinear resampling.
struct Tap {
  int i0, i1;
  double t;
};

inline Tap resample_tap(int dst_index, int dst_size, int src_size) noexcept {
  double s = (dst_index + 0.5) * static_cast<double>(src_size) / dst_size - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_size - 1));
  const int i0 = static_cast<int>(std::floor(s));
  const int i1 = std::min(i0 + 1, src_size - 1);
  return {i0, i1, s - i0};
}

inline void bilinear_pixel(const RgbImage& src, const Tap& tx, const Tap& ty, float* out) noexcept {
  const float* p00 = src.pixel(tx.i0, ty.i0);
  const float* p10 = src.pixel(tx.i1, ty.i0);
  const float* p01 = src.pixel(tx.i0, ty.i1);
  const float* p11 = src.pixel(tx.i1, ty.i1);
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] + tx.t * (static_cast<double>(p10[c]) - p00[c]);
    const double bot = p01[c] + tx.t * (static_cast<double>(p11[c]) - p01[c]);
    out[c] = clip01(top + ty.t * (bot - top));
  }
}

// HSV with hue in turns, [0,1).
inline void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) noexcept {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r) {
    h = (g - b) / d;
    if (h < 0.0) h += 6.0;
  } else if (mx == g) {
    h = (b - r) / d + 2.0;
  } else {
    h = (r - g) / d + 4.0;
  }
  h /= 6.0;
}

inline void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) noexcept {
  const double h6 = h * 6.0;
  const int sector = static_cast<int>(std::floor(h6)) % 6;
  const double f = h6 - std::floor(h6);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

inline double wrap_turns(double h) noexcept {
  h = std::fmod(h, 1.0);
  if (h < 0.0) h += 1.0;
  if (h >= 1.0) h = 0.0;
  return h;
}

inline void hue_shifted_pixel(const float* in, double turns, float* out) noexcept {
  double h, s, v;
  rgb_to_hsv(in[0], in[1], in[2], h, s, v);
  if (s == 0.0) {  // achromatic: hue undefined, pixel unchanged
    out[0] = in[0];
    out[1] = in[1];
    out[2] = in[2];
    return;
  }
  double r, g, b;
  hsv_to_rgb(wrap_turns(h + turns), s, v, r, g, b);
  out[0] = clip01(r);
  out[1] = clip01(g);
  out[2] = clip01(b);
}

}  // namespace ugcrank::kernels::detail
