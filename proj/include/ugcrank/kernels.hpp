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

#include <cstdint>
#include <vector>

#include "ugcrank/image.hpp"

// Pixel kernels behind the distortion and feature modules.
//
// Two implementations of each kernel: `serial` is the plain reference kept
// for tests and benchmarks, `parallel` is the OpenMP version the pipeline
// calls. Except for gaussian_blur (direct 2-D convolution vs. separable
// passes, equal to float rounding) both produce bit-identical output, and the
// parallel output never depends on the thread count.
namespace ugcrank::kernels {

// Normalized 1-D Gaussian taps, radius ceil(3*sigma). sigma must be > 0.
std::vector<double> gaussian_taps(double sigma);

namespace serial {
RgbImage gaussian_blur(const RgbImage& img, double sigma);
RgbImage add_gaussian_noise(const RgbImage& img, double sigma, std::uint64_t key);
RgbImage rotate_bilinear(const RgbImage& img, double degrees);
RgbImage resize_bilinear(const RgbImage& img, int width, int height);
RgbImage hue_shift(const RgbImage& img, double turns);
}  // namespace serial

namespace parallel {
RgbImage gaussian_blur(const RgbImage& img, double sigma);
RgbImage add_gaussian_noise(const RgbImage& img, double sigma, std::uint64_t key);
RgbImage rotate_bilinear(const RgbImage& img, double degrees);
RgbImage resize_bilinear(const RgbImage& img, int width, int height);
RgbImage hue_shift(const RgbImage& img, double turns);
}  // namespace parallel

}  // namespace ugcrank::kernels
