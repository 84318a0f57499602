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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ugcrank/image.hpp"

namespace ugcrank {

// Quality-degrading manipulations: crops for a partial subject, colour
// jitter for poor lighting, blur, sensor noise, a grayscale filter and
// rotation (optionally ghosted with the original) for camera shake.
enum class DistortionKind {
  random_crop,
  vertical_crop,
  horizontal_crop,
  jitter_brightness,
  jitter_contrast,
  jitter_hue,
  gaussian_blur,
  gaussian_noise,
  grayscale,
  rotation,
  rotation_mixup,
};

inline constexpr std::size_t kDistortionKindCount = 11;
inline constexpr std::array<int, 4> kRotationAngles = {5, 10, 15, 20};

std::string_view to_string(DistortionKind k) noexcept;
std::optional<DistortionKind> parse_distortion_kind(std::string_view token) noexcept;

bool is_crop(DistortionKind k) noexcept;
bool is_jitter(DistortionKind k) noexcept;
bool is_rotation(DistortionKind k) noexcept;

struct DistortionSpec {
  DistortionKind kind = DistortionKind::grayscale;
  std::optional<double> param;       // absent for grayscale
  std::optional<int> angle_degrees;  // rotation kinds only
  std::uint64_t seed = 0;

  friend bool operator==(const DistortionSpec&, const DistortionSpec&) = default;
};

struct Interval {
  double lo, hi;
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

// Legal parameter ranges per kind. Jitter factors come from the union of
// two intervals, picked with probability 1/2 each when sampling.
struct DistortionRanges {
  Interval crop{0.4, 0.6};
  Interval jitter_low{0.3, 0.6};
  Interval jitter_high{1.2, 1.4};
  Interval blur_sigma{0.8, 1.2};
  Interval noise_sigma{0.2, 0.8};
  Interval mixup_weight{0.2, 0.4};
  // When false, validation only requires a positive finite parameter (used
  // by debugging tools and identity tests such as brightness f = 1).
  bool enforce = true;

  static DistortionRanges unrestricted() {
    DistortionRanges r;
    r.enforce = false;
    return r;
  }
};

// Throws ValidationError describing the first violated constraint.
void validate(const DistortionSpec& spec, const DistortionRanges& ranges = {});

// Kind uniform over all 11 kinds, parameter uniform in its range, angle
// uniform over {5,10,15,20}. Pure function of the seed.
DistortionSpec sample_spec(std::uint64_t rng_seed, const DistortionRanges& ranges = {});

// Pure and deterministic: identical (img, spec) give bit-identical buffers.
// Crops change the output size; every other kind preserves it.
RgbImage apply_distortion(const RgbImage& img, const DistortionSpec& spec, const DistortionRanges& ranges = {});

// Left fold of apply_distortion; 1 <= specs.size() <= chain_max.
RgbImage distort_chain(const RgbImage& img, std::span<const DistortionSpec> specs, int chain_max = 2,
                       const DistortionRanges& ranges = {});

void to_json(nlohmann::json& j, const DistortionSpec& s);
void from_json(const nlohmann::json& j, DistortionSpec& s);

}  // namespace ugcrank
