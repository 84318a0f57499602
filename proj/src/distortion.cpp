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

#include "ugcrank/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "ugcrank/error.hpp"
#include "ugcrank/kernels.hpp"
#include "ugcrank/rng.hpp"

namespace ugcrank {
namespace {

constexpr std::array<std::string_view, kDistortionKindCount> kKindNames = {
    "random_crop",    "vertical_crop",  "horizontal_crop", "jitter_brightness",
    "jitter_contrast", "jitter_hue",    "gaussian_blur",   "gaussian_noise",
    "grayscale",      "rotation",       "rotation_mixup",
};

float clip01(double v) noexcept { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

std::string describe(const DistortionSpec& s) { return std::string(to_string(s.kind)); }

RgbImage crop(const RgbImage& img, int x0, int y0, int w, int h) {
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const float* src = img.pixel(x0, y0 + y);
    std::copy(src, src + static_cast<std::size_t>(w) * 3, out.pixel(0, y));
  }
  return out;
}

int scaled_extent(int extent, double fraction, const DistortionSpec& spec) {
  const long n = std::lround(extent * fraction);
  if (n < 1) {
    throw DegenerateInputError(describe(spec) + ": crop window of " + std::to_string(n) +
                               " pixels along an axis of " + std::to_string(extent) + " is below 1 pixel");
  }
  return static_cast<int>(std::min<long>(n, extent));
}

RgbImage apply_crop(const RgbImage& img, const DistortionSpec& spec, CounterRng& rng) {
  const double f = *spec.param;
  int w = img.width();
  int h = img.height();
  switch (spec.kind) {
    case DistortionKind::random_crop: {
      const double side = std::sqrt(f);
      w = scaled_extent(img.width(), side, spec);
      h = scaled_extent(img.height(), side, spec);
      break;
    }
    case DistortionKind::vertical_crop: h = scaled_extent(img.height(), f, spec); break;
    case DistortionKind::horizontal_crop: w = scaled_extent(img.width(), f, spec); break;
    default: break;
  }
  const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(img.width() - w) + 1));
  const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(img.height() - h) + 1));
  return crop(img, x0, y0, w, h);
}

RgbImage scale_values(const RgbImage& img, double f) {
  RgbImage out(img.width(), img.height());
  const auto in = img.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < in.size(); ++k) dst[k] = clip01(f * in[k]);
  return out;
}

double mean_luminance(const RgbImage& img) {
  double sum = 0.0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) sum += luminance(img.pixel(x, y));
  return sum / static_cast<double>(img.pixel_count());
}

RgbImage contrast(const RgbImage& img, double f) {
  const double mu = mean_luminance(img);
  RgbImage out(img.width(), img.height());
  const auto in = img.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < in.size(); ++k) dst[k] = clip01(mu + f * (in[k] - mu));
  return out;
}

RgbImage grayscale(const RgbImage& img) {
  RgbImage out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      float* p = out.pixel(x, y);
      if (p[0] == p[1] && p[1] == p[2]) continue;  // already neutral; keeps the op idempotent
      const float v = clip01(luminance(p));
      p[0] = p[1] = p[2] = v;
    }
  }
  return out;
}

RgbImage rotate(const RgbImage& img, const DistortionSpec& spec, CounterRng& rng) {
  const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
  return kernels::parallel::rotate_bilinear(img, sign * *spec.angle_degrees);
}

RgbImage mix(const RgbImage& a, const RgbImage& b, double wa) {
  RgbImage out(a.width(), a.height());
  const auto pa = a.data();
  const auto pb = b.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < pa.size(); ++k) dst[k] = clip01(wa * pa[k] + (1.0 - wa) * pb[k]);
  return out;
}

}  // namespace

std::string_view to_string(DistortionKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<DistortionKind> parse_distortion_kind(std::string_view token) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == token) return static_cast<DistortionKind>(i);
  return std::nullopt;
}

bool is_crop(DistortionKind k) noexcept {
  return k == DistortionKind::random_crop || k == DistortionKind::vertical_crop ||
         k == DistortionKind::horizontal_crop;
}

bool is_jitter(DistortionKind k) noexcept {
  return k == DistortionKind::jitter_brightness || k == DistortionKind::jitter_contrast ||
         k == DistortionKind::jitter_hue;
}

bool is_rotation(DistortionKind k) noexcept {
  return k == DistortionKind::rotation || k == DistortionKind::rotation_mixup;
}

void validate(const DistortionSpec& spec, const DistortionRanges& ranges) {
  const auto name = describe(spec);
  if (spec.kind == DistortionKind::grayscale) {
    if (spec.param) throw ValidationError("grayscale takes no parameter");
  } else if (spec.kind != DistortionKind::rotation) {
    if (!spec.param) throw ValidationError(name + " requires a parameter");
    const double f = *spec.param;
    if (!std::isfinite(f) || f <= 0.0) throw ValidationError(name + ": parameter must be positive and finite");
    if (ranges.enforce) {
      bool ok = true;
      Interval shown{0, 0};
      if (is_crop(spec.kind)) {
        ok = ranges.crop.contains(f);
        shown = ranges.crop;
      } else if (is_jitter(spec.kind)) {
        ok = ranges.jitter_low.contains(f) || ranges.jitter_high.contains(f);
      } else if (spec.kind == DistortionKind::gaussian_blur) {
        ok = ranges.blur_sigma.contains(f);
        shown = ranges.blur_sigma;
      } else if (spec.kind == DistortionKind::gaussian_noise) {
        ok = ranges.noise_sigma.contains(f);
        shown = ranges.noise_sigma;
      } else if (spec.kind == DistortionKind::rotation_mixup) {
        ok = ranges.mixup_weight.contains(f);
        shown = ranges.mixup_weight;
      }
      if (!ok) {
        if (is_jitter(spec.kind)) {
          throw ValidationError(name + ": parameter " + std::to_string(f) + " outside [" +
                                std::to_string(ranges.jitter_low.lo) + "," + std::to_string(ranges.jitter_low.hi) +
                                "] U [" + std::to_string(ranges.jitter_high.lo) + "," +
                                std::to_string(ranges.jitter_high.hi) + "]");
        }
        throw ValidationError(name + ": parameter " + std::to_string(f) + " outside [" + std::to_string(shown.lo) +
                              "," + std::to_string(shown.hi) + "]");
      }
    }
    if (is_crop(spec.kind) && f > 1.0) throw ValidationError(name + ": retained fraction above 1");
    if (spec.kind == DistortionKind::rotation_mixup && f > 1.0) {
      throw ValidationError(name + ": mix weight above 1");
    }
  } else if (spec.param) {
    throw ValidationError("rotation takes no parameter");
  }

  if (is_rotation(spec.kind)) {
    if (!spec.angle_degrees) throw ValidationError(name + " requires angle_degrees");
    if (ranges.enforce &&
        std::find(kRotationAngles.begin(), kRotationAngles.end(), *spec.angle_degrees) == kRotationAngles.end()) {
      throw ValidationError(name + ": angle must be one of 5, 10, 15, 20");
    }
  } else if (spec.angle_degrees) {
    throw ValidationError(name + " takes no angle");
  }
}

DistortionSpec sample_spec(std::uint64_t rng_seed, const DistortionRanges& ranges) {
  CounterRng rng(rng_seed);
  DistortionSpec s;
  s.kind = static_cast<DistortionKind>(rng.below(kDistortionKindCount));
  auto draw = [&](Interval iv) { return rng.uniform(iv.lo, iv.hi); };
  switch (s.kind) {
    case DistortionKind::random_crop:
    case DistortionKind::vertical_crop:
    case DistortionKind::horizontal_crop: s.param = draw(ranges.crop); break;
    case DistortionKind::jitter_brightness:
    case DistortionKind::jitter_contrast:
    case DistortionKind::jitter_hue:
      s.param = rng.below(2) == 0 ? draw(ranges.jitter_low) : draw(ranges.jitter_high);
      break;
    case DistortionKind::gaussian_blur: s.param = draw(ranges.blur_sigma); break;
    case DistortionKind::gaussian_noise: s.param = draw(ranges.noise_sigma); break;
    case DistortionKind::grayscale: break;
    case DistortionKind::rotation: break;
    case DistortionKind::rotation_mixup: s.param = draw(ranges.mixup_weight); break;
  }
  if (is_rotation(s.kind)) s.angle_degrees = kRotationAngles[rng.below(kRotationAngles.size())];
  s.seed = rng.fork();
  return s;
}

RgbImage apply_distortion(const RgbImage& img, const DistortionSpec& spec, const DistortionRanges& ranges) {
  if (img.empty()) throw DegenerateInputError("cannot distort a 0-sized image");
  validate(spec, ranges);
  CounterRng rng(spec.seed);
  switch (spec.kind) {
    case DistortionKind::random_crop:
    case DistortionKind::vertical_crop:
    case DistortionKind::horizontal_crop: return apply_crop(img, spec, rng);
    case DistortionKind::jitter_brightness: return scale_values(img, *spec.param);
    case DistortionKind::jitter_contrast: return contrast(img, *spec.param);
    case DistortionKind::jitter_hue: return kernels::parallel::hue_shift(img, *spec.param - 1.0);
    case DistortionKind::gaussian_blur: return kernels::parallel::gaussian_blur(img, *spec.param);
    case DistortionKind::gaussian_noise:
      return kernels::parallel::add_gaussian_noise(img, *spec.param, rng.next_u64());
    case DistortionKind::grayscale: return grayscale(img);
    case DistortionKind::rotation: return rotate(img, spec, rng);
    case DistortionKind::rotation_mixup: return mix(img, rotate(img, spec, rng), *spec.param);
  }
  throw ValidationError("unhandled distortion kind");
}

RgbImage distort_chain(const RgbImage& img, std::span<const DistortionSpec> specs, int chain_max,
                       const DistortionRanges& ranges) {
  if (specs.empty()) throw ValidationError("distortion chain is empty");
  if (static_cast<int>(specs.size()) > chain_max) {
    throw ValidationError("distortion chain of length " + std::to_string(specs.size()) + " exceeds chain_max " +
                          std::to_string(chain_max));
  }
  RgbImage out = apply_distortion(img, specs.front(), ranges);
  for (std::size_t i = 1; i < specs.size(); ++i) out = apply_distortion(out, specs[i], ranges);
  return out;
}

void to_json(nlohmann::json& j, const DistortionSpec& s) {
  j = nlohmann::json::object();
  j["kind"] = std::string(to_string(s.kind));
  j["param"] = s.param ? nlohmann::json(*s.param) : nlohmann::json(nullptr);
  j["angle_degrees"] = s.angle_degrees ? nlohmann::json(*s.angle_degrees) : nlohmann::json(nullptr);
  j["seed"] = s.seed;
}

void from_json(const nlohmann::json& j, DistortionSpec& s) {
  if (!j.is_object()) throw ParseError(0, "distortion spec must be an object");
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) throw ParseError(0, "distortion spec needs a string 'kind'");
  const auto kind = parse_distortion_kind(kind_it->get<std::string>());
  if (!kind) throw ValidationError("unknown distortion kind '" + kind_it->get<std::string>() + "'");
  s = DistortionSpec{};
  s.kind = *kind;
  if (auto it = j.find("param"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw ParseError(0, "distortion 'param' must be a number or null");
    s.param = it->get<double>();
  }
  if (auto it = j.find("angle_degrees"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError(0, "distortion 'angle_degrees' must be an integer or null");
    s.angle_degrees = it->get<int>();
  }
  auto seed_it = j.find("seed");
  if (seed_it == j.end() || !seed_it->is_number_unsigned()) {
    if (seed_it != j.end() && seed_it->is_number_integer() && seed_it->get<std::int64_t>() >= 0) {
      s.seed = seed_it->get<std::uint64_t>();
    } else {
      throw ParseError(0, "distortion spec needs a non-negative integer 'seed'");
    }
  } else {
    s.seed = seed_it->get<std::uint64_t>();
  }
}

}  // namespace ugcrank
