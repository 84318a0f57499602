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

#include <doctest.h>

#include <cmath>
#include <map>

#include "test_util.hpp"
#include "ugcrank/distortion.hpp"
#include "ugcrank/error.hpp"

using namespace ugcrank;
using K = DistortionKind;

namespace {

DistortionSpec spec(K kind, std::optional<double> param = std::nullopt, std::optional<int> angle = std::nullopt,
                    std::uint64_t seed = 1) {
  return {kind, param, angle, seed};
}

double mean_luma(const RgbImage& img) {
  double s = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) s += luminance(img.pixel(x, y));
  return s / static_cast<double>(img.pixel_count());
}

bool in_unit_range(const RgbImage& img) {
  for (float v : img.data())
    if (!(v >= 0.0f && v <= 1.0f)) return false;
  return true;
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (std::size_t i = 0; i < kDistortionKindCount; ++i) {
    const auto k = static_cast<K>(i);
    CHECK(parse_distortion_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_distortion_kind("sepia").has_value());
}

TEST_CASE("sample_spec is deterministic and stays in range") {
  CHECK(sample_spec(5) == sample_spec(5));
  std::map<K, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_spec(static_cast<std::uint64_t>(i) * 7919 + 3);
    CHECK_NOTHROW(validate(s));
    ++counts[s.kind];
    if (is_jitter(s.kind)) CHECK(((*s.param >= 0.3 && *s.param <= 0.6) || (*s.param >= 1.2 && *s.param <= 1.4)));
  }
  REQUIRE(counts.size() == kDistortionKindCount);
  for (const auto& [k, c] : counts) {
    CAPTURE(to_string(k));
    CHECK(c >= 0.05 * n);
    CHECK(c <= 0.14 * n);
  }
}

TEST_CASE("validation rejects out-of-range and malformed specs") {
  CHECK_THROWS_AS(validate(spec(K::random_crop, 0.7)), ValidationError);
  CHECK_THROWS_AS(validate(spec(K::jitter_brightness, 0.9)), ValidationError);
  CHECK_NOTHROW(validate(spec(K::jitter_brightness, 1.3)));
  CHECK_THROWS_AS(validate(spec(K::gaussian_blur, 2.0)), ValidationError);
  CHECK_THROWS_AS(validate(spec(K::gaussian_noise)), ValidationError);
  CHECK_THROWS_AS(validate(spec(K::grayscale, 0.5)), ValidationError);
  CHECK_THROWS_AS(validate(spec(K::rotation, std::nullopt, 7)), ValidationError);
  CHECK_THROWS_AS(validate(spec(K::rotation)), ValidationError);
  CHECK_THROWS_AS(validate(spec(K::gaussian_blur, 1.0, 5)), ValidationError);
  CHECK_NOTHROW(validate(spec(K::rotation_mixup, 0.3, 10)));
  CHECK_NOTHROW(validate(spec(K::jitter_brightness, 1.0), DistortionRanges::unrestricted()));
}

TEST_CASE("grayscale sets R=G=B and is idempotent") {
  const auto img = testutil::random_image(31, 19, 8);
  const auto g1 = apply_distortion(img, spec(K::grayscale));
  for (int y = 0; y < g1.height(); ++y)
    for (int x = 0; x < g1.width(); ++x) {
      const float* p = g1.pixel(x, y);
      CHECK(p[0] == p[1]);
      CHECK(p[1] == p[2]);
    }
  CHECK(apply_distortion(g1, spec(K::grayscale)) == g1);
  const std::vector<DistortionSpec> twice = {spec(K::grayscale), spec(K::grayscale)};
  CHECK(distort_chain(img, twice) == g1);
}

TEST_CASE("axis crops keep the other axis and a fraction of this one") {
  const RgbImage img(224, 224, 0.5f);
  const auto v = apply_distortion(img, spec(K::vertical_crop, 0.5));
  CHECK(v.width() == 224);
  CHECK(v.height() == 112);
  const auto h = apply_distortion(img, spec(K::horizontal_crop, 0.4));
  CHECK(h.width() == 90);
  CHECK(h.height() == 224);
}

TEST_CASE("crop retained fraction within one-pixel rounding") {
  CounterRng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 8 + static_cast<int>(rng.below(200));
    const int h = 8 + static_cast<int>(rng.below(200));
    const double f = rng.uniform(0.4, 0.6);
    const RgbImage img(w, h);
    const auto r = apply_distortion(img, spec(K::random_crop, f, std::nullopt, rng.next_u64()));
    const double side = std::sqrt(f);
    CHECK(std::abs(r.width() - w * side) <= 0.5 + 1e-9);
    CHECK(std::abs(r.height() - h * side) <= 0.5 + 1e-9);
    const auto v = apply_distortion(img, spec(K::vertical_crop, f, std::nullopt, rng.next_u64()));
    CHECK(v.width() == w);
    CHECK(std::abs(v.height() - h * f) <= 0.5 + 1e-9);
  }
}

TEST_CASE("crop windows come from the source image") {
  const auto img = testutil::random_image(40, 30, 3);
  const auto c = apply_distortion(img, spec(K::random_crop, 0.5, std::nullopt, 77));
  bool found = false;
  for (int y0 = 0; y0 + c.height() <= img.height() && !found; ++y0)
    for (int x0 = 0; x0 + c.width() <= img.width() && !found; ++x0) {
      bool same = true;
      for (int y = 0; y < c.height() && same; ++y)
        for (int x = 0; x < c.width() && same; ++x)
          for (int ch = 0; ch < 3; ++ch) same = same && c.at(x, y, ch) == img.at(x0 + x, y0 + y, ch);
      found = same;
    }
  CHECK(found);
}

TEST_CASE("degenerate crops and empty images are rejected") {
  const RgbImage thin(10, 1);
  CHECK_THROWS_AS(apply_distortion(thin, spec(K::vertical_crop, 0.4)), DegenerateInputError);
  CHECK_THROWS_AS(apply_distortion(RgbImage{}, spec(K::grayscale)), DegenerateInputError);
  CHECK_THROWS_AS(RgbImage(0, 5), DegenerateInputError);
}

TEST_CASE("brightness with factor 1 is the identity") {
  const auto img = testutil::random_image(12, 12, 6);
  CHECK(apply_distortion(img, spec(K::jitter_brightness, 1.0), DistortionRanges::unrestricted()) == img);
}

TEST_CASE("brightness scales and clips") {
  const auto img = testutil::constant_image(4, 4, 0.5f, 0.8f, 0.1f);
  const auto out = apply_distortion(img, spec(K::jitter_brightness, 1.4));
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.7f));
  CHECK(out.at(0, 0, 1) == 1.0f);
  CHECK(out.at(0, 0, 2) == doctest::Approx(0.14f));
}

TEST_CASE("contrast jitter preserves mean luminance when clipping is inactive") {
  RgbImage img(32, 24);
  CounterRng rng(12);
  for (float& v : img.data()) v = static_cast<float>(rng.uniform(0.3, 0.7));
  for (double f : {0.3, 0.45, 0.6}) {
    const auto out = apply_distortion(img, spec(K::jitter_contrast, f));
    CHECK(std::abs(mean_luma(out) - mean_luma(img)) < 1e-6);
  }
}

TEST_CASE("hue jitter on a neutral image changes nothing") {
  const auto gray = testutil::constant_image(8, 8, 0.3f, 0.3f, 0.3f);
  CHECK(apply_distortion(gray, spec(K::jitter_hue, 1.3)) == gray);
  const auto red = testutil::constant_image(8, 8, 1.0f, 0.0f, 0.0f);
  CHECK_FALSE(apply_distortion(red, spec(K::jitter_hue, 1.3)) == red);
}

TEST_CASE("blur of a constant image is that constant") {
  const auto img = testutil::constant_image(20, 20, 0.25f, 0.5f, 0.75f);
  CHECK(apply_distortion(img, spec(K::gaussian_blur, 1.2)) == img);
}

TEST_CASE("noise deviation on mid-gray matches the clipped-normal oracle") {
  // For in = 0.5 the clip bound is a = 0.5 on both sides, so |out - in| =
  // min(|e|, a) with e ~ N(0, s^2):
  //   E = s sqrt(2/pi) (1 - exp(-a^2 / 2s^2)) + 2a (1 - Phi(a/s)).
  const auto img = testutil::constant_image(256, 256, 0.5f, 0.5f, 0.5f);
  for (double s : {0.2, 0.5, 0.8}) {
    const double a = 0.5;
    const double phi = 0.5 * std::erfc(-(a / s) / std::sqrt(2.0));
    const double expected =
        s * std::sqrt(2.0 / M_PI) * (1.0 - std::exp(-a * a / (2 * s * s))) + 2 * a * (1.0 - phi);
    const auto out = apply_distortion(img, spec(K::gaussian_noise, s, std::nullopt, 31));
    double mad = 0;
    for (float v : out.data()) mad += std::abs(v - 0.5);
    mad /= static_cast<double>(out.data().size());
    CAPTURE(s);
    CHECK(std::abs(mad - expected) / expected < 0.05);
  }
}

TEST_CASE("rotation mixup blends the image with its rotation") {
  const auto img = testutil::random_image(30, 30, 9);
  const auto s = spec(K::rotation_mixup, 0.3, 10, 4);
  const auto rot_only = apply_distortion(img, spec(K::rotation, std::nullopt, 10, 4));
  const auto out = apply_distortion(img, s);
  for (std::size_t i = 0; i < out.data().size(); ++i)
    CHECK(out.data()[i] == doctest::Approx(0.3 * img.data()[i] + 0.7 * rot_only.data()[i]).epsilon(1e-6));
}

TEST_CASE("every kind is deterministic, in range and size-preserving unless it crops") {
  const auto img = testutil::random_image(48, 36, 13);
  for (int i = 0; i < 300; ++i) {
    const auto s = sample_spec(static_cast<std::uint64_t>(i));
    const auto a = apply_distortion(img, s);
    CHECK(a == apply_distortion(img, s));
    CHECK(in_unit_range(a));
    if (!is_crop(s.kind)) {
      CHECK(a.width() == img.width());
      CHECK(a.height() == img.height());
    }
  }
}

TEST_CASE("chains fold left and respect chain_max") {
  const auto img = testutil::random_image(20, 20, 1);
  const auto a = spec(K::gaussian_blur, 1.0), b = spec(K::jitter_contrast, 0.5);
  const std::vector<DistortionSpec> one = {a}, two = {a, b}, three = {a, b, a};
  CHECK(distort_chain(img, one) == apply_distortion(img, a));
  CHECK(distort_chain(img, two) == apply_distortion(apply_distortion(img, a), b));
  CHECK_THROWS_AS(distort_chain(img, three), ValidationError);
  CHECK_NOTHROW(distort_chain(img, three, 3));
  CHECK_THROWS_AS(distort_chain(img, std::vector<DistortionSpec>{}), ValidationError);
}

TEST_CASE("specs serialize to and from json") {
  for (int i = 0; i < 100; ++i) {
    const auto s = sample_spec(static_cast<std::uint64_t>(i) + 1000);
    const nlohmann::json j = s;
    CHECK(j.contains("kind"));
    CHECK(j.contains("param"));
    CHECK(j.contains("angle_degrees"));
    CHECK(j.contains("seed"));
    CHECK(nlohmann::json::parse(j.dump()).get<DistortionSpec>() == s);
  }
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"kind":"sepia","seed":1})").get<DistortionSpec>(), ValidationError);
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"kind":"grayscale"})").get<DistortionSpec>(), ParseError);
}
