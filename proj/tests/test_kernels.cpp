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
#include <numeric>

#include "test_util.hpp"
#include "ugcrank/kernels.hpp"
#include "ugcrank/parallel.hpp"

using namespace ugcrank;
namespace ser = ugcrank::kernels::serial;
namespace par = ugcrank::kernels::parallel;

namespace {

// Direct 2-D convolution with replicated edges, weights from exp().
RgbImage blur_oracle(const RgbImage& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> w1(2 * r + 1);
  for (int i = -r; i <= r; ++i) w1[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  const double norm = std::accumulate(w1.begin(), w1.end(), 0.0);
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int j = -r; j <= r; ++j)
          for (int i = -r; i <= r; ++i) {
            const int sx = std::clamp(x + i, 0, img.width() - 1);
            const int sy = std::clamp(y + j, 0, img.height() - 1);
            acc += w1[i + r] * w1[j + r] * img.at(sx, sy, c);
          }
        out.at(x, y, c) = static_cast<float>(acc / (norm * norm));
      }
  return out;
}

double max_abs_diff(const RgbImage& a, const RgbImage& b) {
  REQUIRE(a.width() == b.width());
  REQUIRE(a.height() == b.height());
  double m = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  return m;
}

}  // namespace

TEST_CASE("gaussian taps") {
  for (double s : {0.8, 1.0, 1.2, 2.5}) {
    const auto t = kernels::gaussian_taps(s);
    CHECK(t.size() == 2 * static_cast<std::size_t>(std::ceil(3 * s)) + 1);
    CHECK(std::accumulate(t.begin(), t.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t i = 0; i < t.size() / 2; ++i) CHECK(t[i] == t[t.size() - 1 - i]);
  }
}

TEST_CASE("blur matches a direct convolution oracle") {
  const auto img = testutil::random_image(23, 17, 4);
  for (double s : {0.8, 1.2}) {
    const auto oracle = blur_oracle(img, s);
    CHECK(max_abs_diff(ser::gaussian_blur(img, s), oracle) < 1e-6);
    CHECK(max_abs_diff(par::gaussian_blur(img, s), oracle) < 1e-6);
  }
}

TEST_CASE("blur leaves constant images exactly constant") {
  for (float c : {0.0f, 0.37f, 0.5f, 1.0f}) {
    const auto img = testutil::constant_image(19, 11, c, c * 0.5f, 1.0f - c);
    CHECK(ser::gaussian_blur(img, 1.1) == img);
    CHECK(par::gaussian_blur(img, 1.1) == img);
  }
}

TEST_CASE("parallel kernels are bit-identical to serial and across thread counts") {
  const auto img = testutil::random_image(57, 41, 11);
  const int saved = current_threads();
  const auto ref_noise = ser::add_gaussian_noise(img, 0.3, 99);
  const auto ref_rot = ser::rotate_bilinear(img, 15.0);
  const auto ref_rs = ser::resize_bilinear(img, 224, 224);
  const auto ref_down = ser::resize_bilinear(img, 13, 29);
  const auto ref_hue = ser::hue_shift(img, 0.27);
  const auto ref_blur = par::gaussian_blur(img, 1.0);
  for (int t : {1, 2, 3, 4, 7}) {
    CAPTURE(t);
    set_threads(t);
    CHECK(par::add_gaussian_noise(img, 0.3, 99) == ref_noise);
    CHECK(par::rotate_bilinear(img, 15.0) == ref_rot);
    CHECK(par::resize_bilinear(img, 224, 224) == ref_rs);
    CHECK(par::resize_bilinear(img, 13, 29) == ref_down);
    CHECK(par::hue_shift(img, 0.27) == ref_hue);
    CHECK(par::gaussian_blur(img, 1.0) == ref_blur);
  }
  set_threads(saved);
}

TEST_CASE("noise is keyed: same key same output, new key new output") {
  const auto img = testutil::constant_image(16, 16, 0.5f, 0.5f, 0.5f);
  CHECK(par::add_gaussian_noise(img, 0.2, 1) == par::add_gaussian_noise(img, 0.2, 1));
  CHECK_FALSE(par::add_gaussian_noise(img, 0.2, 1) == par::add_gaussian_noise(img, 0.2, 2));
  const auto noisy = par::add_gaussian_noise(img, 0.8, 3);
  for (float v : noisy.data()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("zero rotation and same-size resize are identities") {
  const auto img = testutil::random_image(20, 30, 5);
  CHECK(ser::rotate_bilinear(img, 0.0) == img);
  CHECK(par::resize_bilinear(img, 20, 30) == img);
}

TEST_CASE("rotation fills uncovered corners with black") {
  const auto img = testutil::constant_image(40, 40, 1.0f, 1.0f, 1.0f);
  const auto rot = par::rotate_bilinear(img, 20.0);
  for (int c = 0; c < 3; ++c) {
    CHECK(rot.at(0, 0, c) == 0.0f);
    CHECK(rot.at(39, 39, c) == 0.0f);
    CHECK(rot.at(20, 20, c) == doctest::Approx(1.0f));
  }
}

TEST_CASE("resize of a horizontal ramp stays a ramp") {
  RgbImage img(8, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 8; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(x) / 7.0f;
  const auto big = par::resize_bilinear(img, 32, 4);
  for (int x = 1; x < 32; ++x) CHECK(big.at(x, 0, 0) >= big.at(x - 1, 0, 0));
  CHECK(big.at(0, 0, 0) == 0.0f);
  CHECK(big.at(31, 3, 0) == doctest::Approx(1.0f));
}

TEST_CASE("hue shift by a third of a turn maps red to green") {
  const auto red = testutil::constant_image(4, 4, 1.0f, 0.0f, 0.0f);
  const auto g = par::hue_shift(red, 1.0 / 3.0);
  CHECK(g.at(1, 1, 0) == doctest::Approx(0.0f).epsilon(1e-6));
  CHECK(g.at(1, 1, 1) == doctest::Approx(1.0f));
  CHECK(g.at(1, 1, 2) == doctest::Approx(0.0f).epsilon(1e-6));
  const auto gray = testutil::constant_image(4, 4, 0.4f, 0.4f, 0.4f);
  CHECK(par::hue_shift(gray, 0.3) == gray);
  const auto img = testutil::random_image(9, 9, 2);
  CHECK(max_abs_diff(par::hue_shift(img, 1.0), img) < 1e-6);
  CHECK(max_abs_diff(par::hue_shift(par::hue_shift(img, 0.25), -0.25), img) < 1e-5);
}
