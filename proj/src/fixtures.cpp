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

#include "ugcrank/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "ugcrank/error.hpp"
#include "ugcrank/image_io.hpp"
#include "ugcrank/kernels.hpp"
#include "ugcrank/rng.hpp"

namespace ugcrank {
namespace fs = std::filesystem;

namespace {

struct Rgb {
  float r, g, b;
};

Rgb random_colour(CounterRng& rng) {
  // Saturated hue wheel colour.
  const double h = rng.uniform01() * 6.0;
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  const int sector = static_cast<int>(h);
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = 1, g = x; break;
    case 1: r = x, g = 1; break;
    case 2: g = 1, b = x; break;
    case 3: g = x, b = 1; break;
    case 4: r = x, b = 1; break;
    default: r = 1, b = x; break;
  }
  const double lo = rng.uniform(0.05, 0.25), hi = rng.uniform(0.8, 0.95);
  return {static_cast<float>(lo + (hi - lo) * r), static_cast<float>(lo + (hi - lo) * g),
          static_cast<float>(lo + (hi - lo) * b)};
}

RgbImage render_scene(std::uint64_t seed, int w, int h) {
  CounterRng rng(seed);
  const Rgb top = random_colour(rng), bottom = random_colour(rng);
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    const float t = static_cast<float>(y) / static_cast<float>(std::max(1, h - 1));
    for (int x = 0; x < w; ++x) {
      float* p = img.pixel(x, y);
      p[0] = top.r + t * (bottom.r - top.r);
      p[1] = top.g + t * (bottom.g - top.g);
      p[2] = top.b + t * (bottom.b - top.b);
    }
  }
  // A garment-like block with stripes, then a few discs.
  const Rgb cloth = random_colour(rng), stripe = random_colour(rng);
  const int x0 = w / 4, x1 = 3 * w / 4, y0 = h / 5, y1 = 4 * h / 5;
  const int period = 3 + static_cast<int>(rng.below(4));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const Rgb& c = ((x + y) / period) % 2 ? cloth : stripe;
      float* p = img.pixel(x, y);
      p[0] = c.r, p[1] = c.g, p[2] = c.b;
    }
  }
  const int discs = 2 + static_cast<int>(rng.below(3));
  for (int d = 0; d < discs; ++d) {
    const Rgb c = random_colour(rng);
    const double cx = rng.uniform(0, w), cy = rng.uniform(0, h);
    const double rad = rng.uniform(0.08, 0.2) * std::min(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > rad * rad) continue;
        float* p = img.pixel(x, y);
        p[0] = c.r, p[1] = c.g, p[2] = c.b;
      }
    }
  }
  return img;
}

void scale_about(RgbImage& img, double gain, double contrast) {
  for (float& v : img.data()) {
    const double out = 0.5 + contrast * (gain * v - 0.5);
    v = static_cast<float>(std::clamp(out, 0.0, 1.0));
  }
}

}  // namespace

RgbImage render_fixture(std::uint64_t style_seed, Bucket bucket, int width, int height) {
  RgbImage img = render_scene(style_seed, width, height);
  CounterRng rng(splitmix64(style_seed ^ (static_cast<std::uint64_t>(bucket) + 1)));
  switch (bucket) {
    case Bucket::studio:
      break;
    case Bucket::ugc_good:
      scale_about(img, rng.uniform(0.85, 1.0), rng.uniform(0.85, 0.95));
      img = kernels::parallel::add_gaussian_noise(img, 0.02, rng.next_u64());
      break;
    case Bucket::ugc_bad:
      img = kernels::parallel::gaussian_blur(img, rng.uniform(1.2, 1.8));
      scale_about(img, rng.uniform(0.45, 0.6), rng.uniform(0.5, 0.65));
      img = kernels::parallel::add_gaussian_noise(img, rng.uniform(0.06, 0.1), rng.next_u64());
      break;
  }
  return quantize8(img);
}

Manifest write_fixture_corpus(const fs::path& dir, const FixtureOptions& opts) {
  if (opts.train_styles + opts.val_styles > opts.styles) {
    throw ValidationError("fixture split sizes exceed the number of styles");
  }
  std::error_code ec;
  fs::create_directories(dir / "images", ec);
  if (ec) throw IoError("cannot create " + (dir / "images").string() + ": " + ec.message());

  static constexpr int kWidths[] = {64, 72, 80};
  static constexpr int kHeights[] = {80, 96};
  Manifest m;
  m.base_dir = dir;
  CounterRng rng(opts.seed);
  for (std::size_t s = 0; s < opts.styles; ++s) {
    const std::uint64_t seed = rng.fork();
    const int w = kWidths[s % 3], h = kHeights[(s / 3) % 2];
    const Split split = s < opts.train_styles ? Split::train
                        : s < opts.train_styles + opts.val_styles ? Split::val
                                                                  : Split::test;
    char style[16];
    std::snprintf(style, sizeof style, "s%02zu", s);
    for (Bucket b : {Bucket::studio, Bucket::ugc_good, Bucket::ugc_bad}) {
      ImageRecord r;
      r.id = std::string(style) + "-" + std::string(to_string(b));
      r.path = "images/" + r.id + ".png";
      r.bucket = b;
      r.style_id = style;
      r.split = split;
      if (b != Bucket::studio) r.has_human = s % 2 == 0;
      const std::int64_t jitter = static_cast<std::int64_t>(s % 5);
      switch (b) {
        case Bucket::studio: r.upvotes = 40 + jitter, r.downvotes = 4; break;
        case Bucket::ugc_good: r.upvotes = 25 + jitter, r.downvotes = 8; break;
        case Bucket::ugc_bad: r.upvotes = 6, r.downvotes = 20 + jitter; break;
      }
      write_png(dir / r.path, render_fixture(seed, b, w, h));
      m.records.push_back(std::move(r));
    }
  }
  write_manifest_file(dir / "manifest.jsonl", m);
  m.source_uri = (dir / "manifest.jsonl").string();
  return m;
}

}  // namespace ugcrank
