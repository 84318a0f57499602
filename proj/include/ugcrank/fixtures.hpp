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
#include <filesystem>

#include "ugcrank/corpus.hpp"
#include "ugcrank/image.hpp"

namespace ugcrank {

// Procedural stand-in for a product catalogue: every style gets one studio
// shot (sharp, saturated, well exposed), one good UGC shot (same scene,
// mild exposure shift and sensor noise) and one bad UGC shot (dark, soft,
// noisy, washed out).
struct FixtureOptions {
  std::size_t styles = 32;
  std::size_t train_styles = 20;
  std::size_t val_styles = 6;  // the rest are test styles
  std::uint64_t seed = 7;
};

RgbImage render_fixture(std::uint64_t style_seed, Bucket bucket, int width, int height);

// Writes images/<id>.png and manifest.jsonl under dir and returns the
// manifest (base_dir = dir). Deterministic in opts.
Manifest write_fixture_corpus(const std::filesystem::path& dir, const FixtureOptions& opts = {});

}  // namespace ugcrank
