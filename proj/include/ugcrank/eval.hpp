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
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ugcrank/corpus.hpp"
#include "ugcrank/features.hpp"

namespace ugcrank {

// Standard Pearson coefficient. Throws ValidationError for n < 2 or unequal
// lengths and UndefinedMetricError when either vector is constant.
double pearson(std::span<const double> f, std::span<const double> g);

// Images of one style with their engagement proxies.
struct StyleGroup {
  std::string style_id;
  std::vector<ImageRecord> images;
  std::vector<double> g;  // proxy_score per image
};

// Groups by style_id (sorted). Throws UndefinedMetricError naming the record
// if a proxy score is undefined.
std::vector<StyleGroup> group_by_style(std::span<const ImageRecord> records);

// An evaluation pair, oriented so that g[first] > g[second].
using IndexPair = std::pair<std::size_t, std::size_t>;

// min(n_pairs, #g-distinct unordered pairs) distinct pairs drawn uniformly
// without replacement. Throws UndefinedMetricError if no g-distinct pair
// exists.
std::vector<IndexPair> sample_eval_pairs(std::span<const double> g, std::size_t n_pairs, std::uint64_t seed);

// Fraction of pairs with f[first] > f[second]; ties count as wrong.
double accuracy_on_pairs(std::span<const IndexPair> pairs, std::span<const double> f);

double pair_accuracy(std::span<const double> g, std::span<const double> f, std::size_t n_pairs,
                     std::uint64_t seed);

// Sampling seed for one style: every model sees the same pairs.
std::uint64_t style_seed(std::uint64_t seed, const std::string& style_id);

enum class BaselineKind { nima_aesthetic, nima_technical };
std::string_view to_string(BaselineKind k) noexcept;
double baseline_score(BaselineKind kind, const ScoreDistribution& dist);

struct ScoringModel {
  std::string name;
  // Called once per style with all of its images.
  std::function<std::vector<double>(std::span<const ImageRecord>)> score;
};

struct StyleResult {
  std::string style_id;
  std::size_t n_images = 0;
  std::size_t n_pairs = 0;
  std::optional<double> rho;
  std::optional<double> accuracy;
  std::string skip_reason;  // set when either metric is undefined
};

struct ModelReport {
  std::string name;
  std::vector<StyleResult> styles;
  double mean_rho = 0.0;       // over styles with a defined rho
  double mean_accuracy = 0.0;  // over styles with a defined accuracy
  std::size_t rho_styles = 0;
  std::size_t accuracy_styles = 0;
};

struct EvalConfig {
  std::size_t pairs_per_style = 50;
  std::uint64_t seed = 0;
};

struct EvalReport {
  std::vector<ModelReport> models;
  std::vector<std::string> skipped_styles;  // fewer than two images
  std::size_t pairs_per_style = 0;
  std::uint64_t seed = 0;
};

// Throws LeakageError listing every test id found in reference_ids.
void check_leakage(std::span<const ImageRecord> test, const std::set<std::string>& reference_ids);

EvalReport evaluate(const std::vector<ScoringModel>& models, std::span<const ImageRecord> test,
                    const EvalConfig& cfg, const std::set<std::string>& reference_ids = {});

// Aligned text table: one row per model with its average rho and accuracy.
std::string format_table(const EvalReport& r);
// One JSON object per line: a summary line per model, then per-style rows.
std::string format_json_lines(const EvalReport& r);

}  // namespace ugcrank
