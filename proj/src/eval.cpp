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

#include "ugcrank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "ugcrank/error.hpp"
#include "ugcrank/hash.hpp"
#include "ugcrank/rng.hpp"

namespace ugcrank {

double pearson(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw ValidationError("pearson: vectors differ in length");
  if (f.size() < 2) throw ValidationError("pearson: need at least two observations");
  // Single pass over running means and co-moments.
  double mf = 0.0, mg = 0.0, sff = 0.0, sgg = 0.0, sfg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double df = f[i] - mf;
    const double dg = g[i] - mg;
    mf += df / n;
    mg += dg / n;
    sff += df * (f[i] - mf);
    sgg += dg * (g[i] - mg);
    sfg += df * (g[i] - mg);
  }
  if (sff <= 0.0) throw UndefinedMetricError("pearson: first vector is constant");
  if (sgg <= 0.0) throw UndefinedMetricError("pearson: second vector is constant");
  return std::clamp(sfg / (std::sqrt(sff) * std::sqrt(sgg)), -1.0, 1.0);
}

std::vector<StyleGroup> group_by_style(std::span<const ImageRecord> records) {
  std::map<std::string, StyleGroup> by_style;
  for (const auto& r : records) {
    auto& grp = by_style[r.style_id];
    grp.style_id = r.style_id;
    try {
      grp.g.push_back(proxy_score(r));
    } catch (const UndefinedMetricError&) {
      throw UndefinedMetricError("record '" + r.id + "' has no votes, proxy score undefined");
    }
    grp.images.push_back(r);
  }
  std::vector<StyleGroup> out;
  out.reserve(by_style.size());
  for (auto& [_, grp] : by_style) out.push_back(std::move(grp));
  return out;
}

std::vector<IndexPair> sample_eval_pairs(std::span<const double> g, std::size_t n_pairs, std::uint64_t seed) {
  std::vector<IndexPair> pool;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      if (g[i] > g[j]) pool.emplace_back(i, j);
      else if (g[j] > g[i]) pool.emplace_back(j, i);
    }
  }
  if (pool.empty()) throw UndefinedMetricError("no pair of images with distinct proxy scores");
  const std::size_t k = std::min(n_pairs, pool.size());
  CounterRng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  pool.resize(k);
  return pool;
}

double accuracy_on_pairs(std::span<const IndexPair> pairs, std::span<const double> f) {
  if (pairs.empty()) throw UndefinedMetricError("no evaluation pairs");
  std::size_t correct = 0;
  for (const auto& [hi, lo] : pairs) correct += f[hi] > f[lo];
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

double pair_accuracy(std::span<const double> g, std::span<const double> f, std::size_t n_pairs,
                     std::uint64_t seed) {
  if (f.size() != g.size()) throw ValidationError("pair_accuracy: score vectors differ in length");
  if (g.size() < 2) throw ValidationError("pair_accuracy: style needs at least two images");
  const auto pairs = sample_eval_pairs(g, n_pairs, seed);
  return accuracy_on_pairs(pairs, f);
}

std::uint64_t style_seed(std::uint64_t seed, const std::string& style_id) {
  return splitmix64(seed ^ fnv1a64(style_id));
}

std::string_view to_string(BaselineKind k) noexcept {
  return k == BaselineKind::nima_aesthetic ? "NIMA-A" : "NIMA-T";
}

double baseline_score(BaselineKind, const ScoreDistribution& dist) { return expected_score(dist); }

void check_leakage(std::span<const ImageRecord> test, const std::set<std::string>& reference_ids) {
  std::vector<std::string> leaked;
  for (const auto& r : test)
    if (reference_ids.count(r.id)) leaked.push_back(r.id);
  if (!leaked.empty()) {
    std::sort(leaked.begin(), leaked.end());
    throw LeakageError(std::move(leaked));
  }
}

EvalReport evaluate(const std::vector<ScoringModel>& models, std::span<const ImageRecord> test,
                    const EvalConfig& cfg, const std::set<std::string>& reference_ids) {
  if (models.empty()) throw ValidationError("evaluate needs at least one model");
  if (cfg.pairs_per_style < 1) throw ValidationError("pairs per style must be >= 1");
  check_leakage(test, reference_ids);

  EvalReport rep;
  rep.pairs_per_style = cfg.pairs_per_style;
  rep.seed = cfg.seed;
  std::vector<StyleGroup> groups;
  for (auto& grp : group_by_style(test)) {
    if (grp.images.size() < 2) rep.skipped_styles.push_back(grp.style_id);
    else groups.push_back(std::move(grp));
  }

  for (const auto& model : models) {
    ModelReport mr;
    mr.name = model.name;
    double rho_sum = 0.0, acc_sum = 0.0;
    for (const auto& grp : groups) {
      StyleResult sr;
      sr.style_id = grp.style_id;
      sr.n_images = grp.images.size();
      const auto f = model.score(grp.images);
      if (f.size() != grp.images.size()) {
        throw ContractError("model '" + model.name + "' returned " + std::to_string(f.size()) + " scores for " +
                            std::to_string(grp.images.size()) + " images");
      }
      try {
        sr.rho = pearson(f, grp.g);
      } catch (const UndefinedMetricError& e) {
        sr.skip_reason = std::string("rho: ") + e.what();
      }
      try {
        const auto pairs = sample_eval_pairs(grp.g, cfg.pairs_per_style, style_seed(cfg.seed, grp.style_id));
        sr.n_pairs = pairs.size();
        sr.accuracy = accuracy_on_pairs(pairs, f);
      } catch (const UndefinedMetricError& e) {
        if (!sr.skip_reason.empty()) sr.skip_reason += "; ";
        sr.skip_reason += std::string("accuracy: ") + e.what();
      }
      if (sr.rho) {
        rho_sum += *sr.rho;
        ++mr.rho_styles;
      }
      if (sr.accuracy) {
        acc_sum += *sr.accuracy;
        ++mr.accuracy_styles;
      }
      mr.styles.push_back(std::move(sr));
    }
    if (mr.rho_styles) mr.mean_rho = rho_sum / static_cast<double>(mr.rho_styles);
    if (mr.accuracy_styles) mr.mean_accuracy = acc_sum / static_cast<double>(mr.accuracy_styles);
    rep.models.push_back(std::move(mr));
  }
  return rep;
}

std::string format_table(const EvalReport& r) {
  std::size_t width = 5;
  for (const auto& m : r.models) width = std::max(width, m.name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>8}  {:>6}\n", "Model", width, "rho", "Accuracy", "Styles");
  out += std::string(width + 30, '-') + "\n";
  for (const auto& m : r.models) {
    out += fmt::format("{:<{}}  {:>8.4f}  {:>8.4f}  {:>6}\n", m.name, width, m.mean_rho, m.mean_accuracy,
                       m.accuracy_styles);
  }
  if (!r.skipped_styles.empty()) {
    out += "skipped (fewer than 2 images):";
    for (const auto& s : r.skipped_styles) out += " " + s;
    out += "\n";
  }
  return out;
}

std::string format_json_lines(const EvalReport& r) {
  using nlohmann::json;
  std::string out;
  for (const auto& m : r.models) {
    json summary = {{"model", m.name},           {"mean_rho", m.mean_rho},
                    {"mean_accuracy", m.mean_accuracy}, {"rho_styles", m.rho_styles},
                    {"accuracy_styles", m.accuracy_styles}, {"pairs_per_style", r.pairs_per_style},
                    {"seed", r.seed}};
    out += summary.dump() + "\n";
    for (const auto& s : m.styles) {
      json row = {{"model", m.name}, {"style_id", s.style_id}, {"n_images", s.n_images}, {"n_pairs", s.n_pairs}};
      row["rho"] = s.rho ? json(*s.rho) : json(nullptr);
      row["accuracy"] = s.accuracy ? json(*s.accuracy) : json(nullptr);
      if (!s.skip_reason.empty()) row["skipped"] = s.skip_reason;
      out += row.dump() + "\n";
    }
  }
  for (const auto& s : r.skipped_styles) out += json{{"skipped_style", s}}.dump() + "\n";
  return out;
}

}  // namespace ugcrank
