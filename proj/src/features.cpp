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

#include "ugcrank/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ugcrank/error.hpp"
#include "ugcrank/image_io.hpp"
#include "ugcrank/kernels.hpp"
#include "onnx_extractor.hpp"

namespace ugcrank {

ScoreDistribution ScoreDistribution::uniform() {
  ScoreDistribution d;
  d.probs.fill(1.0 / kScoreBins);
  return d;
}

ScoreDistribution ScoreDistribution::one_hot(int score) {
  if (score < 1 || score > kScoreBins) throw ValidationError("one-hot score must be in 1..10");
  ScoreDistribution d;
  d.probs[score - 1] = 1.0;
  return d;
}

void validate(const ScoreDistribution& d) {
  double sum = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("score distribution entry outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-5) {
    throw ContractError("score distribution sums to " + std::to_string(sum) + ", expected 1");
  }
}

double expected_score(const ScoreDistribution& d) {
  validate(d);
  // Extended accumulator: ten bins of 0.1 sum to exactly 5.5 after rounding.
  long double s = 0.0L;
  for (int i = 0; i < kScoreBins; ++i) s += static_cast<long double>(i + 1) * d.probs[i];
  return static_cast<double>(s);
}

// ---------------------------------------------------------------------------
// Analytic extractor

namespace {

struct MeanStd {
  double mean = 0.0, std = 0.0;
};

MeanStd mean_std(std::span<const double> v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(v.size()));
  return r;
}

// Nearest-rank percentile on a sorted sample.
double percentile(const std::vector<double>& sorted, double p) {
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

}  // namespace

std::vector<double> analytic_embedding(const RgbImage& img) {
  if (img.empty()) throw DegenerateInputError("analytic extractor needs a non-empty image");
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = img.pixel_count();

  std::vector<double> r(n), g(n), b(n), luma(n), sat(n), rg(n), yb(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t k = static_cast<std::size_t>(y) * w + x;
      const float* p = img.pixel(x, y);
      r[k] = p[0];
      g[k] = p[1];
      b[k] = p[2];
      luma[k] = luminance(p);
      const double mx = std::max({r[k], g[k], b[k]});
      const double mn = std::min({r[k], g[k], b[k]});
      sat[k] = mx > 0.0 ? (mx - mn) / mx : 0.0;
      rg[k] = r[k] - g[k];
      yb[k] = 0.5 * (r[k] + g[k]) - b[k];
    }
  }

  auto at = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return luma[static_cast<std::size_t>(y) * w + x];
  };
  std::vector<double> lap(n);
  std::size_t edges = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = at(x, y);
      lap[static_cast<std::size_t>(y) * w + x] = at(x + 1, y) + at(x - 1, y) + at(x, y + 1) + at(x, y - 1) - 4.0 * c;
      const double gx = 0.5 * (at(x + 1, y) - at(x - 1, y));
      const double gy = 0.5 * (at(x, y + 1) - at(x, y - 1));
      if (std::sqrt(gx * gx + gy * gy) > 0.1) ++edges;
    }
  }

  constexpr int kBins = 32;
  std::array<std::size_t, kBins> hist{};
  for (double v : luma) ++hist[std::clamp(static_cast<int>(v * kBins), 0, kBins - 1)];
  double entropy = 0.0;
  for (std::size_t c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    entropy -= p * std::log2(p);
  }

  const auto mr = mean_std(r), mg = mean_std(g), mb = mean_std(b), ml = mean_std(luma), ms = mean_std(sat);
  const auto mrg = mean_std(rg), myb = mean_std(yb);
  const double colorfulness = std::sqrt(mrg.std * mrg.std + myb.std * myb.std) +
                              0.3 * std::sqrt(mrg.mean * mrg.mean + myb.mean * myb.mean);
  std::vector<double> sorted = luma;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> e(kAnalyticEmbedDim);
  e[analytic::mean_r] = mr.mean;
  e[analytic::mean_g] = mg.mean;
  e[analytic::mean_b] = mb.mean;
  e[analytic::std_r] = mr.std;
  e[analytic::std_g] = mg.std;
  e[analytic::std_b] = mb.std;
  e[analytic::mean_luma] = ml.mean;
  e[analytic::std_luma] = ml.std;
  const auto mlap = mean_std(lap);
  e[analytic::laplacian_var] = mlap.std * mlap.std;
  e[analytic::colorfulness] = colorfulness;
  e[analytic::edge_density] = static_cast<double>(edges) / static_cast<double>(n);
  e[analytic::luma_entropy] = entropy;
  e[analytic::mean_saturation] = ms.mean;
  e[analytic::std_saturation] = ms.std;
  e[analytic::luma_p2] = percentile(sorted, 2.0);
  e[analytic::luma_p98] = percentile(sorted, 98.0);
  return e;
}

ScoreDistribution analytic_distribution(std::span<const double> e, BackboneRole role) {
  if (e.size() != kAnalyticEmbedDim) throw ContractError("analytic distribution needs a 16-value embedding");
  double q = 0.0;
  if (role == BackboneRole::aesthetic) {
    q = 6.0 * e[analytic::std_luma] + 4.0 * e[analytic::colorfulness] + 2.0 * e[analytic::mean_saturation] +
        0.3 * e[analytic::luma_entropy] - 4.0;
  } else {
    q = 200.0 * e[analytic::laplacian_var] + 3.0 * e[analytic::edge_density] +
        2.0 * (e[analytic::luma_p98] - e[analytic::luma_p2]) - 2.0;
  }
  std::array<double, kScoreBins> logits{};
  for (int i = 0; i < kScoreBins; ++i) {
    const double c = i - 4.5;
    logits[i] = 0.5 * c * q - 0.15 * c * c;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  ScoreDistribution d;
  double sum = 0.0;
  for (int i = 0; i < kScoreBins; ++i) {
    d.probs[i] = std::exp(logits[i] - mx);
    sum += d.probs[i];
  }
  for (double& p : d.probs) p /= sum;
  return d;
}

FeatureExtractor::Output analytic_extract(const RgbImage& img, BackboneRole role) {
  FeatureExtractor::Output out;
  out.embedding = analytic_embedding(img);
  out.distribution = analytic_distribution(out.embedding, role);
  return out;
}

std::string AnalyticExtractor::name() const {
  return role_ == BackboneRole::aesthetic ? "analytic-aesthetic-v1" : "analytic-technical-v1";
}

FeatureExtractor::Output AnalyticExtractor::run(const RgbImage& img) const { return analytic_extract(img, role_); }

// ---------------------------------------------------------------------------

std::string ExtractorPair::identity() const { return aesthetic->name() + "+" + technical->name(); }

ExtractorPair make_extractors(const std::string& spec) {
  if (spec == "analytic") {
    return {std::make_shared<AnalyticExtractor>(BackboneRole::aesthetic),
            std::make_shared<AnalyticExtractor>(BackboneRole::technical)};
  }
  if (spec.rfind("onnx:", 0) == 0) {
    const std::string rest = spec.substr(5);
    const auto comma = rest.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == rest.size()) {
      throw ValidationError("onnx extractor spec must be onnx:PATH_AESTHETIC,PATH_TECHNICAL");
    }
    ExtractorPair pair{make_onnx_extractor(rest.substr(0, comma), BackboneRole::aesthetic),
                       make_onnx_extractor(rest.substr(comma + 1), BackboneRole::technical)};
    check_extractor_contract(*pair.aesthetic);
    check_extractor_contract(*pair.technical);
    if (pair.aesthetic->embed_dim() != pair.technical->embed_dim()) {
      throw ContractError("aesthetic and technical backbones must share an embedding width");
    }
    return pair;
  }
  throw ValidationError("unknown extractor '" + spec + "' (expected analytic or onnx:PATH_A,PATH_T)");
}

void check_extractor_contract(const FeatureExtractor& fx) {
  RgbImage probe(kBackboneInputSize, kBackboneInputSize);
  for (int y = 0; y < probe.height(); ++y) {
    for (int x = 0; x < probe.width(); ++x) {
      float* p = probe.pixel(x, y);
      p[0] = static_cast<float>(x) / (kBackboneInputSize - 1);
      p[1] = static_cast<float>(y) / (kBackboneInputSize - 1);
      p[2] = static_cast<float>((x + y) % 7) / 6.0f;
    }
  }
  const auto a = fx.run(probe);
  const auto b = fx.run(probe);
  if (a.embedding.size() != fx.embed_dim()) {
    throw ContractError(fx.name() + ": embedding has " + std::to_string(a.embedding.size()) +
                        " values, declared " + std::to_string(fx.embed_dim()));
  }
  validate(a.distribution);
  if (a.embedding != b.embedding || a.distribution.probs != b.distribution.probs) {
    throw ContractError(fx.name() + ": output is not deterministic");
  }
}

namespace {

void append_head(std::vector<double>& out, const FeatureExtractor& fx, const FeatureExtractor::Output& o) {
  if (o.embedding.size() != fx.embed_dim()) {
    throw ContractError(fx.name() + ": embedding has " + std::to_string(o.embedding.size()) + " values, declared " +
                        std::to_string(fx.embed_dim()));
  }
  validate(o.distribution);
  out.insert(out.end(), o.embedding.begin(), o.embedding.end());
  out.insert(out.end(), o.distribution.probs.begin(), o.distribution.probs.end());
}

}  // namespace

FeatureVector extract_image(const RgbImage& img, const FeatureExtractor& aesthetic,
                            const FeatureExtractor& technical) {
  if (img.empty()) throw DegenerateInputError("cannot extract features from an empty image");
  const double height = img.height();
  const double width = img.width();
  const RgbImage scaled = kernels::parallel::resize_bilinear(img, kBackboneInputSize, kBackboneInputSize);

  FeatureVector v;
  v.values.reserve(feature_dim(aesthetic.embed_dim()));
  append_head(v.values, aesthetic, aesthetic.run(scaled));
  append_head(v.values, technical, technical.run(scaled));
  v.values.push_back(height);
  v.values.push_back(width);
  v.values.push_back(width / height);
  for (double& x : v.values) {
    if (!std::isfinite(x)) throw ContractError("non-finite feature value");
    x = static_cast<double>(static_cast<float>(x));
  }
  return v;
}

FeatureVector extract(const std::filesystem::path& img_path, const FeatureExtractor& aesthetic,
                      const FeatureExtractor& technical) {
  return extract_image(read_image(img_path), aesthetic, technical);
}

namespace {

ScoreDistribution distribution_at(const FeatureVector& v, std::size_t offset) {
  if (offset + kScoreBins > v.dim()) throw ContractError("feature vector too short for its embedding width");
  ScoreDistribution d;
  std::copy_n(v.values.begin() + static_cast<std::ptrdiff_t>(offset), kScoreBins, d.probs.begin());
  return d;
}

}  // namespace

ScoreDistribution aesthetic_distribution(const FeatureVector& v, std::size_t embed_dim) {
  return distribution_at(v, embed_dim);
}

ScoreDistribution technical_distribution(const FeatureVector& v, std::size_t embed_dim) {
  return distribution_at(v, 2 * embed_dim + kScoreBins);
}

ExtractResult extract_many(std::span<const std::filesystem::path> paths, const ExtractorPair& fx) {
  ExtractResult res;
  res.vectors.resize(paths.size());
  res.errors.resize(paths.size());
  const auto n = static_cast<std::ptrdiff_t>(paths.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      res.vectors[i] = extract(paths[i], *fx.aesthetic, *fx.technical);
    } catch (const std::exception& e) {
      res.errors[i] = e.what();
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

std::vector<double> Normalizer::apply(std::span<const double> v) const {
  std::vector<double> out(v.begin(), v.end());
  apply_inplace(out);
  return out;
}

void Normalizer::apply_inplace(std::span<double> v) const {
  if (v.size() != mean.size()) {
    throw ValidationError("feature dimension " + std::to_string(v.size()) + " does not match normalizer dimension " +
                          std::to_string(mean.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (v[i] - mean[i]) / stddev[i];
}

Normalizer Normalizer::identity(std::size_t dim) {
  Normalizer n;
  n.mean.assign(dim, 0.0);
  n.stddev.assign(dim, 1.0);
  return n;
}

Normalizer fit_normalizer(std::span<const FeatureVector> vectors) {
  if (vectors.size() < 2) throw ValidationError("normalizer needs at least 2 vectors");
  const std::size_t d = vectors.front().dim();
  for (const auto& v : vectors) {
    if (v.dim() != d) throw ValidationError("mixed feature dimensions in normalizer fit");
  }
  Normalizer n;
  n.mean.assign(d, 0.0);
  n.stddev.assign(d, 0.0);
  const double count = static_cast<double>(vectors.size());
  for (const auto& v : vectors)
    for (std::size_t i = 0; i < d; ++i) n.mean[i] += v.values[i];
  for (double& m : n.mean) m /= count;
  for (const auto& v : vectors)
    for (std::size_t i = 0; i < d; ++i) n.stddev[i] += (v.values[i] - n.mean[i]) * (v.values[i] - n.mean[i]);
  for (double& s : n.stddev) s = std::max(std::sqrt(s / count), Normalizer::kStdFloor);
  // A constant coordinate must normalize to exactly 0, which the summed mean
  // does not guarantee.
  for (std::size_t i = 0; i < d; ++i) {
    const double first = vectors.front().values[i];
    const bool constant = std::all_of(vectors.begin(), vectors.end(),
                                      [&](const FeatureVector& v) { return v.values[i] == first; });
    if (constant) {
      n.mean[i] = first;
      n.stddev[i] = Normalizer::kStdFloor;
    }
  }
  return n;
}

FeatureVector apply_normalizer(const FeatureVector& v, const Normalizer& n) { return {n.apply(v.values)}; }

}  // namespace ugcrank
