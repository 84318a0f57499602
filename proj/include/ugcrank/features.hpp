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
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ugcrank/image.hpp"

namespace ugcrank {

inline constexpr int kScoreBins = 10;
inline constexpr int kBackboneInputSize = 224;
inline constexpr int kGeometryDims = 3;

// probs[i] = Pr(score = i + 1).
struct ScoreDistribution {
  std::array<double, kScoreBins> probs{};

  static ScoreDistribution uniform();
  static ScoreDistribution one_hot(int score);  // score in 1..10
};

// Throws ContractError unless every entry is in [0,1] and they sum to 1
// within 1e-5.
void validate(const ScoreDistribution& d);

// Sum over i of (i + 1) * probs[i]; in [1, 10].
double expected_score(const ScoreDistribution& d);

// [aesthetic embedding | aesthetic dist | technical embedding | technical
//  dist | original height | original width | width / height]
struct FeatureVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::size_t feature_dim(std::size_t embed_dim) noexcept {
  return 2 * (embed_dim + kScoreBins) + kGeometryDims;
}

enum class BackboneRole { aesthetic, technical };

// A backbone that maps a 224x224 image to an embedding and a 10-bin score
// distribution. run() must be deterministic and safe to call concurrently.
class FeatureExtractor {
 public:
  struct Output {
    std::vector<double> embedding;
    ScoreDistribution distribution;
  };

  virtual ~FeatureExtractor() = default;
  virtual std::string name() const = 0;
  virtual std::size_t embed_dim() const = 0;
  virtual Output run(const RgbImage& img) const = 0;
};

// Hand-crafted statistics, no model files needed.
//
// Embedding (16): mean R,G,B; std R,G,B; mean and std of luma; variance of
// the 4-neighbour Laplacian of luma; Hasler-Suesstrunk colourfulness;
// fraction of pixels with central-difference gradient magnitude > 0.1;
// entropy (bits) of a 32-bin luma histogram; mean and std of HSV
// saturation; 2nd and 98th luma percentiles.
//
// Distribution: softmax of logit_i = 0.5 (i - 4.5) q - 0.15 (i - 4.5)^2,
// i = 0..9, where q = a . embedding + a0 is a role-specific quality index.
// Each logit is an affine function of the embedding.
//   aesthetic: q = 6 std(luma) + 4 colourfulness + 2 mean(sat) + 0.3 entropy - 4
//   technical: q = 200 var(laplacian) + 3 edge_density + 2 (p98 - p2) - 2
inline constexpr std::size_t kAnalyticEmbedDim = 16;

namespace analytic {
enum Index : std::size_t {
  mean_r, mean_g, mean_b, std_r, std_g, std_b, mean_luma, std_luma,
  laplacian_var, colorfulness, edge_density, luma_entropy,
  mean_saturation, std_saturation, luma_p2, luma_p98,
};
}  // namespace analytic

std::vector<double> analytic_embedding(const RgbImage& img);
ScoreDistribution analytic_distribution(std::span<const double> embedding, BackboneRole role);
FeatureExtractor::Output analytic_extract(const RgbImage& img, BackboneRole role = BackboneRole::aesthetic);

class AnalyticExtractor final : public FeatureExtractor {
 public:
  explicit AnalyticExtractor(BackboneRole role) : role_(role) {}
  std::string name() const override;
  std::size_t embed_dim() const override { return kAnalyticEmbedDim; }
  Output run(const RgbImage& img) const override;

 private:
  BackboneRole role_;
};

struct ExtractorPair {
  std::shared_ptr<const FeatureExtractor> aesthetic;
  std::shared_ptr<const FeatureExtractor> technical;

  // Stored in checkpoints and feature stores.
  std::string identity() const;
  std::size_t dim() const { return feature_dim(aesthetic->embed_dim()); }
};

// "analytic" or "onnx:PATH_A,PATH_T". Throws ValidationError for an unknown
// spec and ContractError if a loaded model fails the probe checks.
ExtractorPair make_extractors(const std::string& spec);

// Runs the extractor twice on a probe image; throws ContractError on a
// length mismatch, an invalid distribution or non-deterministic output.
void check_extractor_contract(const FeatureExtractor& fx);

// Geometry is recorded before the rescale to 224x224. Values are rounded to
// float precision so they survive the feature store unchanged.
FeatureVector extract_image(const RgbImage& img, const FeatureExtractor& aesthetic,
                            const FeatureExtractor& technical);
FeatureVector extract(const std::filesystem::path& img_path, const FeatureExtractor& aesthetic,
                      const FeatureExtractor& technical);

// Both distributions of a feature vector, used by the expected-score
// baselines.
ScoreDistribution aesthetic_distribution(const FeatureVector& v, std::size_t embed_dim);
ScoreDistribution technical_distribution(const FeatureVector& v, std::size_t embed_dim);

struct ExtractResult {
  std::vector<FeatureVector> vectors;  // empty vector where errors[i] is set
  std::vector<std::string> errors;
};

// Parallel over images; output order matches input order.
ExtractResult extract_many(std::span<const std::filesystem::path> paths, const ExtractorPair& fx);

// Per-coordinate z-score. Zero (or tiny) deviations are floored at 1e-8.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static constexpr double kStdFloor = 1e-8;

  std::size_t dim() const noexcept { return mean.size(); }
  std::vector<double> apply(std::span<const double> v) const;
  void apply_inplace(std::span<double> v) const;

  static Normalizer identity(std::size_t dim);
};

Normalizer fit_normalizer(std::span<const FeatureVector> vectors);
FeatureVector apply_normalizer(const FeatureVector& v, const Normalizer& n);

}  // namespace ugcrank
