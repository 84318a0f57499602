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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ugcrank/features.hpp"

namespace ugcrank {

inline const std::vector<std::size_t> kDefaultHiddenDims = {512, 256, 128};

// Fully connected ReLU network ending in one linear output unit. Parameters
// are stored flat, layer by layer: W (out x in, row-major) then b (out).
class Mlp {
 public:
  Mlp() = default;
  // dims = {input, hidden..., 1}. All parameters start at zero.
  explicit Mlp(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t input_dim() const noexcept { return dims_.front(); }
  std::size_t layer_count() const noexcept { return dims_.size() - 1; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + dims_[layer + 1] * dims_[layer]; }

  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }

  // Score of an already-normalized input.
  double evaluate(std::span<const double> x) const;

  // Uniform(-sqrt(6/fan_in), +sqrt(6/fan_in)) weights, zero biases.
  void init_fan_in_uniform(std::uint64_t seed);
  // Round every parameter to the nearest float, the checkpoint precision.
  void round_to_float();

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

struct RankerModel {
  Mlp net;
  Normalizer normalizer;
  std::string extractor;  // ExtractorPair::identity() the model was trained on

  std::size_t input_dim() const noexcept { return net.input_dim(); }
};

// dims {dim, hidden..., 1}, identity normalizer, zero parameters.
RankerModel make_model(std::size_t dim, const std::vector<std::size_t>& hidden = kDefaultHiddenDims);

// Normalizes internally. Throws ValidationError on a dimension mismatch and
// NumericError on a non-finite score.
double forward(const RankerModel& model, std::span<const double> raw_features);
inline double forward(const RankerModel& model, const FeatureVector& x) { return forward(model, x.values); }

// Parallel over inputs; each score is identical to forward() on its own.
std::vector<double> forward_batch(const RankerModel& model, std::span<const FeatureVector> xs);

// max(0, m - delta * (s_i - s_j)) with delta = +1 if y_i >= y_j else -1.
double hinge_pair_loss(double s_i, double s_j, double y_i, double y_j, double margin);

struct TrainingPair {
  FeatureVector pos;
  FeatureVector neg;
};

struct GradientResult {
  double hinge_loss = 0.0;  // mean over pairs
  double objective = 0.0;   // hinge_loss + 0.5 * lambda * |theta|^2
  std::vector<double> grad; // d objective / d theta, laid out like Mlp::params()
  std::size_t active_pairs = 0;
};

// Exact gradient of the mean hinge loss over the batch plus lambda * theta.
// Pairs that already clear the margin contribute nothing. Throws
// NumericError naming the layer if a gradient entry is non-finite.
GradientResult backward(const RankerModel& model, std::span<const TrainingPair> batch, double margin,
                        double weight_decay);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n_params, AdamConfig cfg = {}) : cfg_(cfg), m_(n_params, 0.0), v_(n_params, 0.0) {}
  void step(std::span<double> params, std::span<const double> grad, double lr);
  std::int64_t steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
};

struct TrainConfig {
  double margin = 1.0;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  std::size_t batch_size = 16;
  int max_epochs = 50;
  int patience = 5;          // epochs without val improvement before the lr is cut
  double lr_factor = 0.5;
  AdamConfig adam{};
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden = kDefaultHiddenDims;
};

// Throws ValidationError for m <= 0, lr <= 0, batch_size < 1, max_epochs < 1.
void validate(const TrainConfig& cfg);

struct ValTriple {
  FeatureVector studio;
  FeatureVector good;
  FeatureVector bad;
};

// Fraction of the ordered pairs studio > good, studio > bad, good > bad that
// the model scores strictly in that order.
double triple_accuracy(const RankerModel& model, std::span<const ValTriple> triples);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double val_accuracy = 0.0;
  double lr = 0.0;  // rate used during this epoch

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  RankerModel best;
  std::vector<EpochRecord> history;
  double initial_loss = 0.0;  // mean hinge loss before the first update
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
};

// ADAM over seeded shuffles of the pairs. After every epoch the
// float-rounded parameters are scored on the validation triples; the best
// snapshot is kept and the lr is multiplied by lr_factor after `patience`
// epochs in a row without improvement. Without a normalizer one is fitted
// on the pair features. The returned model is float-exact, so it survives a
// checkpoint round trip unchanged.
TrainResult train(std::span<const TrainingPair> pairs, std::span<const ValTriple> val, const TrainConfig& cfg,
                  const Normalizer* normalizer = nullptr, const std::string& extractor = {});

std::string history_line(const EpochRecord& r);

// Checkpoint layout, little-endian:
//   "RNKR" | u16 version | u32 len + extractor name (UTF-8) | u32 D |
//   u32 n_dims | n_dims x u32 layer dims | D x f64 mean | D x f64 std |
//   per layer: W as f32 (row-major), b as f32 | u32 CRC-32 of all prior bytes
void save_checkpoint(const RankerModel& model, const std::filesystem::path& path);
// Throws IoError if unreadable and ParseError with a description of the
// first problem found; never returns a partial model.
RankerModel load_checkpoint(const std::filesystem::path& path);

// Warning text when the checkpoint was trained on different extractors.
std::optional<std::string> extractor_mismatch(const RankerModel& model, const std::string& extractor_identity);

struct ScoredImage {
  std::string path;
  double score = 0.0;
};

struct ScoreReport {
  std::vector<ScoredImage> ranked;  // descending score, ties by path
  std::vector<std::pair<std::string, std::string>> errors;  // (path, message)
};

// Throws ContractError when the extractors differ from the model's unless
// allow_mismatch is set.
ScoreReport score_images(const RankerModel& model, const ExtractorPair& fx,
                         std::span<const std::filesystem::path> paths, bool allow_mismatch = false);

}  // namespace ugcrank
