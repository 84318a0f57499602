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

#include "ugcrank/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "ugcrank/error.hpp"
#include "ugcrank/rng.hpp"

namespace ugcrank {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMapRM = Eigen::Map<const MatrixRM>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

Mlp::Mlp(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw ValidationError("network needs at least an input and an output layer");
  if (dims_.back() != 1) throw ValidationError("network output must be a single unit");
  for (auto d : dims_)
    if (d == 0) throw ValidationError("layer widths must be positive");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(total);
    total += dims_[l + 1] * dims_[l] + dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

double Mlp::evaluate(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw ValidationError("input of dimension " + std::to_string(x.size()) + " for a network expecting " +
                          std::to_string(input_dim()));
  }
  Eigen::VectorXd a = ConstVecMap(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto out = static_cast<Eigen::Index>(dims_[l + 1]);
    const auto in = static_cast<Eigen::Index>(dims_[l]);
    ConstMapRM w(params_.data() + weight_offset(l), out, in);
    ConstVecMap b(params_.data() + bias_offset(l), out);
    Eigen::VectorXd z = w * a + b;
    if (l + 1 < layer_count()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a[0];
}

void Mlp::init_fan_in_uniform(std::uint64_t seed) {
  CounterRng rng(seed);
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(dims_[l]));
    const std::size_t n_w = dims_[l + 1] * dims_[l];
    for (std::size_t i = 0; i < n_w; ++i) params_[weight_offset(l) + i] = rng.uniform(-bound, bound);
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(bias_offset(l)), dims_[l + 1], 0.0);
  }
  round_to_float();
}

void Mlp::round_to_float() {
  for (double& p : params_) p = static_cast<double>(static_cast<float>(p));
}

RankerModel make_model(std::size_t dim, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> dims{dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return {Mlp(std::move(dims)), Normalizer::identity(dim), {}};
}

double forward(const RankerModel& model, std::span<const double> raw) {
  if (raw.size() != model.input_dim()) {
    throw ValidationError("feature dimension " + std::to_string(raw.size()) + " does not match model input " +
                          std::to_string(model.input_dim()));
  }
  const double s = model.net.evaluate(model.normalizer.apply(raw));
  if (!std::isfinite(s)) throw NumericError("non-finite score");
  return s;
}

std::vector<double> forward_batch(const RankerModel& model, std::span<const FeatureVector> xs) {
  for (const auto& x : xs) {
    if (x.dim() != model.input_dim()) {
      throw ValidationError("feature dimension " + std::to_string(x.dim()) + " does not match model input " +
                            std::to_string(model.input_dim()));
    }
  }
  std::vector<double> out(xs.size());
  std::vector<int> bad(xs.size(), 0);
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = model.net.evaluate(model.normalizer.apply(xs[i].values));
    bad[i] = !std::isfinite(out[i]);
  }
  for (std::size_t i = 0; i < bad.size(); ++i)
    if (bad[i]) throw NumericError("non-finite score for input " + std::to_string(i));
  return out;
}

double hinge_pair_loss(double s_i, double s_j, double y_i, double y_j, double margin) {
  const double delta = y_i >= y_j ? 1.0 : -1.0;
  return std::max(0.0, margin - delta * (s_i - s_j));
}

GradientResult backward(const RankerModel& model, std::span<const TrainingPair> batch, double margin,
                        double weight_decay) {
  if (batch.empty()) throw ValidationError("backward needs a non-empty batch");
  const Mlp& net = model.net;
  const auto n = static_cast<Eigen::Index>(batch.size());
  const auto d = static_cast<Eigen::Index>(net.input_dim());

  // Rows 0..n-1 hold positives, n..2n-1 negatives; one pass through shared
  // weights scores both sides of every pair.
  MatrixRM a0(2 * n, d);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = batch[static_cast<std::size_t>(k)];
    if (p.pos.dim() != net.input_dim() || p.neg.dim() != net.input_dim()) {
      throw ValidationError("pair feature dimension does not match model input");
    }
    const auto xp = model.normalizer.apply(p.pos.values);
    const auto xn = model.normalizer.apply(p.neg.values);
    a0.row(k) = ConstVecMap(xp.data(), d).transpose();
    a0.row(n + k) = ConstVecMap(xn.data(), d).transpose();
  }

  const std::size_t layers = net.layer_count();
  std::vector<MatrixRM> acts;  // acts[l] = input to layer l
  std::vector<MatrixRM> pre;   // pre-activations of layer l
  acts.reserve(layers + 1);
  pre.reserve(layers);
  acts.push_back(std::move(a0));
  const auto& params = net.params();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto out = static_cast<Eigen::Index>(net.dims()[l + 1]);
    const auto in = static_cast<Eigen::Index>(net.dims()[l]);
    ConstMapRM w(params.data() + net.weight_offset(l), out, in);
    ConstVecMap b(params.data() + net.bias_offset(l), out);
    MatrixRM z = acts.back() * w.transpose();
    z.rowwise() += b.transpose();
    pre.push_back(z);
    if (l + 1 < layers) {
      acts.push_back(z.cwiseMax(0.0));
    }
  }
  const MatrixRM& scores = pre.back();  // 2n x 1

  GradientResult res;
  res.grad.assign(params.size(), 0.0);
  MatrixRM g = MatrixRM::Zero(2 * n, 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double l = hinge_pair_loss(scores(k, 0), scores(n + k, 0), 1.0, 0.0, margin);
    if (l > 0.0) {
      loss += l;
      g(k, 0) = -inv_n;
      g(n + k, 0) = inv_n;
      ++res.active_pairs;
    }
  }
  res.hinge_loss = loss * inv_n;

  for (std::size_t li = layers; li-- > 0;) {
    const auto out = static_cast<Eigen::Index>(net.dims()[li + 1]);
    const auto in = static_cast<Eigen::Index>(net.dims()[li]);
    Eigen::Map<MatrixRM> dw(res.grad.data() + net.weight_offset(li), out, in);
    Eigen::Map<Eigen::VectorXd> db(res.grad.data() + net.bias_offset(li), out);
    dw.noalias() = g.transpose() * acts[li];
    db = g.colwise().sum().transpose();
    if (li > 0) {
      ConstMapRM w(params.data() + net.weight_offset(li), out, in);
      MatrixRM prev = g * w;
      g = prev.cwiseProduct((pre[li - 1].array() > 0.0).cast<double>().matrix());
    }
  }

  double sq = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    res.grad[i] += weight_decay * params[i];
    sq += params[i] * params[i];
  }
  res.objective = res.hinge_loss + 0.5 * weight_decay * sq;

  for (std::size_t l = 0; l < layers; ++l) {
    const auto begin = res.grad.begin() + static_cast<std::ptrdiff_t>(net.weight_offset(l));
    const auto end = res.grad.begin() + static_cast<std::ptrdiff_t>(net.bias_offset(l) + net.dims()[l + 1]);
    if (!std::all_of(begin, end, [](double v) { return std::isfinite(v); })) {
      throw NumericError("non-finite gradient in layer " + std::to_string(l));
    }
  }
  return res;
}

void Adam::step(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw ValidationError("optimizer state size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.margin > 0.0)) throw ValidationError("margin must be > 0");
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) throw ValidationError("learning rate must be > 0");
  if (!(cfg.weight_decay >= 0.0)) throw ValidationError("weight decay must be >= 0");
  if (cfg.batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (cfg.max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
  if (cfg.patience < 1) throw ValidationError("scheduler patience must be >= 1");
  if (!(cfg.lr_factor > 0.0 && cfg.lr_factor <= 1.0)) throw ValidationError("lr factor must be in (0, 1]");
}

double triple_accuracy(const RankerModel& model, std::span<const ValTriple> triples) {
  if (triples.empty()) throw ValidationError("validation needs at least one triple");
  std::vector<FeatureVector> xs;
  xs.reserve(3 * triples.size());
  for (const auto& t : triples) {
    xs.push_back(t.studio);
    xs.push_back(t.good);
    xs.push_back(t.bad);
  }
  const auto s = forward_batch(model, xs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const double studio = s[3 * i], good = s[3 * i + 1], bad = s[3 * i + 2];
    correct += (studio > good) + (studio > bad) + (good > bad);
  }
  return static_cast<double>(correct) / static_cast<double>(3 * triples.size());
}

namespace {

double mean_hinge(const RankerModel& model, std::span<const TrainingPair> pairs, double margin) {
  std::vector<FeatureVector> xs;
  xs.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    xs.push_back(p.pos);
    xs.push_back(p.neg);
  }
  const auto s = forward_batch(model, xs);
  double loss = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) loss += hinge_pair_loss(s[2 * k], s[2 * k + 1], 1.0, 0.0, margin);
  return loss / static_cast<double>(pairs.size());
}

}  // namespace

TrainResult train(std::span<const TrainingPair> pairs, std::span<const ValTriple> val, const TrainConfig& cfg,
                  const Normalizer* normalizer, const std::string& extractor) {
  validate(cfg);
  if (pairs.empty()) throw ValidationError("training needs at least one pair");
  if (val.empty()) throw ValidationError("training needs at least one validation triple");
  const std::size_t dim = pairs.front().pos.dim();

  RankerModel model = make_model(dim, cfg.hidden);
  model.extractor = extractor;
  if (normalizer) {
    if (normalizer->dim() != dim) throw ValidationError("normalizer dimension does not match features");
    model.normalizer = *normalizer;
  } else {
    std::vector<FeatureVector> all;
    all.reserve(2 * pairs.size());
    for (const auto& p : pairs) {
      all.push_back(p.pos);
      all.push_back(p.neg);
    }
    model.normalizer = fit_normalizer(all);
  }

  CounterRng rng(cfg.seed);
  model.net.init_fan_in_uniform(rng.fork());

  TrainResult res;
  res.initial_loss = mean_hinge(model, pairs, cfg.margin);
  res.best = model;
  res.best_val_accuracy = -1.0;

  Adam adam(model.net.params().size(), cfg.adam);
  RankerModel snapshot = model;
  std::vector<std::size_t> order(pairs.size());
  std::vector<TrainingPair> batch;
  double lr = cfg.lr;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng shuffle(rng.fork());
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(pairs[order[i]]);
      GradientResult g;
      try {
        g = backward(model, batch, cfg.margin, cfg.weight_decay);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index) + ": " +
                           e.what());
      }
      if (!std::isfinite(g.hinge_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      epoch_loss += g.hinge_loss * static_cast<double>(end - start);
      adam.step(model.net.params(), g.grad, lr);
    }
    epoch_loss /= static_cast<double>(pairs.size());

    snapshot.net = model.net;
    snapshot.net.round_to_float();
    const double acc = triple_accuracy(snapshot, val);
    res.history.push_back({epoch, epoch_loss, acc, lr});

    if (acc > res.best_val_accuracy) {
      res.best_val_accuracy = acc;
      res.best_epoch = epoch;
      res.best = snapshot;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      lr *= cfg.lr_factor;
      since_best = 0;
    }
  }
  return res;
}

std::string history_line(const EpochRecord& r) {
  nlohmann::json j = {{"epoch", r.epoch}, {"loss", r.loss}, {"val_accuracy", r.val_accuracy}, {"lr", r.lr}};
  return j.dump();
}

std::optional<std::string> extractor_mismatch(const RankerModel& model, const std::string& identity) {
  if (model.extractor == identity) return std::nullopt;
  return "checkpoint was trained with extractor '" + model.extractor + "' but '" + identity + "' is in use";
}

ScoreReport score_images(const RankerModel& model, const ExtractorPair& fx,
                         std::span<const std::filesystem::path> paths, bool allow_mismatch) {
  if (auto warn = extractor_mismatch(model, fx.identity()); warn && !allow_mismatch) throw ContractError(*warn);
  if (fx.dim() != model.input_dim()) {
    throw ContractError("extractors produce " + std::to_string(fx.dim()) + " features, model expects " +
                        std::to_string(model.input_dim()));
  }
  const auto ex = extract_many(paths, fx);
  ScoreReport rep;
  std::vector<FeatureVector> ok;
  std::vector<std::string> ok_paths;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!ex.errors[i].empty()) {
      rep.errors.emplace_back(paths[i].string(), ex.errors[i]);
    } else {
      ok.push_back(ex.vectors[i]);
      ok_paths.push_back(paths[i].string());
    }
  }
  const auto s = forward_batch(model, ok);
  for (std::size_t i = 0; i < ok.size(); ++i) rep.ranked.push_back({ok_paths[i], s[i]});
  std::stable_sort(rep.ranked.begin(), rep.ranked.end(), [](const ScoredImage& a, const ScoredImage& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.path < b.path;
  });
  return rep;
}

}  // namespace ugcrank
