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
#include <fstream>

#include "test_util.hpp"
#include "ugcrank/error.hpp"
#include "ugcrank/image_io.hpp"
#include "ugcrank/ranker.hpp"

using namespace ugcrank;
namespace fs = std::filesystem;

namespace {

FeatureVector random_vec(CounterRng& rng, std::size_t d, double scale = 1.0) {
  FeatureVector v;
  v.values.resize(d);
  for (double& x : v.values) x = scale * rng.uniform(-1, 1);
  return v;
}

std::vector<TrainingPair> random_batch(CounterRng& rng, std::size_t d, std::size_t n) {
  std::vector<TrainingPair> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back({random_vec(rng, d), random_vec(rng, d)});
  return b;
}

RankerModel random_model(CounterRng& rng, std::size_t d, std::vector<std::size_t> hidden) {
  auto m = make_model(d, hidden);
  m.net.init_fan_in_uniform(rng.next_u64());
  for (std::size_t l = 0; l < m.net.layer_count(); ++l)
    for (std::size_t i = 0; i < m.net.dims()[l + 1]; ++i) m.net.params()[m.net.bias_offset(l) + i] = rng.uniform(-0.5, 0.5);
  for (std::size_t i = 0; i < d; ++i) {
    m.normalizer.mean[i] = rng.uniform(-0.2, 0.2);
    m.normalizer.stddev[i] = rng.uniform(0.5, 2.0);
  }
  return m;
}

double objective(const RankerModel& m, const std::vector<TrainingPair>& b, double margin, double lambda) {
  double loss = 0;
  for (const auto& p : b) loss += hinge_pair_loss(forward(m, p.pos), forward(m, p.neg), 1, 0, margin);
  loss /= static_cast<double>(b.size());
  double sq = 0;
  for (double t : m.net.params()) sq += t * t;
  return loss + 0.5 * lambda * sq;
}

std::vector<TrainingPair> separable_pairs() {
  std::vector<TrainingPair> pairs;
  CounterRng rng(5);
  for (int i = 0; i < 64; ++i) {
    FeatureVector pos, neg;
    for (int k = 0; k < 8; ++k) {
      pos.values.push_back(1.0 + 0.1 * rng.uniform(-1, 1));
      neg.values.push_back(-1.0 + 0.1 * rng.uniform(-1, 1));
    }
    pairs.push_back({pos, neg});
  }
  return pairs;
}

std::vector<ValTriple> separable_val() {
  std::vector<ValTriple> v;
  for (int i = 0; i < 8; ++i)
    v.push_back({{std::vector<double>(8, 1.0)}, {std::vector<double>(8, 0.0)}, {std::vector<double>(8, -1.0)}});
  return v;
}

}  // namespace

TEST_CASE("zero model scores zero") {
  const auto m = make_model(5);
  CHECK(forward(m, std::vector<double>{1, 2, 3, 4, 5}) == 0.0);
  CHECK(m.net.dims() == std::vector<std::size_t>{5, 512, 256, 128, 1});
}

TEST_CASE("hand-computed 2-unit network") {
  // x = (1, -2); hidden h = relu(W1 x + b1) with W1 = [[1, 0.5], [-1, 2]],
  // b1 = (0.25, 0.5) -> (0.25, 0) ; out = 2 h0 - 3 h1 + 0.1 = 0.6.
  auto m = make_model(2, {2});
  auto& p = m.net.params();
  const std::vector<double> w1 = {1, 0.5, -1, 2}, b1 = {0.25, 0.5}, w2 = {2, -3}, b2 = {0.1};
  std::copy(w1.begin(), w1.end(), p.begin() + static_cast<long>(m.net.weight_offset(0)));
  std::copy(b1.begin(), b1.end(), p.begin() + static_cast<long>(m.net.bias_offset(0)));
  std::copy(w2.begin(), w2.end(), p.begin() + static_cast<long>(m.net.weight_offset(1)));
  std::copy(b2.begin(), b2.end(), p.begin() + static_cast<long>(m.net.bias_offset(1)));
  CHECK(forward(m, std::vector<double>{1, -2}) == doctest::Approx(0.6).epsilon(1e-12));
  // Normalization happens inside forward: raw (3, 0) with mean (1, 2), std (2, 1) is (1, -2).
  m.normalizer.mean = {1, 2};
  m.normalizer.stddev = {2, 1};
  CHECK(forward(m, std::vector<double>{3, 0}) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("forward errors") {
  auto m = make_model(3, {4});
  CHECK_THROWS_AS(forward(m, std::vector<double>{1, 2}), ValidationError);
  m.net.params()[m.net.bias_offset(1)] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(forward(m, std::vector<double>{1, 2, 3}), NumericError);
  CHECK_THROWS_AS(Mlp({3, 4, 2}), ValidationError);
}

TEST_CASE("forward_batch equals forward") {
  CounterRng rng(2);
  const auto m = random_model(rng, 10, {16, 8});
  std::vector<FeatureVector> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(random_vec(rng, 10));
  const auto s = forward_batch(m, xs);
  for (int i = 0; i < 50; ++i) CHECK(s[i] == forward(m, xs[i]));
}

TEST_CASE("hinge loss values") {
  CHECK(hinge_pair_loss(2.0, 0.5, 1, 0, 1.0) == 0.0);
  CHECK(hinge_pair_loss(0.7, 0.5, 1, 0, 1.0) == doctest::Approx(0.8));
  CHECK(hinge_pair_loss(0.3, 0.3, 1, 0, 1.0) == 1.0);
  // Reversed labels flip the sign of the difference.
  CHECK(hinge_pair_loss(0.5, 0.7, 0, 1, 1.0) == doctest::Approx(0.8));
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3), m = rng.uniform(0.1, 2);
    const double l = hinge_pair_loss(a, b, 1, 0, m);
    CHECK(l >= 0.0);
    CHECK((l == 0.0) == (a - b >= m));
  }
}

TEST_CASE("gradient matches central differences") {
  CounterRng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 4 + rng.below(13);
    const auto m = random_model(rng, d, {6, 5, 4});
    const auto batch = random_batch(rng, d, 4);
    const double lambda = 5e-4;
    const auto g = backward(m, batch, 1.0, lambda);
    CHECK(g.objective == doctest::Approx(objective(m, batch, 1.0, lambda)).epsilon(1e-12));
    double max_rel = 0;
    for (std::size_t i = 0; i < m.net.params().size(); ++i) {
      auto mp = m, mm = m;
      // A small step keeps ReLU and hinge kinks out of the stencil.
      mp.net.params()[i] += 1e-6;
      mm.net.params()[i] -= 1e-6;
      const double num = (objective(mp, batch, 1.0, lambda) - objective(mm, batch, 1.0, lambda)) / 2e-6;
      const double rel = std::abs(num - g.grad[i]) / std::max(1.0, std::abs(num) + std::abs(g.grad[i]));
      max_rel = std::max(max_rel, rel);
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("satisfied margins leave only the weight-decay term") {
  auto m = make_model(2, {3});
  CounterRng rng(6);
  m.net.init_fan_in_uniform(3);
  // Output bias does not depend on x, so push scores apart through a huge
  // first-layer weight on a coordinate that separates pos from neg.
  std::vector<TrainingPair> b = {{{{1.0, 0.0}}, {{-1.0, 0.0}}}};
  const auto s_pos = forward(m, b[0].pos), s_neg = forward(m, b[0].neg);
  const double margin = std::abs(s_pos - s_neg) * 0.5;
  if (s_pos < s_neg) std::swap(b[0].pos, b[0].neg);
  const auto g = backward(m, b, margin, 0.01);
  CHECK(g.active_pairs == 0);
  CHECK(g.hinge_loss == 0.0);
  for (std::size_t i = 0; i < g.grad.size(); ++i) CHECK(g.grad[i] == doctest::Approx(0.01 * m.net.params()[i]));
}

TEST_CASE("zero model, no decay: only the output bias path... and it cancels") {
  // With all parameters zero both scores are 0, every pair is active, and
  // d/d b_out = mean(-1 + 1) = 0; every hidden unit is dead, so the whole
  // gradient is zero.
  const auto m = make_model(3, {4});
  CounterRng rng(8);
  const auto g = backward(m, random_batch(rng, 3, 5), 1.0, 0.0);
  CHECK(g.active_pairs == 5);
  CHECK(g.hinge_loss == 1.0);
  for (double x : g.grad) CHECK(std::abs(x) < 1e-15);
}

TEST_CASE("single pair through a linear model: gradient is x_neg - x_pos") {
  auto m = make_model(3, {});
  const std::vector<TrainingPair> b = {{{{1.0, 2.0, 3.0}}, {{0.5, -1.0, 4.0}}}};
  const auto g = backward(m, b, 1.0, 0.0);
  CHECK(g.grad[0] == doctest::Approx(-0.5));
  CHECK(g.grad[1] == doctest::Approx(-3.0));
  CHECK(g.grad[2] == doctest::Approx(1.0));
  CHECK(g.grad[3] == 0.0);
}

TEST_CASE("non-finite gradients name the layer") {
  auto m = make_model(2, {2});
  m.net.params()[m.net.weight_offset(1)] = std::numeric_limits<double>::quiet_NaN();
  try {
    backward(m, std::vector<TrainingPair>{{{{1.0, 1.0}}, {{0.0, 0.0}}}}, 1.0, 0.0);
    FAIL("expected a NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("layer") != std::string::npos);
  }
  CHECK_THROWS_AS(backward(m, std::vector<TrainingPair>{}, 1.0, 0.0), ValidationError);
}

TEST_CASE("adam: first step moves each parameter by about lr against the gradient sign") {
  Adam opt(3);
  std::vector<double> p = {1.0, -1.0, 0.0};
  opt.step(p, std::vector<double>{2.0, -0.5, 0.0}, 0.1);
  CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(-0.9).epsilon(1e-6));
  CHECK(p[2] == 0.0);
  CHECK(opt.steps() == 1);
}

TEST_CASE("satisfied margin and no decay: a step is a fixed point up to eps") {
  auto m = make_model(2, {});
  m.net.params() = {5.0, 0.0, 0.0};
  const std::vector<TrainingPair> b = {{{{1.0, 0.0}}, {{-1.0, 0.0}}}};
  const auto g = backward(m, b, 1.0, 0.0);
  auto params = m.net.params();
  Adam opt(params.size());
  opt.step(params, g.grad, 1e-3);
  for (std::size_t i = 0; i < params.size(); ++i) CHECK(std::abs(params[i] - m.net.params()[i]) <= 1e-3 * 1e-7);
}

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK_NOTHROW(validate(c));
  auto bad = c;
  bad.lr = 0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = c;
  bad.margin = -1;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = c;
  bad.batch_size = 0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = c;
  bad.max_epochs = 0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  const auto pairs = separable_pairs();
  CHECK_THROWS_AS(train(pairs, separable_val(), bad), ValidationError);
  CHECK_THROWS_AS(train(std::vector<TrainingPair>{}, separable_val(), c), ValidationError);
  CHECK_THROWS_AS(train(pairs, std::vector<ValTriple>{}, c), ValidationError);
}

TEST_CASE("separable toy: perfect validation within 20 epochs, deterministic") {
  TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.seed = 11;
  cfg.hidden = {32, 16, 8};
  const auto pairs = separable_pairs();
  const auto val = separable_val();
  const auto r1 = train(pairs, val, cfg);
  CHECK(r1.best_val_accuracy == 1.0);
  CHECK(r1.history.size() == 20);
  const auto r2 = train(pairs, val, cfg);
  CHECK(r1.history == r2.history);
  CHECK(r1.best.net == r2.best.net);
  CHECK(r1.history.back().loss <= r1.initial_loss);
  for (const auto& p : pairs) CHECK(forward(r1.best, p.pos) > forward(r1.best, p.neg));
}

TEST_CASE("lr schedule only halves, and only after a plateau") {
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.hidden = {8};
  cfg.patience = 2;
  const auto r = train(separable_pairs(), separable_val(), cfg);
  CHECK(r.history.front().lr == cfg.lr);
  int since = 0;
  double best = -1;
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    const double prev = r.history[i - 1].lr, cur = r.history[i].lr;
    CHECK((cur == prev || cur == prev * 0.5));
    if (r.history[i - 1].val_accuracy > best) {
      best = r.history[i - 1].val_accuracy;
      since = 0;
    } else {
      ++since;
    }
    if (cur != prev) {
      CHECK(since == cfg.patience);
      since = 0;
    }
  }
}

TEST_CASE("loss at scheduler-window granularity does not rise above the start") {
  TrainConfig cfg;
  cfg.max_epochs = 25;
  cfg.hidden = {16, 8};
  const auto r = train(separable_pairs(), separable_val(), cfg);
  for (std::size_t end = static_cast<std::size_t>(cfg.patience); end <= r.history.size(); end += cfg.patience)
    CHECK(r.history[end - 1].loss <= r.initial_loss);
}

TEST_CASE("history lines are structured") {
  const auto s = history_line({3, 0.25, 0.5, 1e-3});
  CHECK(s.find("\"epoch\":3") != std::string::npos);
  CHECK(s.find("\"val_accuracy\":0.5") != std::string::npos);
  CHECK(s.find("\"lr\":0.001") != std::string::npos);
}

TEST_CASE("checkpoint round trip is score-exact") {
  testutil::TempDir dir("ckpt");
  CounterRng rng(3);
  auto m = random_model(rng, 12, {9, 5});
  m.net.round_to_float();
  m.extractor = "analytic-aesthetic-v1+analytic-technical-v1";
  save_checkpoint(m, dir / "m.rnkr");
  const auto back = load_checkpoint(dir / "m.rnkr");
  CHECK(back.net == m.net);
  CHECK(back.normalizer.mean == m.normalizer.mean);
  CHECK(back.extractor == m.extractor);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_vec(rng, 12, 3.0);
    CHECK(forward(back, x) == forward(m, x));
  }
  CHECK_FALSE(extractor_mismatch(back, m.extractor).has_value());
  CHECK(extractor_mismatch(back, "other").has_value());
}

TEST_CASE("corrupt checkpoints are rejected with a reason") {
  testutil::TempDir dir("ckbad");
  auto m = make_model(4, {3});
  m.net.init_fan_in_uniform(1);
  save_checkpoint(m, dir / "m.rnkr");
  std::string bytes;
  {
    std::ifstream in(dir / "m.rnkr", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto reject = [&](const std::string& data, const std::string& needle) {
    { std::ofstream(dir / "x.rnkr", std::ios::binary | std::ios::trunc) << data; }
    try {
      load_checkpoint(dir / "x.rnkr");
      FAIL("accepted a corrupt checkpoint: " << needle);
    } catch (const ParseError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  reject("", "magic");
  reject("XNKR" + bytes.substr(4), "magic");
  auto ver = bytes;
  ver[4] = 9;
  reject(ver, "version");
  reject(bytes.substr(0, bytes.size() / 2), "truncated");
  reject(bytes + "x", "trailing");
  auto flip = bytes;
  flip[flip.size() - 10] ^= 0x40;
  reject(flip, "checksum");
  CHECK_THROWS_AS(load_checkpoint(dir / "none.rnkr"), IoError);
}

TEST_CASE("score_images ranks, breaks ties by path, collects errors") {
  testutil::TempDir dir("score");
  const auto fx = make_extractors("analytic");
  CounterRng rng(4);
  auto m = random_model(rng, 55, {8});
  m.normalizer = Normalizer::identity(55);
  m.extractor = fx.identity();
  const auto img = testutil::random_image(30, 20, 5);
  write_png(dir / "b.png", img);
  write_png(dir / "a.png", img);
  write_png(dir / "c.png", RgbImage(30, 20, 0.5f));
  const std::vector<fs::path> one = {dir / "a.png"};
  CHECK(score_images(m, fx, one).ranked.size() == 1);

  const std::vector<fs::path> paths = {dir / "c.png", dir / "b.png", dir / "missing.png", dir / "a.png"};
  const auto rep = score_images(m, fx, paths);
  REQUIRE(rep.ranked.size() == 3);
  CHECK(rep.errors.size() == 1);
  for (std::size_t i = 1; i < rep.ranked.size(); ++i) CHECK(rep.ranked[i - 1].score >= rep.ranked[i].score);
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (rep.ranked[i].path == (dir / "a.png").string()) ia = i;
    if (rep.ranked[i].path == (dir / "b.png").string()) ib = i;
  }
  CHECK(rep.ranked[ia].score == rep.ranked[ib].score);
  CHECK(ia < ib);

  auto other = m;
  other.extractor = "something-else";
  CHECK_THROWS_AS(score_images(other, fx, one), ContractError);
  CHECK_NOTHROW(score_images(other, fx, one, true));
}
