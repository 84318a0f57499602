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
#include "ugcrank/feature_store.hpp"
#include "ugcrank/features.hpp"
#include "ugcrank/image_io.hpp"
#include "ugcrank/kernels.hpp"
#include "ugcrank/pipeline.hpp"

using namespace ugcrank;
namespace fs = std::filesystem;

namespace {

const std::string kTinyOnnx = std::string(UGCRANK_TEST_DATA) + "/tiny.onnx";

ExtractorPair analytic_pair() { return make_extractors("analytic"); }

// Fake backbone whose outputs can be made to break the contract.
class Scripted final : public FeatureExtractor {
 public:
  Scripted(std::size_t declared, std::size_t produced, bool flaky = false)
      : declared_(declared), produced_(produced), flaky_(flaky) {}
  std::string name() const override { return "scripted"; }
  std::size_t embed_dim() const override { return declared_; }
  Output run(const RgbImage&) const override {
    Output o;
    o.embedding.assign(produced_, flaky_ ? static_cast<double>(calls_++) : 1.0);
    o.distribution = ScoreDistribution::uniform();
    return o;
  }

 private:
  std::size_t declared_, produced_;
  bool flaky_;
  mutable int calls_ = 0;
};

}  // namespace

TEST_CASE("expected score of reference distributions") {
  CHECK(expected_score(ScoreDistribution::uniform()) == 5.5);
  for (int k = 1; k <= 10; ++k) CHECK(expected_score(ScoreDistribution::one_hot(k)) == k);
  ScoreDistribution split{};
  split.probs[0] = 0.5;
  split.probs[9] = 0.5;
  CHECK(expected_score(split) == 5.5);
}

TEST_CASE("moving mass up raises the expected score by mass times distance") {
  CounterRng rng(4);
  for (int t = 0; t < 100; ++t) {
    ScoreDistribution d{};
    double s = 0;
    for (double& p : d.probs) s += (p = rng.uniform(0.05, 1.0));
    for (double& p : d.probs) p /= s;
    const int i = static_cast<int>(rng.below(9));
    const int j = i + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(9 - i)));
    const double eps = d.probs[i] * 0.5;
    auto moved = d;
    moved.probs[i] -= eps;
    moved.probs[j] += eps;
    CHECK(expected_score(moved) - expected_score(d) == doctest::Approx(eps * (j - i)).epsilon(1e-9));
  }
}

TEST_CASE("invalid distributions are rejected") {
  ScoreDistribution d{};
  d.probs[0] = 0.5;
  CHECK_THROWS_AS(expected_score(d), ContractError);
  d.probs[1] = 0.7;
  d.probs[2] = -0.2;
  CHECK_THROWS_AS(validate(d), ContractError);
  CHECK_THROWS_AS(ScoreDistribution::one_hot(11), ValidationError);
}

TEST_CASE("feature dimensions") {
  CHECK(feature_dim(1024) == 2071);
  CHECK(feature_dim(16) == 55);
  CHECK(analytic_pair().dim() == 55);
}

TEST_CASE("analytic embedding of a constant mid-gray image") {
  const auto e = analytic_embedding(testutil::constant_image(50, 40, 0.5f, 0.5f, 0.5f));
  REQUIRE(e.size() == kAnalyticEmbedDim);
  CHECK(e[analytic::laplacian_var] == 0.0);
  CHECK(e[analytic::edge_density] == 0.0);
  CHECK(e[analytic::colorfulness] == 0.0);
  CHECK(e[analytic::std_r] == 0.0);
  CHECK(e[analytic::std_luma] == 0.0);
  CHECK(e[analytic::std_saturation] == 0.0);
  CHECK(e[analytic::mean_luma] == doctest::Approx(0.5));
  CHECK(e[analytic::luma_entropy] == 0.0);
  CHECK(e[analytic::luma_p2] == e[analytic::luma_p98]);
}

TEST_CASE("colourfulness: pure red beats its grayscale version") {
  const auto red = testutil::constant_image(16, 16, 1.0f, 0.0f, 0.0f);
  const float l = static_cast<float>(kLumaR);
  const auto gray = testutil::constant_image(16, 16, l, l, l);
  CHECK(analytic_embedding(red)[analytic::colorfulness] > 0.0);
  CHECK(analytic_embedding(gray)[analytic::colorfulness] == 0.0);
}

TEST_CASE("analytic distributions are valid and deterministic") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto img = testutil::random_image(30, 30, s);
    for (auto role : {BackboneRole::aesthetic, BackboneRole::technical}) {
      const auto a = analytic_extract(img, role);
      const auto b = analytic_extract(img, role);
      CHECK_NOTHROW(validate(a.distribution));
      CHECK(a.embedding == b.embedding);
      CHECK(a.distribution.probs == b.distribution.probs);
    }
  }
}

TEST_CASE("sharper images get higher technical expected scores") {
  const auto sharp = testutil::random_image(64, 64, 3);
  const auto soft = kernels::parallel::gaussian_blur(sharp, 2.0);
  auto tech = [](const RgbImage& i) { return expected_score(analytic_extract(i, BackboneRole::technical).distribution); };
  CHECK(tech(sharp) > tech(soft));
}

TEST_CASE("extract layout and geometry") {
  const auto fx = analytic_pair();
  const auto img = testutil::random_image(600, 300, 1);  // w x h
  const auto v = extract_image(img, *fx.aesthetic, *fx.technical);
  REQUIRE(v.dim() == 55);
  CHECK(v.values[52] == 300.0);
  CHECK(v.values[53] == 600.0);
  CHECK(v.values[54] == 2.0);
  const auto scaled = kernels::parallel::resize_bilinear(img, 224, 224);
  const auto a = analytic_extract(scaled, BackboneRole::aesthetic);
  CHECK(v.values[0] == static_cast<double>(static_cast<float>(a.embedding[0])));
  CHECK(v.values[16] == static_cast<double>(static_cast<float>(a.distribution.probs[0])));
  for (double x : v.values) CHECK(static_cast<double>(static_cast<float>(x)) == x);
  CHECK(expected_score(aesthetic_distribution(v, 16)) ==
        doctest::Approx(expected_score(a.distribution)).epsilon(1e-6));
}

TEST_CASE("resolution alone changes only the geometry coordinates") {
  const auto fx = analytic_pair();
  const auto a = extract_image(testutil::constant_image(100, 50, 0.2f, 0.6f, 0.4f), *fx.aesthetic, *fx.technical);
  const auto b = extract_image(testutil::constant_image(300, 150, 0.2f, 0.6f, 0.4f), *fx.aesthetic, *fx.technical);
  for (std::size_t i = 0; i < 52; ++i) CHECK(a.values[i] == b.values[i]);
  CHECK(a.values[52] != b.values[52]);
  CHECK(a.values[53] != b.values[53]);
  CHECK(a.values[54] == b.values[54]);
}

TEST_CASE("extractor contract violations fail fast") {
  Scripted good(4, 4), short_out(4, 3), flaky(4, 4, true);
  CHECK_NOTHROW(check_extractor_contract(good));
  CHECK_THROWS_AS(check_extractor_contract(short_out), ContractError);
  CHECK_THROWS_AS(check_extractor_contract(flaky), ContractError);
  const RgbImage img(10, 10, 0.5f);
  CHECK_THROWS_AS(extract_image(img, short_out, good), ContractError);
  CHECK_THROWS_AS(make_extractors("nima"), ValidationError);
  CHECK_THROWS_AS(make_extractors("onnx:only-one"), ValidationError);
  CHECK_THROWS_AS(make_extractors("onnx:/nonexistent/a.onnx,/nonexistent/b.onnx"), IoError);
}

TEST_CASE("onnx adapter runs a real graph") {
  const auto fx = make_extractors("onnx:" + kTinyOnnx + "," + kTinyOnnx);
  CHECK(fx.aesthetic->embed_dim() == 3);
  CHECK(fx.dim() == feature_dim(3));
  CHECK(fx.identity() == "onnx-aesthetic:tiny.onnx+onnx-technical:tiny.onnx");
  // embedding = per-channel mean of 2x - 1.
  const auto img = testutil::constant_image(224, 224, 0.25f, 0.5f, 1.0f);
  const auto out = fx.aesthetic->run(img);
  REQUIRE(out.embedding.size() == 3);
  CHECK(out.embedding[0] == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(out.embedding[1] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(out.embedding[2] == doctest::Approx(1.0).epsilon(1e-6));
  // probs = softmax of (i - 4.5) * (0.5 e0 + 0.25 e1 - 0.25 e2).
  const double q = 0.5 * -0.5 + 0.25 * 0.0 - 0.25 * 1.0;
  double z = 0;
  for (int i = 0; i < 10; ++i) z += std::exp((i - 4.5) * q);
  for (int i = 0; i < 10; ++i) CHECK(out.distribution.probs[i] == doctest::Approx(std::exp((i - 4.5) * q) / z).epsilon(1e-5));
  const auto v = extract_image(testutil::random_image(50, 40, 2), *fx.aesthetic, *fx.technical);
  CHECK(v.dim() == feature_dim(3));
}

TEST_CASE("extract_many keeps order and reports failures in place") {
  testutil::TempDir dir("fx");
  write_png(dir / "a.png", testutil::random_image(20, 20, 1));
  write_png(dir / "b.png", testutil::random_image(30, 10, 2));
  { std::ofstream(dir / "c.png") << "junk"; }
  const std::vector<fs::path> paths = {dir / "a.png", dir / "missing.png", dir / "b.png", dir / "c.png"};
  const auto fx = analytic_pair();
  const auto res = extract_many(paths, fx);
  CHECK(res.errors[0].empty());
  CHECK_FALSE(res.errors[1].empty());
  CHECK(res.errors[2].empty());
  CHECK_FALSE(res.errors[3].empty());
  CHECK(res.vectors[2].values[53] == 30.0);
  CHECK(res.vectors[0] == extract(dir / "a.png", *fx.aesthetic, *fx.technical));
}

TEST_CASE("normalizer examples") {
  const std::vector<FeatureVector> v = {{{0.0}}, {{2.0}}};
  const auto n = fit_normalizer(v);
  CHECK(n.mean[0] == 1.0);
  CHECK(n.stddev[0] == 1.0);
  CHECK(apply_normalizer({{2.0}}, n).values[0] == 1.0);

  const std::vector<FeatureVector> c = {{{0.1, 3.0}}, {{0.1, 5.0}}, {{0.1, 4.0}}};
  const auto nc = fit_normalizer(c);
  for (const auto& x : c) CHECK(apply_normalizer(x, nc).values[0] == 0.0);

  CHECK_THROWS_AS(fit_normalizer(std::vector<FeatureVector>{{{1.0}}}), ValidationError);
  CHECK_THROWS_AS(fit_normalizer(std::vector<FeatureVector>{{{1.0}}, {{1.0, 2.0}}}), ValidationError);
  CHECK_THROWS_AS(n.apply(std::vector<double>{1.0, 2.0}), ValidationError);
}

TEST_CASE("normalized training vectors have zero mean and unit deviation") {
  CounterRng rng(77);
  std::vector<FeatureVector> vs(200);
  for (auto& v : vs) {
    v.values.resize(12);
    for (std::size_t i = 0; i < 12; ++i) v.values[i] = rng.uniform(-1, 1) * std::pow(10.0, static_cast<double>(i) - 4) + 1000.0 * i;
  }
  const auto n = fit_normalizer(vs);
  for (std::size_t i = 0; i < 12; ++i) {
    double m = 0, s = 0;
    for (const auto& v : vs) m += n.apply(v.values)[i];
    m /= 200;
    for (const auto& v : vs) s += std::pow(n.apply(v.values)[i] - m, 2);
    CHECK(std::abs(m) < 1e-6);
    CHECK(std::abs(std::sqrt(s / 200) - 1.0) < 1e-6);
  }
}

TEST_CASE("feature store round trip and corruption") {
  testutil::TempDir dir("store");
  FeatureStore st("a", "t", 3);
  st.put("/x/1.png", {{1.0, 2.0, 3.0}});
  st.put("/x/2.png", {{0.5, -1.0, 1e6}});
  CHECK_THROWS_AS(st.put("/x/3.png", {{1.0}}), ValidationError);
  st.save(dir / "f.ugcf");
  const auto back = FeatureStore::load(dir / "f.ugcf");
  CHECK(back.size() == 2);
  CHECK(back.identity() == "a+t");
  CHECK(back.get("/x/2.png") == st.get("/x/2.png"));
  CHECK_FALSE(back.contains("/x/3.png"));
  CHECK_THROWS_AS(back.get("/x/3.png"), ValidationError);

  std::string bytes;
  {
    std::ifstream in(dir / "f.ugcf", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  { std::ofstream(dir / "t.ugcf", std::ios::binary) << bytes.substr(0, bytes.size() - 5); }
  CHECK_THROWS_AS(FeatureStore::load(dir / "t.ugcf"), ParseError);
  auto bad = bytes;
  bad[0] = 'X';
  { std::ofstream(dir / "m.ugcf", std::ios::binary) << bad; }
  CHECK_THROWS_AS(FeatureStore::load(dir / "m.ugcf"), ParseError);
  CHECK_THROWS_AS(FeatureStore::load(dir / "none.ugcf"), IoError);
}

TEST_CASE("fill_store extracts only what is missing and checks identity") {
  testutil::TempDir dir("fill");
  write_png(dir / "a.png", testutil::random_image(20, 20, 1));
  const auto fx = analytic_pair();
  FeatureStore st(fx.aesthetic->name(), fx.technical->name(), 55);
  const std::vector<std::string> paths = {(dir / "a.png").string(), (dir / "nope.png").string()};
  const auto errs = fill_store(st, paths, fx);
  CHECK(errs.size() == 1);
  CHECK(st.size() == 1);
  FeatureStore other("x", "y", 55);
  CHECK_THROWS_AS(fill_store(other, paths, fx), ContractError);
}
