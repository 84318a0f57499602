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

#include "onnx_extractor.hpp"

#include <filesystem>
#include <mutex>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "ugcrank/error.hpp"

namespace ugcrank {
namespace {

constexpr const char* kEmbeddingOutput = "embedding";
constexpr const char* kProbsOutput = "probs";

class OnnxExtractor final : public FeatureExtractor {
 public:
  OnnxExtractor(const std::string& path, BackboneRole role) : role_(role) {
    if (!std::filesystem::is_regular_file(path)) throw IoError("ONNX model not found: " + path);
    try {
      net_ = cv::dnn::readNetFromONNX(path);
    } catch (const cv::Exception& e) {
      throw IoError("cannot load ONNX model " + path + ": " + e.what());
    }
    if (net_.empty()) throw IoError("cannot load ONNX model " + path);
    name_ = std::string("onnx-") + (role == BackboneRole::aesthetic ? "aesthetic" : "technical") + ":" +
            std::filesystem::path(path).filename().string();
    // The embedding width comes from the model itself.
    RgbImage probe(kBackboneInputSize, kBackboneInputSize, 0.5f);
    embed_dim_ = forward(probe).embedding.size();
    if (embed_dim_ == 0) throw ContractError(name_ + ": empty embedding output");
  }

  std::string name() const override { return name_; }
  std::size_t embed_dim() const override { return embed_dim_; }

  Output run(const RgbImage& img) const override {
    if (img.width() != kBackboneInputSize || img.height() != kBackboneInputSize) {
      throw ContractError(name_ + ": expects a 224x224 input");
    }
    return forward(img);
  }

 private:
  Output forward(const RgbImage& img) const {
    const int size[] = {1, 3, img.height(), img.width()};
    cv::Mat blob(4, size, CV_32F);
    float* dst = blob.ptr<float>();
    const std::size_t plane = img.pixel_count();
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const float* p = img.pixel(x, y);
        const std::size_t k = static_cast<std::size_t>(y) * img.width() + x;
        for (int c = 0; c < 3; ++c) dst[c * plane + k] = 2.0f * p[c] - 1.0f;
      }
    }

    std::vector<cv::Mat> outs;
    {
      // cv::dnn::Net::forward mutates internal buffers.
      std::lock_guard lock(mu_);
      try {
        net_.setInput(blob);
        net_.forward(outs, std::vector<cv::String>{kEmbeddingOutput, kProbsOutput});
      } catch (const cv::Exception& e) {
        throw ContractError(name_ + ": inference failed (graph needs outputs 'embedding' and 'probs'): " +
                            e.what());
      }
    }
    if (outs.size() != 2) throw ContractError(name_ + ": expected two outputs");
    Output o;
    const cv::Mat emb = outs[0].reshape(1, 1);
    const cv::Mat probs = outs[1].reshape(1, 1);
    if (probs.total() != static_cast<std::size_t>(kScoreBins)) {
      throw ContractError(name_ + ": 'probs' output has " + std::to_string(probs.total()) + " values, expected 10");
    }
    o.embedding.resize(emb.total());
    for (std::size_t i = 0; i < emb.total(); ++i) o.embedding[i] = emb.ptr<float>()[i];
    for (int i = 0; i < kScoreBins; ++i) o.distribution.probs[i] = probs.ptr<float>()[i];
    return o;
  }

  BackboneRole role_;
  std::string name_;
  std::size_t embed_dim_ = 0;
  mutable cv::dnn::Net net_;
  mutable std::mutex mu_;
};

}  // namespace

std::shared_ptr<const FeatureExtractor> make_onnx_extractor(const std::string& path, BackboneRole role) {
  return std::make_shared<OnnxExtractor>(path, role);
}

}  // namespace ugcrank
