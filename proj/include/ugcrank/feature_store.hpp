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
#include <string>
#include <unordered_map>
#include <vector>

#include "ugcrank/features.hpp"

namespace ugcrank {

// Binary cache of feature vectors keyed by a 64-bit hash of the image key
// (the resolved image path).
//
// Layout, little-endian:
//   "UGCF" | u16 version | u16 len + aesthetic name | u16 len + technical
//   name | u32 D | records of (u64 key hash, D x f32)
class FeatureStore {
 public:
  static constexpr std::uint16_t kVersion = 1;

  FeatureStore() = default;
  FeatureStore(std::string aesthetic_name, std::string technical_name, std::uint32_t dim)
      : aesthetic_name_(std::move(aesthetic_name)), technical_name_(std::move(technical_name)), dim_(dim) {}

  static std::uint64_t key_hash(const std::string& image_key);

  // Later puts for the same key replace earlier ones.
  void put(const std::string& image_key, const FeatureVector& v);
  bool contains(const std::string& image_key) const;
  std::optional<FeatureVector> find(const std::string& image_key) const;
  // Throws ValidationError when absent.
  FeatureVector get(const std::string& image_key) const;

  std::size_t size() const noexcept { return order_.size(); }
  std::uint32_t dim() const noexcept { return dim_; }
  const std::string& aesthetic_name() const noexcept { return aesthetic_name_; }
  const std::string& technical_name() const noexcept { return technical_name_; }
  std::string identity() const { return aesthetic_name_ + "+" + technical_name_; }

  // Written to a temporary file and renamed into place.
  void save(const std::filesystem::path& path) const;
  // Throws IoError for unreadable files and ParseError for bad magic,
  // version or a truncated record.
  static FeatureStore load(const std::filesystem::path& path);

 private:
  std::string aesthetic_name_;
  std::string technical_name_;
  std::uint32_t dim_ = 0;
  std::vector<std::uint64_t> order_;
  std::unordered_map<std::uint64_t, std::vector<float>> rows_;
};

}  // namespace ugcrank
