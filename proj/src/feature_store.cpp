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

#include "ugcrank/feature_store.hpp"

#include "binary_io.hpp"
#include "file_util.hpp"
#include "ugcrank/error.hpp"
#include "ugcrank/hash.hpp"

namespace ugcrank {
namespace {
constexpr char kMagic[4] = {'U', 'G', 'C', 'F'};
}

std::uint64_t FeatureStore::key_hash(const std::string& image_key) { return fnv1a64(image_key); }

void FeatureStore::put(const std::string& image_key, const FeatureVector& v) {
  if (v.dim() != dim_) {
    throw ValidationError("feature vector of dimension " + std::to_string(v.dim()) + " does not fit store of dimension " +
                          std::to_string(dim_));
  }
  const auto h = key_hash(image_key);
  std::vector<float> row(v.values.begin(), v.values.end());
  auto [it, fresh] = rows_.try_emplace(h, std::move(row));
  if (fresh) {
    order_.push_back(h);
  } else {
    it->second.assign(v.values.begin(), v.values.end());
  }
}

bool FeatureStore::contains(const std::string& image_key) const { return rows_.count(key_hash(image_key)) > 0; }

std::optional<FeatureVector> FeatureStore::find(const std::string& image_key) const {
  auto it = rows_.find(key_hash(image_key));
  if (it == rows_.end()) return std::nullopt;
  return FeatureVector{std::vector<double>(it->second.begin(), it->second.end())};
}

FeatureVector FeatureStore::get(const std::string& image_key) const {
  if (auto v = find(image_key)) return *v;
  throw ValidationError("no features stored for '" + image_key + "'");
}

void FeatureStore::save(const std::filesystem::path& path) const {
  std::string out(kMagic, 4);
  binary::put_u16(out, kVersion);
  for (const auto* name : {&aesthetic_name_, &technical_name_}) {
    if (name->size() > 0xFFFF) throw ValidationError("extractor name too long for feature store");
    binary::put_u16(out, static_cast<std::uint16_t>(name->size()));
    out += *name;
  }
  binary::put_u32(out, dim_);
  out.reserve(out.size() + order_.size() * (8 + 4 * static_cast<std::size_t>(dim_)));
  for (auto h : order_) {
    binary::put_u64(out, h);
    for (float f : rows_.at(h)) binary::put_f32(out, f);
  }
  atomic_write_file(path, out);
}

FeatureStore FeatureStore::load(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  binary::Reader in(bytes, path.string());
  if (in.bytes(4, "magic") != std::string_view(kMagic, 4)) {
    throw ParseError(0, path.string() + ": not a feature store (bad magic)");
  }
  const auto version = in.u16("version");
  if (version != kVersion) {
    throw ParseError(0, path.string() + ": unsupported feature store version " + std::to_string(version));
  }
  FeatureStore store;
  store.aesthetic_name_ = std::string(in.bytes(in.u16("name length"), "aesthetic name"));
  store.technical_name_ = std::string(in.bytes(in.u16("name length"), "technical name"));
  store.dim_ = in.u32("dimension");
  if (store.dim_ == 0) throw ParseError(0, path.string() + ": zero feature dimension");
  const std::size_t record = 8 + 4 * static_cast<std::size_t>(store.dim_);
  if (in.remaining() % record != 0) {
    throw ParseError(0, path.string() + ": truncated record (" + std::to_string(in.remaining() % record) +
                            " trailing bytes)");
  }
  const std::size_t n = in.remaining() / record;
  store.order_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = in.u64("key");
    std::vector<float> row(store.dim_);
    for (auto& f : row) f = in.f32("feature");
    if (store.rows_.insert_or_assign(h, std::move(row)).second) store.order_.push_back(h);
  }
  return store;
}

}  // namespace ugcrank
