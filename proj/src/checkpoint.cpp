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

#include <cmath>

#include <zlib.h>

#include "binary_io.hpp"
#include "file_util.hpp"
#include "ugcrank/error.hpp"
#include "ugcrank/ranker.hpp"

namespace ugcrank {
namespace {

constexpr char kMagic[4] = {'R', 'N', 'K', 'R'};
constexpr std::uint16_t kVersion = 1;

std::uint32_t crc_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

void save_checkpoint(const RankerModel& model, const std::filesystem::path& path) {
  const auto& dims = model.net.dims();
  if (dims.empty()) throw ValidationError("cannot save an empty model");
  if (model.normalizer.dim() != model.input_dim()) throw ValidationError("normalizer does not match model input");
  std::string out(kMagic, 4);
  binary::put_u16(out, kVersion);
  binary::put_u32(out, static_cast<std::uint32_t>(model.extractor.size()));
  out += model.extractor;
  binary::put_u32(out, static_cast<std::uint32_t>(model.input_dim()));
  binary::put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) binary::put_u32(out, static_cast<std::uint32_t>(d));
  for (double m : model.normalizer.mean) binary::put_f64(out, m);
  for (double s : model.normalizer.stddev) binary::put_f64(out, s);
  for (double p : model.net.params()) binary::put_f32(out, static_cast<float>(p));
  binary::put_u32(out, crc_of(out));
  atomic_write_file(path, out);
}

RankerModel load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  const std::string src = path.string();
  auto fail = [&](const std::string& what) { return ParseError(0, src + ": " + what); };

  if (bytes.size() < 4 || std::string_view(bytes).substr(0, 4) != std::string_view(kMagic, 4)) {
    throw fail("not a ranker checkpoint (bad magic)");
  }
  binary::Reader in(bytes, src);
  in.bytes(4, "magic");
  const auto version = in.u16("version");
  if (version != kVersion) throw fail("unsupported checkpoint version " + std::to_string(version));

  RankerModel model;
  const auto name_len = in.u32("extractor name length");
  model.extractor = std::string(in.bytes(name_len, "extractor name"));
  const auto dim = in.u32("feature dimension");
  const auto n_dims = in.u32("layer count");
  if (n_dims < 2 || n_dims > 64) throw fail("implausible layer count " + std::to_string(n_dims));
  std::vector<std::size_t> dims(n_dims);
  for (auto& d : dims) {
    d = in.u32("layer width");
    if (d == 0) throw fail("zero layer width");
  }
  if (dims.front() != dim) {
    throw fail("first layer width " + std::to_string(dims.front()) + " does not match feature dimension " +
               std::to_string(dim));
  }
  if (dims.back() != 1) throw fail("last layer width must be 1, got " + std::to_string(dims.back()));

  model.normalizer.mean.resize(dim);
  model.normalizer.stddev.resize(dim);
  for (auto& m : model.normalizer.mean) m = in.f64("normalizer mean");
  for (auto& s : model.normalizer.stddev) {
    s = in.f64("normalizer std");
    if (!(s > 0.0)) throw fail("non-positive normalizer deviation");
  }

  model.net = Mlp(dims);
  auto& params = model.net.params();
  if (in.remaining() < 4 * params.size() + 4) {
    throw fail("truncated: " + std::to_string(in.remaining()) + " bytes left for " + std::to_string(params.size()) +
               " parameters and checksum");
  }
  for (auto& p : params) p = in.f32("parameter");
  const std::size_t body = in.position();
  const auto stored = in.u32("checksum");
  if (in.remaining() != 0) throw fail(std::to_string(in.remaining()) + " trailing bytes after checksum");
  if (stored != crc_of(std::string_view(bytes).substr(0, body))) throw fail("checksum mismatch");

  for (std::size_t i = 0; i < dim; ++i) {
    if (!std::isfinite(model.normalizer.mean[i]) || !std::isfinite(model.normalizer.stddev[i])) {
      throw fail("non-finite normalizer statistics");
    }
  }
  for (double p : params)
    if (!std::isfinite(p)) throw fail("non-finite parameter");
  return model;
}

}  // namespace ugcrank
