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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ugcrank {

enum class Bucket { studio, ugc_good, ugc_bad };
enum class Split { train, val, test };

std::string_view to_string(Bucket b) noexcept;
std::string_view to_string(Split s) noexcept;
std::optional<Bucket> parse_bucket(std::string_view token) noexcept;
std::optional<Split> parse_split(std::string_view token) noexcept;

struct ImageRecord {
  std::string id;
  std::string path;
  Bucket bucket = Bucket::studio;
  std::string style_id;
  std::optional<bool> has_human;  // absent = unknown
  std::int64_t upvotes = 0;
  std::int64_t downvotes = 0;
  Split split = Split::train;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Manifest {
  std::vector<ImageRecord> records;
  std::string source_uri;
  // Relative record paths resolve against this directory.
  std::filesystem::path base_dir;
  bool shared_paths_allowed = false;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  std::filesystem::path resolve(const ImageRecord& r) const;
};

struct ManifestOptions {
  bool lenient = false;             // accept (and drop) unknown fields
  bool allow_shared_paths = false;  // several ids may point at one file
};

// One JSON object per line; blank lines are skipped. Throws ParseError for
// malformed JSON or wrongly typed fields and ValidationError for semantic
// violations (duplicate id, unknown bucket/split, negative votes). Both
// messages carry the 1-based line number.
Manifest load_manifest(std::istream& in, std::string source_uri = {}, ManifestOptions opts = {});
Manifest load_manifest_file(const std::filesystem::path& path, ManifestOptions opts = {});

std::string serialize_record(const ImageRecord& r);
void write_manifest(std::ostream& out, const Manifest& m);
void write_manifest_file(const std::filesystem::path& path, const Manifest& m);

// Engagement proxy u / (u + d). Throws UndefinedMetricError when u + d == 0.
double proxy_score(const ImageRecord& r);

Manifest filter_split(const Manifest& m, Split split);

}  // namespace ugcrank
