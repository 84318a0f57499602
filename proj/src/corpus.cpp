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

#include "ugcrank/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ugcrank/error.hpp"

namespace ugcrank {

using nlohmann::json;

std::string_view to_string(Bucket b) noexcept {
  switch (b) {
    case Bucket::studio: return "studio";
    case Bucket::ugc_good: return "ugc_good";
    case Bucket::ugc_bad: return "ugc_bad";
  }
  return "?";
}

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

std::optional<Bucket> parse_bucket(std::string_view t) noexcept {
  if (t == "studio") return Bucket::studio;
  if (t == "ugc_good") return Bucket::ugc_good;
  if (t == "ugc_bad") return Bucket::ugc_bad;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view t) noexcept {
  if (t == "train") return Split::train;
  if (t == "val") return Split::val;
  if (t == "test") return Split::test;
  return std::nullopt;
}

std::filesystem::path Manifest::resolve(const ImageRecord& r) const {
  std::filesystem::path p(r.path);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal();
  return (base_dir / p).lexically_normal();
}

namespace {

constexpr std::string_view kFields[] = {"id",        "path",    "bucket",    "style_id",
                                        "has_human", "upvotes", "downvotes", "split"};

bool known_field(std::string_view key) {
  for (auto f : kFields)
    if (f == key) return true;
  return false;
}

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("line " + std::to_string(line) + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t require_count(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_number_integer()) throw ParseError(line, std::string("field '") + key + "' must be an integer");
  const auto n = v.get<std::int64_t>();
  if (n < 0) throw ValidationError("line " + std::to_string(line) + ": field '" + key + "' must be >= 0");
  return n;
}

ImageRecord parse_record(const json& obj, std::size_t line, bool lenient) {
  if (!obj.is_object()) throw ParseError(line, "record must be a JSON object");
  if (!lenient) {
    for (const auto& [key, _] : obj.items()) {
      if (!known_field(key)) {
        throw ValidationError("line " + std::to_string(line) + ": unknown field '" + key +
                              "' (use lenient mode to ignore)");
      }
    }
  }
  ImageRecord r;
  r.id = require_string(obj, "id", line);
  if (r.id.empty()) throw ValidationError("line " + std::to_string(line) + ": empty id");
  r.path = require_string(obj, "path", line);
  if (r.path.empty()) throw ValidationError("line " + std::to_string(line) + ": empty path");
  const auto bucket = require_string(obj, "bucket", line);
  if (auto b = parse_bucket(bucket)) {
    r.bucket = *b;
  } else {
    throw ValidationError("line " + std::to_string(line) + ": unknown bucket '" + bucket + "'");
  }
  r.style_id = require_string(obj, "style_id", line);
  if (auto it = obj.find("has_human"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) throw ParseError(line, "field 'has_human' must be a boolean or null");
    r.has_human = it->get<bool>();
  }
  r.upvotes = require_count(obj, "upvotes", line);
  r.downvotes = require_count(obj, "downvotes", line);
  const auto split = require_string(obj, "split", line);
  if (auto s = parse_split(split)) {
    r.split = *s;
  } else {
    throw ValidationError("line " + std::to_string(line) + ": unknown split '" + split + "'");
  }
  return r;
}

}  // namespace

Manifest load_manifest(std::istream& in, std::string source_uri, ManifestOptions opts) {
  Manifest m;
  m.source_uri = std::move(source_uri);
  m.shared_paths_allowed = opts.allow_shared_paths;
  std::unordered_map<std::string, std::size_t> id_line;
  std::unordered_map<std::string, std::size_t> path_line;

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("malformed record: ") + e.what());
    }
    ImageRecord r = parse_record(obj, line, opts.lenient);
    if (auto [it, fresh] = id_line.emplace(r.id, line); !fresh) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate id \"" + r.id +
                            "\" (first seen on line " + std::to_string(it->second) + ")");
    }
    if (!opts.allow_shared_paths) {
      if (auto [it, fresh] = path_line.emplace(r.path, line); !fresh) {
        throw ValidationError("line " + std::to_string(line) + ": path \"" + r.path +
                              "\" already used on line " + std::to_string(it->second) +
                              " (allow shared paths to permit this)");
      }
    }
    m.records.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("read error in manifest " + m.source_uri);
  return m;
}

Manifest load_manifest_file(const std::filesystem::path& path, ManifestOptions opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  Manifest m = load_manifest(in, path.string(), opts);
  m.base_dir = std::filesystem::absolute(path).parent_path().lexically_normal();
  return m;
}

std::string serialize_record(const ImageRecord& r) {
  // Field order fixed so manifests diff cleanly.
  std::ostringstream os;
  os << "{\"id\":" << json(r.id).dump() << ",\"path\":" << json(r.path).dump() << ",\"bucket\":\""
     << to_string(r.bucket) << "\",\"style_id\":" << json(r.style_id).dump();
  if (r.has_human) os << ",\"has_human\":" << (*r.has_human ? "true" : "false");
  os << ",\"upvotes\":" << r.upvotes << ",\"downvotes\":" << r.downvotes << ",\"split\":\""
     << to_string(r.split) << "\"}";
  return os.str();
}

void write_manifest(std::ostream& out, const Manifest& m) {
  for (const auto& r : m.records) out << serialize_record(r) << '\n';
}

void write_manifest_file(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_manifest(out, m);
  if (!out) throw IoError("write failed: " + path.string());
}

double proxy_score(const ImageRecord& r) {
  const std::int64_t total = r.upvotes + r.downvotes;
  if (total <= 0) {
    throw UndefinedMetricError("proxy score undefined for '" + r.id + "': no votes (u + d = 0)");
  }
  return static_cast<double>(r.upvotes) / static_cast<double>(total);
}

Manifest filter_split(const Manifest& m, Split split) {
  Manifest out;
  out.source_uri = m.source_uri;
  out.base_dir = m.base_dir;
  out.shared_paths_allowed = m.shared_paths_allowed;
  for (const auto& r : m.records)
    if (r.split == split) out.records.push_back(r);
  return out;
}

}  // namespace ugcrank
