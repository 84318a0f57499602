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

#include "ugcrank/pairgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "file_util.hpp"
#include "ugcrank/error.hpp"
#include "ugcrank/hash.hpp"
#include "ugcrank/image_io.hpp"
#include "ugcrank/rng.hpp"

namespace ugcrank {

using nlohmann::json;
namespace fs = std::filesystem;

EligibleSets eligible_sets(const Manifest& m) {
  std::vector<std::size_t> studio, good, bad, good_h, bad_h, good_flat, bad_flat;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& r = m.records[i];
    if (r.split != Split::train) continue;
    switch (r.bucket) {
      case Bucket::studio: studio.push_back(i); break;
      case Bucket::ugc_good:
        good.push_back(i);
        if (r.has_human) (*r.has_human ? good_h : good_flat).push_back(i);
        break;
      case Bucket::ugc_bad:
        bad.push_back(i);
        if (r.has_human) (*r.has_human ? bad_h : bad_flat).push_back(i);
        break;
    }
  }
  EligibleSets rows;
  rows[0] = {studio, studio};
  rows[1] = {good, good};
  rows[2] = {studio, good};
  rows[3] = {studio, bad};
  rows[4] = {good_h, bad_h};
  rows[5] = {good_flat, bad_flat};
  return rows;
}

PairSet build_pairs(const Manifest& m, const PairConfig& cfg) {
  if (cfg.n_pairs < 1) throw ValidationError("n_pairs must be at least 1");
  if (cfg.chain_max < 1) throw ValidationError("chain_max must be at least 1");
  for (double w : cfg.class_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("class weights must be finite and >= 0");
  }

  const EligibleSets rows = eligible_sets(m);
  PairSet out;
  std::array<double, kPairClassCount> weights{};
  double total = 0.0;
  for (int c = 0; c < kPairClassCount; ++c) {
    if (rows[c].usable()) {
      weights[c] = cfg.class_weights[c];
      total += weights[c];
    } else if (cfg.class_weights[c] > 0.0) {
      out.warnings.push_back("class " + std::to_string(c + 1) + " has weight " +
                             std::to_string(cfg.class_weights[c]) +
                             " but no eligible images; renormalizing over the remaining classes");
    }
  }
  if (!(total > 0.0)) {
    throw ValidationError("no eligible pairs: every class with positive weight is empty in the train split");
  }
  std::array<double, kPairClassCount> cumulative{};
  double acc = 0.0;
  int last_usable = 0;
  for (int c = 0; c < kPairClassCount; ++c) {
    acc += weights[c] / total;
    cumulative[c] = acc;
    if (weights[c] > 0.0) last_usable = c;
  }

  CounterRng rng(cfg.seed);
  out.pairs.reserve(cfg.n_pairs);
  for (std::size_t k = 0; k < cfg.n_pairs; ++k) {
    const double u = rng.uniform01();
    int cls = last_usable;
    for (int c = 0; c < kPairClassCount; ++c) {
      if (weights[c] > 0.0 && u < cumulative[c]) {
        cls = c;
        break;
      }
    }
    const ClassRow& row = rows[cls];
    RankedPair p;
    p.class_id = cls + 1;
    p.pos = row.positives[rng.below(row.positives.size())];
    if (p.synthetic()) {
      p.neg = p.pos;
      const auto len = 1 + rng.below(static_cast<std::uint64_t>(cfg.chain_max));
      for (std::uint64_t i = 0; i < len; ++i) p.neg_distortions.push_back(sample_spec(rng.next_u64(), cfg.ranges));
    } else {
      p.neg = row.negatives[rng.below(row.negatives.size())];
    }
    ++out.class_counts[cls];
    out.pairs.push_back(std::move(p));
  }
  return out;
}

std::string distorted_name(const std::string& source_id, const std::vector<DistortionSpec>& chain) {
  const std::string key = source_id + '\n' + json(chain).dump();
  return hex16(fnv1a64(key)) + ".png";
}

std::string serialize_pair_line(const PairLine& l) {
  json j = json::object();
  j["pos_path"] = l.pos_path;
  j["neg_path"] = l.neg_path;
  j["class_id"] = l.class_id;
  j["neg_distortions"] = l.neg_distortions ? json(*l.neg_distortions) : json(nullptr);
  return j.dump();
}

PairLine parse_pair_line(const std::string& text, std::size_t line_no) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, std::string("malformed pair line: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "pair line must be an object");
  PairLine l;
  auto str = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw ParseError(line_no, std::string("missing string '") + key + "'");
    return it->get<std::string>();
  };
  l.pos_path = str("pos_path");
  l.neg_path = str("neg_path");
  auto cls = j.find("class_id");
  if (cls == j.end() || !cls->is_number_integer()) throw ParseError(line_no, "missing integer 'class_id'");
  l.class_id = cls->get<int>();
  if (l.class_id < 1 || l.class_id > kPairClassCount) {
    throw ValidationError("line " + std::to_string(line_no) + ": class_id must be in 1..6");
  }
  if (auto it = j.find("neg_distortions"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(line_no, "'neg_distortions' must be a list or null");
    try {
      l.neg_distortions = it->get<std::vector<DistortionSpec>>();
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  const bool synthetic = l.class_id <= 2;
  if (synthetic != (l.neg_distortions.has_value() && !l.neg_distortions->empty())) {
    throw ValidationError("line " + std::to_string(line_no) +
                          ": neg_distortions must be a non-empty list exactly for classes 1-2");
  }
  return l;
}

std::vector<PairLine> read_pair_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pair file: " + path.string());
  std::vector<PairLine> lines;
  std::string text;
  std::size_t n = 0;
  while (std::getline(in, text)) {
    ++n;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    lines.push_back(parse_pair_line(text, n));
  }
  return lines;
}

void write_pair_file(const fs::path& path, const std::vector<PairLine>& lines) {
  std::string body;
  for (const auto& l : lines) {
    body += serialize_pair_line(l);
    body += '\n';
  }
  atomic_write_file(path, body);
}

MaterializeResult materialize(const std::vector<RankedPair>& pairs, const Manifest& m, const fs::path& out_dir,
                              const DistortionRanges& ranges) {
  std::error_code ec;
  fs::create_directories(out_dir / "distorted", ec);
  if (ec) throw IoError("cannot create output directory " + (out_dir / "distorted").string() + ": " + ec.message());

  // Every record any pair touches must decode.
  std::vector<std::size_t> referenced;
  for (const auto& p : pairs) {
    if (p.pos >= m.records.size() || p.neg >= m.records.size()) {
      throw ValidationError("pair references a record outside the manifest");
    }
    referenced.push_back(p.pos);
    referenced.push_back(p.neg);
  }
  std::sort(referenced.begin(), referenced.end());
  referenced.erase(std::unique(referenced.begin(), referenced.end()), referenced.end());

  std::vector<std::string> decode_error(referenced.size());
  const auto n_ref = static_cast<std::ptrdiff_t>(referenced.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n_ref; ++i) {
    try {
      (void)read_image(m.resolve(m.records[referenced[i]]));
    } catch (const std::exception& e) {
      decode_error[i] = e.what();
    }
  }
  auto record_error = [&](std::size_t rec) -> const std::string& {
    const auto it = std::lower_bound(referenced.begin(), referenced.end(), rec);
    return decode_error[static_cast<std::size_t>(it - referenced.begin())];
  };

  // Unique synthetic negatives by content address.
  struct Job {
    std::size_t source;
    const std::vector<DistortionSpec>* chain;
    fs::path path;
    std::string error;
    bool written = false;
  };
  std::map<std::string, std::size_t> job_of_name;
  std::vector<Job> jobs;
  std::vector<std::size_t> pair_job(pairs.size(), SIZE_MAX);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    if (!p.synthetic()) continue;
    if (p.neg_distortions.empty()) throw ValidationError("synthetic pair without a distortion chain");
    const auto name = distorted_name(m.records[p.pos].id, p.neg_distortions);
    auto [it, fresh] = job_of_name.emplace(name, jobs.size());
    if (fresh) jobs.push_back({p.pos, &p.neg_distortions, fs::absolute(out_dir / "distorted" / name).lexically_normal(), {}, false});
    pair_job[k] = it->second;
  }

  const auto n_jobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n_jobs; ++i) {
    Job& job = jobs[i];
    if (!record_error(job.source).empty()) continue;
    std::error_code exists_ec;
    if (fs::exists(job.path, exists_ec)) continue;
    try {
      const RgbImage src = read_image(m.resolve(m.records[job.source]));
      const RgbImage neg = distort_chain(src, *job.chain, static_cast<int>(job.chain->size()), ranges);
      const auto bytes = encode_png(neg);
      atomic_write_file(job.path, std::string(bytes.begin(), bytes.end()));
      job.written = true;
    } catch (const std::exception& e) {
      job.error = e.what();
    }
  }

  MaterializeResult res;
  for (const auto& job : jobs) {
    if (job.written) {
      ++res.images_written;
    } else if (job.error.empty() && record_error(job.source).empty()) {
      ++res.images_reused;
    }
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    std::string err = record_error(p.pos);
    if (err.empty()) err = record_error(p.neg);
    if (err.empty() && pair_job[k] != SIZE_MAX) err = jobs[pair_job[k]].error;
    if (!err.empty()) {
      res.errors.push_back({k, err});
      continue;
    }
    PairLine line;
    line.class_id = p.class_id;
    line.pos_path = m.resolve(m.records[p.pos]).generic_string();
    if (p.synthetic()) {
      line.neg_path = jobs[pair_job[k]].path.generic_string();
      line.neg_distortions = p.neg_distortions;
    } else {
      line.neg_path = m.resolve(m.records[p.neg]).generic_string();
    }
    res.lines.push_back(std::move(line));
  }

  res.pair_file = out_dir / "pairs.jsonl";
  write_pair_file(res.pair_file, res.lines);
  const fs::path err_file = out_dir / "pair_errors.jsonl";
  if (!res.errors.empty()) {
    std::string body;
    for (const auto& e : res.errors) {
      body += json({{"pair_index", e.pair_index}, {"error", e.message}}).dump();
      body += '\n';
    }
    atomic_write_file(err_file, body);
  } else {
    fs::remove(err_file, ec);
  }
  return res;
}

RgbImage replay_negative(const PairLine& line, const DistortionRanges& ranges) {
  if (!line.neg_distortions || line.neg_distortions->empty()) {
    throw ValidationError("pair has no distortion chain to replay");
  }
  const RgbImage src = read_image(line.pos_path);
  const auto& chain = *line.neg_distortions;
  return quantize8(distort_chain(src, chain, static_cast<int>(chain.size()), ranges));
}

std::size_t annotate_human_flags(Manifest& m, HumanDetector& detector) {
  std::size_t updated = 0;
  for (auto& r : m.records) {
    if (r.bucket == Bucket::studio || r.has_human) continue;
    try {
      if (auto flag = detector.detect(read_image(m.resolve(r)))) {
        r.has_human = *flag;
        ++updated;
      }
    } catch (const IoError&) {
    }
  }
  return updated;
}

std::vector<TripleIndices> validation_triples(const Manifest& m) {
  struct Slots {
    std::optional<std::size_t> by_bucket[3];
  };
  std::map<std::string, Slots> styles;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& r = m.records[i];
    if (r.split != Split::val) continue;
    auto& slot = styles[r.style_id].by_bucket[static_cast<int>(r.bucket)];
    if (!slot || r.id < m.records[*slot].id) slot = i;
  }
  std::vector<TripleIndices> out;
  for (const auto& [_, s] : styles) {
    if (s.by_bucket[0] && s.by_bucket[1] && s.by_bucket[2]) {
      out.push_back({*s.by_bucket[0], *s.by_bucket[1], *s.by_bucket[2]});
    }
  }
  return out;
}

}  // namespace ugcrank
