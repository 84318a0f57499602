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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ugcrank/corpus.hpp"
#include "ugcrank/distortion.hpp"
#include "ugcrank/image.hpp"

namespace ugcrank {

inline constexpr int kPairClassCount = 6;

// Rows of the sampling table, 1-based class ids:
//   1 studio  > distorted studio        4 studio         > ugc_bad
//   2 ugc_good > distorted ugc_good     5 ugc_good human > ugc_bad human
//   3 studio  > ugc_good                6 ugc_good flat  > ugc_bad flat
struct ClassRow {
  std::vector<std::size_t> positives;  // indices into Manifest::records
  std::vector<std::size_t> negatives;  // for rows 1-2: the images to be distorted
  bool usable() const noexcept { return !positives.empty() && !negatives.empty(); }
};
using EligibleSets = std::array<ClassRow, kPairClassCount>;

// Only split == train records take part. Records with unknown has_human are
// left out of rows 5 and 6 only.
EligibleSets eligible_sets(const Manifest& m);

struct RankedPair {
  std::size_t pos = 0;  // record index
  std::size_t neg = 0;  // record index; equals pos for classes 1-2
  int class_id = 1;
  std::vector<DistortionSpec> neg_distortions;  // non-empty iff class_id is 1 or 2

  bool synthetic() const noexcept { return class_id == 1 || class_id == 2; }
  friend bool operator==(const RankedPair&, const RankedPair&) = default;
};

struct PairConfig {
  std::size_t n_pairs = 10000;
  int chain_max = 2;
  std::uint64_t seed = 0;
  std::array<double, kPairClassCount> class_weights = {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
  DistortionRanges ranges{};
};

struct PairSet {
  std::vector<RankedPair> pairs;
  std::array<std::size_t, kPairClassCount> class_counts{};
  std::vector<std::string> warnings;
};

// Class drawn by class_weights renormalized over usable rows, members drawn
// uniformly with replacement; for classes 1-2 a distortion chain of uniform
// length 1..chain_max is attached to the negative. Deterministic in cfg.seed.
PairSet build_pairs(const Manifest& m, const PairConfig& cfg);

// Content address of a synthetic negative: hash of the source id and the
// serialized chain.
std::string distorted_name(const std::string& source_id, const std::vector<DistortionSpec>& chain);

// One line of the pair file.
struct PairLine {
  std::string pos_path;
  std::string neg_path;
  int class_id = 1;
  std::optional<std::vector<DistortionSpec>> neg_distortions;

  friend bool operator==(const PairLine&, const PairLine&) = default;
};

std::string serialize_pair_line(const PairLine& line);
PairLine parse_pair_line(const std::string& text, std::size_t line_no = 0);
std::vector<PairLine> read_pair_file(const std::filesystem::path& path);
void write_pair_file(const std::filesystem::path& path, const std::vector<PairLine>& lines);

struct PairError {
  std::size_t pair_index;
  std::string message;
};

struct MaterializeResult {
  std::vector<PairLine> lines;  // surviving pairs, in input order
  std::vector<PairError> errors;
  std::size_t images_written = 0;
  std::size_t images_reused = 0;
  std::filesystem::path pair_file;

  double dropped_fraction(std::size_t requested) const noexcept {
    return requested ? static_cast<double>(errors.size()) / static_cast<double>(requested) : 0.0;
  }
};

// Writes distorted negatives for classes 1-2 to out_dir/distorted/<hash>.png
// (skipping files that already exist) and the pair file to out_dir/pairs.jsonl.
// Pairs referencing undecodable images are dropped and reported in errors
// (also written to out_dir/pair_errors.jsonl). Work over pairs runs in
// parallel; every file lands via write-to-temp and rename.
MaterializeResult materialize(const std::vector<RankedPair>& pairs, const Manifest& m,
                              const std::filesystem::path& out_dir, const DistortionRanges& ranges = {});

// Re-derive a synthetic negative from its provenance chain, quantized the
// same way the writer quantizes.
RgbImage replay_negative(const PairLine& line, const DistortionRanges& ranges = {});

// Hook for populating has_human from an external person detector.
class HumanDetector {
 public:
  virtual ~HumanDetector() = default;
  // nullopt = undecided; the record stays out of classes 5 and 6.
  virtual std::optional<bool> detect(const RgbImage& img) = 0;
};

// Fills has_human for UGC records where it is absent. Returns the number of
// records updated. Decode failures leave the field absent.
std::size_t annotate_human_flags(Manifest& m, HumanDetector& detector);

// One (studio, ugc_good, ugc_bad) record-index triple per val-split style
// that has all three buckets; the lexicographically first id of each bucket
// is used. Styles are visited in sorted order.
struct TripleIndices {
  std::size_t studio, good, bad;
};
std::vector<TripleIndices> validation_triples(const Manifest& m);

}  // namespace ugcrank
