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

// Glue shared by the CLI and the end-to-end tests: feature caching keyed by
// resolved image path, and assembly of training / evaluation inputs.

#include <string>
#include <vector>

#include "ugcrank/eval.hpp"
#include "ugcrank/feature_store.hpp"
#include "ugcrank/pairgen.hpp"
#include "ugcrank/ranker.hpp"

namespace ugcrank {

// Extracts every key (an image path) missing from the store. Returns one
// "path: message" line per image that failed. Throws ContractError if the
// store was built with different extractors.
std::vector<std::string> fill_store(FeatureStore& store, const std::vector<std::string>& paths,
                                    const ExtractorPair& fx);

// Resolved paths of every record in the manifest.
std::vector<std::string> manifest_paths(const Manifest& m);
// Both paths of every pair line.
std::vector<std::string> pair_paths(const std::vector<PairLine>& lines);

struct TrainingData {
  std::vector<TrainingPair> pairs;
  std::vector<ValTriple> val;
  std::size_t missing = 0;  // pairs or triples skipped for lack of features
};

// Triples come from the val split of val_manifest. Throws ValidationError
// when no usable pair or triple remains.
TrainingData assemble_training_data(const std::vector<PairLine>& lines, const Manifest& val_manifest,
                                    const FeatureStore& store);

// Scoring functions reading features from the store: the trained model (if
// given) and, if requested, the two expected-score baselines.
std::vector<ScoringModel> make_scorers(const RankerModel* model, bool baselines, const Manifest& test,
                                       const FeatureStore& store, std::size_t embed_dim);

}  // namespace ugcrank
