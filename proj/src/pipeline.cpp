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

#include "ugcrank/pipeline.hpp"

#include <memory>
#include <set>

#include "ugcrank/error.hpp"

namespace ugcrank {

std::vector<std::string> fill_store(FeatureStore& store, const std::vector<std::string>& paths,
                                    const ExtractorPair& fx) {
  if (store.identity() != fx.identity()) {
    throw ContractError("feature store was built with '" + store.identity() + "', current extractors are '" +
                        fx.identity() + "'");
  }
  if (store.dim() != fx.dim()) throw ContractError("feature store dimension does not match the extractors");
  std::vector<std::filesystem::path> todo;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    if (!store.contains(p) && seen.insert(p).second) todo.emplace_back(p);
  }
  const auto res = extract_many(todo, fx);
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (res.errors[i].empty()) store.put(todo[i].string(), res.vectors[i]);
    else errors.push_back(todo[i].string() + ": " + res.errors[i]);
  }
  return errors;
}

std::vector<std::string> manifest_paths(const Manifest& m) {
  std::vector<std::string> out;
  out.reserve(m.records.size());
  for (const auto& r : m.records) out.push_back(m.resolve(r).string());
  return out;
}

std::vector<std::string> pair_paths(const std::vector<PairLine>& lines) {
  std::vector<std::string> out;
  out.reserve(2 * lines.size());
  for (const auto& l : lines) {
    out.push_back(l.pos_path);
    out.push_back(l.neg_path);
  }
  return out;
}

TrainingData assemble_training_data(const std::vector<PairLine>& lines, const Manifest& val_manifest,
                                    const FeatureStore& store) {
  TrainingData data;
  for (const auto& l : lines) {
    auto pos = store.find(l.pos_path);
    auto neg = store.find(l.neg_path);
    if (!pos || !neg) {
      ++data.missing;
      continue;
    }
    data.pairs.push_back({std::move(*pos), std::move(*neg)});
  }
  for (const auto& t : validation_triples(val_manifest)) {
    auto s = store.find(val_manifest.resolve(val_manifest.records[t.studio]).string());
    auto g = store.find(val_manifest.resolve(val_manifest.records[t.good]).string());
    auto b = store.find(val_manifest.resolve(val_manifest.records[t.bad]).string());
    if (!s || !g || !b) {
      ++data.missing;
      continue;
    }
    data.val.push_back({std::move(*s), std::move(*g), std::move(*b)});
  }
  if (data.pairs.empty()) throw ValidationError("no training pair has features available");
  if (data.val.empty()) {
    throw ValidationError("no validation triple: the manifest needs val-split styles with studio, ugc_good "
                          "and ugc_bad images");
  }
  return data;
}

std::vector<ScoringModel> make_scorers(const RankerModel* model, bool baselines, const Manifest& test,
                                       const FeatureStore& store, std::size_t embed_dim) {
  auto features = [&test, &store](std::span<const ImageRecord> recs) {
    std::vector<FeatureVector> xs;
    xs.reserve(recs.size());
    for (const auto& r : recs) xs.push_back(store.get(test.resolve(r).string()));
    return xs;
  };
  std::vector<ScoringModel> out;
  if (model) {
    out.push_back({"Ours", [model, features](std::span<const ImageRecord> recs) {
                     return forward_batch(*model, features(recs));
                   }});
  }
  if (baselines) {
    for (BaselineKind kind : {BaselineKind::nima_aesthetic, BaselineKind::nima_technical}) {
      out.push_back({std::string(to_string(kind)), [kind, features, embed_dim](std::span<const ImageRecord> recs) {
                       std::vector<double> s;
                       for (const auto& x : features(recs)) {
                         const auto d = kind == BaselineKind::nima_aesthetic ? aesthetic_distribution(x, embed_dim)
                                                                             : technical_distribution(x, embed_dim);
                         s.push_back(baseline_score(kind, d));
                       }
                       return s;
                     }});
    }
  }
  return out;
}

}  // namespace ugcrank
