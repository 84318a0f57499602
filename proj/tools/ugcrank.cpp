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

// Command-line front end. Exit codes: 0 success, 1 usage / validation /
// leakage, 2 I/O.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ugcrank/corpus.hpp"
#include "ugcrank/distortion.hpp"
#include "ugcrank/error.hpp"
#include "ugcrank/eval.hpp"
#include "ugcrank/feature_store.hpp"
#include "ugcrank/fixtures.hpp"
#include "ugcrank/image_io.hpp"
#include "ugcrank/pairgen.hpp"
#include "ugcrank/parallel.hpp"
#include "ugcrank/pipeline.hpp"
#include "ugcrank/ranker.hpp"

namespace fs = std::filesystem;
using namespace ugcrank;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

// Resolved flags (file values and defaults included) so a run can be
// repeated with `--config <this file>`.
void echo_config(const CLI::App& root, const CLI::App& sub, const fs::path& path) {
  std::string text = "# ugcrank " + sub.get_name() + "\n";
  for (const auto* opt : root.get_options()) {
    if (opt->get_name() == "--threads" && opt->count() > 0) text += "threads=" + opt->as<std::string>() + "\n";
  }
  text += "[" + sub.get_name() + "]\n";
  text += sub.config_to_str(true, false);
  write_text(path, text);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
  return out;
}

Manifest load_manifest_arg(const std::string& path, bool lenient) {
  if (!fs::exists(path)) throw IoError("manifest not found: " + path);
  return load_manifest_file(path, {lenient, false});
}

FeatureStore open_store(const std::string& path, const ExtractorPair& fx) {
  if (!path.empty()) {
    if (!fs::exists(path)) throw IoError("feature store not found: " + path);
    return FeatureStore::load(path);
  }
  return FeatureStore(fx.aesthetic->name(), fx.technical->name(), static_cast<std::uint32_t>(fx.dim()));
}

void report_errors(const std::vector<std::string>& errors) {
  for (const auto& e : errors) std::cerr << "warning: " << e << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise quality ranker for user-generated product images"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (flags override it)");
  std::optional<int> threads;
  app.add_option("--threads", threads, "Worker threads (default: UGCRANK_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  // make-fixtures
  auto* fixtures = app.add_subcommand("make-fixtures", "Write the procedural fixture corpus");
  std::string fx_out;
  FixtureOptions fx_opts;
  fixtures->add_option("--out", fx_out, "Output directory")->required();
  fixtures->add_option("--styles", fx_opts.styles, "Number of styles")->capture_default_str();
  fixtures->add_option("--train-styles", fx_opts.train_styles)->capture_default_str();
  fixtures->add_option("--val-styles", fx_opts.val_styles)->capture_default_str();
  fixtures->add_option("--seed", fx_opts.seed)->capture_default_str();

  // generate-pairs
  auto* gen = app.add_subcommand("generate-pairs", "Sample training pairs and write distorted negatives");
  std::string gen_manifest, gen_out, gen_weights;
  bool gen_lenient = false;
  PairConfig pcfg;
  gen->add_option("--manifest", gen_manifest, "Image manifest (JSON lines)")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--n-pairs", pcfg.n_pairs, "Pairs to sample")->capture_default_str();
  gen->add_option("--seed", pcfg.seed)->capture_default_str();
  gen->add_option("--chain-max", pcfg.chain_max, "Longest distortion chain")->capture_default_str();
  gen->add_option("--class-weights", gen_weights, "Six comma-separated class weights");
  gen->add_flag("--lenient", gen_lenient, "Ignore unknown manifest fields");

  // extract-features
  auto* ext = app.add_subcommand("extract-features", "Build a feature store");
  std::string ext_manifest, ext_pairs, ext_out, ext_extractor = "analytic";
  ext->add_option("--manifest", ext_manifest, "Manifest whose images to extract");
  ext->add_option("--pairs", ext_pairs, "Pair file whose images to extract");
  ext->add_option("--extractor", ext_extractor, "analytic | onnx:PATH_A,PATH_T")->capture_default_str();
  ext->add_option("--out", ext_out, "Feature store file")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train the ranker on a pair file");
  std::string tr_pairs, tr_manifest, tr_features, tr_out, tr_extractor = "analytic";
  TrainConfig tcfg;
  tr->add_option("--pairs", tr_pairs, "Pair file from generate-pairs")->required();
  tr->add_option("--manifest", tr_manifest, "Manifest holding the val split")->required();
  tr->add_option("--features", tr_features, "Existing feature store to reuse");
  tr->add_option("--extractor", tr_extractor)->capture_default_str();
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--margin", tcfg.margin)->capture_default_str();
  tr->add_option("--lr", tcfg.lr)->capture_default_str();
  tr->add_option("--weight-decay", tcfg.weight_decay)->capture_default_str();
  tr->add_option("--batch-size", tcfg.batch_size)->capture_default_str();
  tr->add_option("--max-epochs", tcfg.max_epochs)->capture_default_str();
  tr->add_option("--patience", tcfg.patience)->capture_default_str();
  tr->add_option("--seed", tcfg.seed)->capture_default_str();

  // score
  auto* sc = app.add_subcommand("score", "Score images, best first");
  std::string sc_model, sc_extractor = "analytic";
  std::vector<std::string> sc_images;
  bool sc_allow = false;
  sc->add_option("--model", sc_model, "Checkpoint")->required();
  sc->add_option("--extractor", sc_extractor)->capture_default_str();
  sc->add_flag("--allow-extractor-mismatch", sc_allow);
  sc->add_option("images", sc_images, "Image files")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Per-style correlation and pair accuracy");
  std::string ev_model, ev_test, ev_out, ev_features, ev_extractor = "analytic";
  std::vector<std::string> ev_train;
  bool ev_baselines = false;
  EvalConfig ecfg;
  ev->add_option("--model", ev_model, "Checkpoint (optional with --baselines)");
  ev->add_flag("--baselines", ev_baselines, "Also report the expected-score baselines");
  ev->add_option("--test-manifest", ev_test)->required();
  ev->add_option("--train-manifest", ev_train, "Manifests whose ids must not appear in the test set");
  ev->add_option("--features", ev_features, "Existing feature store to reuse");
  ev->add_option("--extractor", ev_extractor)->capture_default_str();
  ev->add_option("--pairs-per-style", ecfg.pairs_per_style)->capture_default_str();
  ev->add_option("--seed", ecfg.seed)->capture_default_str();
  ev->add_option("--out", ev_out, "Output directory");

  // distort
  auto* di = app.add_subcommand("distort", "Apply a distortion spec (or chain) to one image");
  std::string di_in, di_spec, di_out;
  di->add_option("--input", di_in)->required();
  di->add_option("--spec", di_spec, "JSON spec object or array; @FILE reads it from a file")->required();
  di->add_option("--output", di_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    set_threads(resolve_threads(threads));

    if (*fixtures) {
      const auto m = write_fixture_corpus(fx_out, fx_opts);
      echo_config(app, *fixtures, fs::path(fx_out) / "resolved_config.ini");
      std::cout << fmt::format("wrote {} images and {}\n", m.size(), (fs::path(fx_out) / "manifest.jsonl").string());
    } else if (*gen) {
      const Manifest m = load_manifest_arg(gen_manifest, gen_lenient);
      if (!gen_weights.empty()) {
        const auto parts = split_list(gen_weights);
        if (parts.size() != kPairClassCount) throw ValidationError("--class-weights needs six values");
        for (int i = 0; i < kPairClassCount; ++i) pcfg.class_weights[i] = std::stod(parts[i]);
      }
      const PairSet set = build_pairs(m, pcfg);
      report_errors(set.warnings);
      ensure_dir(gen_out);
      const auto res = materialize(set.pairs, m, gen_out, pcfg.ranges);
      echo_config(app, *gen, fs::path(gen_out) / "resolved_config.ini");
      for (const auto& e : res.errors) std::cerr << fmt::format("pair {}: {}\n", e.pair_index, e.message);
      std::cout << fmt::format("{} pairs written to {} ({} new images, {} reused)\n", res.lines.size(),
                               res.pair_file.string(), res.images_written, res.images_reused);
      if (res.dropped_fraction(set.pairs.size()) > 0.10) {
        std::cerr << "error: more than 10% of pairs were dropped\n";
        return kExitIo;
      }
    } else if (*ext) {
      if (ext_manifest.empty() && ext_pairs.empty()) throw ValidationError("give --manifest and/or --pairs");
      const auto fx = make_extractors(ext_extractor);
      FeatureStore store = open_store(fs::exists(ext_out) ? ext_out : std::string(), fx);
      std::vector<std::string> paths;
      if (!ext_manifest.empty()) paths = manifest_paths(load_manifest_arg(ext_manifest, false));
      if (!ext_pairs.empty()) {
        const auto more = pair_paths(read_pair_file(ext_pairs));
        paths.insert(paths.end(), more.begin(), more.end());
      }
      const auto errors = fill_store(store, paths, fx);
      report_errors(errors);
      const fs::path out(ext_out);
      if (out.has_parent_path()) ensure_dir(out.parent_path());
      store.save(out);
      echo_config(app, *ext, fs::path(ext_out + ".config.ini"));
      std::cout << fmt::format("{} feature vectors of dimension {} in {}\n", store.size(), store.dim(), ext_out);
      if (!errors.empty()) return kExitIo;
    } else if (*tr) {
      validate(tcfg);
      const auto fx = make_extractors(tr_extractor);
      const auto lines = read_pair_file(tr_pairs);
      const Manifest m = load_manifest_arg(tr_manifest, false);
      FeatureStore store = open_store(tr_features, fx);
      auto paths = pair_paths(lines);
      const auto val_paths = manifest_paths(filter_split(m, Split::val));
      paths.insert(paths.end(), val_paths.begin(), val_paths.end());
      report_errors(fill_store(store, paths, fx));
      const auto data = assemble_training_data(lines, m, store);
      if (data.missing) std::cerr << fmt::format("warning: {} pairs/triples skipped\n", data.missing);

      ensure_dir(tr_out);
      const fs::path out(tr_out);
      store.save(out / "features.ugcf");
      const auto res = train(data.pairs, data.val, tcfg, nullptr, fx.identity());
      std::string hist;
      for (const auto& r : res.history) hist += history_line(r) + "\n";
      write_text(out / "history.jsonl", hist);
      save_checkpoint(res.best, out / "model.rnkr");
      echo_config(app, *tr, out / "resolved_config.ini");
      std::cout << fmt::format("trained on {} pairs, {} val triples; best val accuracy {:.4f} at epoch {}\n",
                               data.pairs.size(), data.val.size(), res.best_val_accuracy, res.best_epoch);
    } else if (*sc) {
      const RankerModel model = load_checkpoint(sc_model);
      const auto fx = make_extractors(sc_extractor);
      if (auto warn = extractor_mismatch(model, fx.identity()); warn && sc_allow) std::cerr << "warning: " << *warn << "\n";
      const std::vector<fs::path> paths(sc_images.begin(), sc_images.end());
      const auto rep = score_images(model, fx, paths, sc_allow);
      for (const auto& s : rep.ranked) std::cout << fmt::format("{:.6f}\t{}\n", s.score, s.path);
      for (const auto& [p, msg] : rep.errors) std::cerr << "error: " << p << ": " << msg << "\n";
      if (!rep.errors.empty()) return kExitIo;
    } else if (*ev) {
      if (ev_model.empty() && !ev_baselines) throw ValidationError("nothing to evaluate: give --model or --baselines");
      const Manifest all = load_manifest_arg(ev_test, false);
      const Manifest test = filter_split(all, Split::test);
      std::set<std::string> reference;
      for (const auto& r : all.records)
        if (r.split != Split::test) reference.insert(r.id);
      for (const auto& t : ev_train)
        for (const auto& r : load_manifest_arg(t, false).records) reference.insert(r.id);
      check_leakage(test.records, reference);

      const auto fx = make_extractors(ev_extractor);
      std::optional<RankerModel> model;
      if (!ev_model.empty()) {
        model = load_checkpoint(ev_model);
        if (auto warn = extractor_mismatch(*model, fx.identity())) throw ContractError(*warn);
      }
      FeatureStore store = open_store(ev_features, fx);
      const auto errors = fill_store(store, manifest_paths(test), fx);
      if (!errors.empty()) {
        report_errors(errors);
        throw IoError(fmt::format("{} test image(s) could not be read", errors.size()));
      }
      const auto scorers = make_scorers(model ? &*model : nullptr, ev_baselines, test, store,
                                        fx.aesthetic->embed_dim());
      const auto rep = evaluate(scorers, test.records, ecfg);
      const std::string table = format_table(rep);
      std::cout << table;
      if (!ev_out.empty()) {
        ensure_dir(ev_out);
        write_text(fs::path(ev_out) / "report.txt", table);
        write_text(fs::path(ev_out) / "report.jsonl", format_json_lines(rep));
        echo_config(app, *ev, fs::path(ev_out) / "resolved_config.ini");
      }
    } else if (*di) {
      std::string text = di_spec;
      if (!text.empty() && text[0] == '@') {
        std::ifstream f(text.substr(1));
        if (!f) throw IoError("cannot read spec file " + text.substr(1));
        text.assign(std::istreambuf_iterator<char>(f), {});
      }
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("spec: ") + e.what());
      }
      std::vector<DistortionSpec> chain;
      try {
        if (j.is_array()) chain = j.get<std::vector<DistortionSpec>>();
        else chain.push_back(j.get<DistortionSpec>());
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("spec: ") + e.what());
      }
      const RgbImage img = read_image(di_in);
      write_png(di_out, distort_chain(img, chain, static_cast<int>(chain.size())));
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
