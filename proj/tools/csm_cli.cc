// Copyright 2026 The CSM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// csm: command-line workbench. Stages communicate through files:
//
//   csm synth    --out DIR
//   csm analyze  --manifest DIR/manifest.json --out features.tsv
//   csm fit-bf   --table features.tsv --out bfs.json [--ann-out ann.json]
//   csm optimize --table features.tsv --bf bfs.json --out interactions.json
//   csm score    --table features.tsv --bf bfs.json --interactions interactions.json
//                --out scores.json
//   csm evaluate --scores scores.json --table features.tsv --out eval.json
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
// Failures print one JSON record to stderr and leave no output file behind.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csm/basis_function.h"
#include "csm/error.h"
#include "csm/evaluation.h"
#include "csm/experiment.h"
#include "csm/manifest.h"
#include "csm/pipeline.h"
#include "csm/salience.h"
#include "csm/scoring.h"
#include "csm/stats.h"
#include "csm/synthesis.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace csm {
namespace {

bool g_verbose = false;

void Log(const std::string& message) {
  if (g_verbose) std::cerr << "csm: " << message << '\n';
}

// Defaults shared by all commands; read from --config or $CSM_CONFIG, then
// overridden by command-line flags.
struct Config {
  int jobs = 1;
  uint64_t seed = 42;
  std::optional<double> acceptance_threshold;
  SearchGrid grid = DefaultGrid();
  SearchGrid product_grid = CoarseGrid(21, 21);
  BfFitOptions bf;
  AnnConfig ann;
};

template <typename T>
void Take(const json& object, const char* key, T& target) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("config key '") + key + "': " + e.what());
  }
}

void CheckKeys(const json& object, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!object.is_object()) throw Error(ErrorCode::kSchemaError, where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::kSchemaError, "unknown config key '" + where + "." + key + "'");
  }
}

SearchGrid GridFrom(const json& g, SearchGrid base, bool allow_inverted) {
  double k_min = base.steepness.empty() ? 0.5 : base.steepness.front();
  double k_max = base.steepness.empty() ? 200.0 : base.steepness.back();
  size_t k_steps = base.steepness.size();
  size_t x_steps = base.midpoint.size();
  Take(g, "steepness_min", k_min);
  Take(g, "steepness_max", k_max);
  Take(g, "steepness_steps", k_steps);
  Take(g, "midpoint_steps", x_steps);
  if (allow_inverted) Take(g, "include_inverted", base.include_inverted);
  if (!(k_min > 0.0) || !(k_max >= k_min)) {
    throw Error(ErrorCode::kSchemaError, "grid steepness range must satisfy 0 < min <= max");
  }
  base.steepness = k_steps == 1 ? std::vector<double>{k_min} : LogSpace(k_min, k_max, k_steps);
  base.midpoint = x_steps == 1 ? std::vector<double>{0.5} : LinSpace(0.0, 1.0, x_steps);
  return base;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Config LoadConfig(const std::string& path) {
  Config c;
  if (path.empty()) return c;
  json j;
  try {
    j = json::parse(ReadText(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, "config " + path + ": " + e.what());
  }
  CheckKeys(j, {"jobs", "seed", "acceptance_threshold", "grid", "product_grid", "bf", "ann"},
            "config");
  Take(j, "jobs", c.jobs);
  Take(j, "seed", c.seed);
  if (j.contains("acceptance_threshold")) {
    double t = 0.0;
    Take(j, "acceptance_threshold", t);
    c.acceptance_threshold = t;
  }
  if (j.contains("grid")) {
    CheckKeys(j["grid"],
              {"steepness_min", "steepness_max", "steepness_steps", "midpoint_steps",
               "include_inverted"},
              "grid");
    c.grid = GridFrom(j["grid"], c.grid, true);
  }
  if (j.contains("product_grid")) {
    CheckKeys(j["product_grid"],
              {"steepness_min", "steepness_max", "steepness_steps", "midpoint_steps"},
              "product_grid");
    c.product_grid = GridFrom(j["product_grid"], c.product_grid, false);
  }
  if (j.contains("bf")) {
    const json& b = j["bf"];
    CheckKeys(b, {"max_terms", "gcv_penalty", "min_rows", "span_alpha", "min_knot_gap"}, "bf");
    Take(b, "max_terms", c.bf.max_terms);
    Take(b, "gcv_penalty", c.bf.gcv_penalty);
    Take(b, "min_rows", c.bf.min_rows);
    Take(b, "span_alpha", c.bf.span_alpha);
    Take(b, "min_knot_gap", c.bf.min_knot_gap);
  }
  if (j.contains("ann")) {
    const json& a = j["ann"];
    CheckKeys(a, {"hidden", "epochs", "learning_rate", "init_scale", "seed"}, "ann");
    Take(a, "hidden", c.ann.hidden);
    Take(a, "epochs", c.ann.epochs);
    Take(a, "learning_rate", c.ann.learning_rate);
    Take(a, "init_scale", c.ann.init_scale);
    Take(a, "seed", c.ann.seed);
  }
  return c;
}

enum class Format { kText, kJson };

void Emit(Format format, const std::string& text, const std::string& json_text) {
  std::cout << (format == Format::kJson ? json_text : text);
  if (format == Format::kJson && !json_text.empty() && json_text.back() != '\n') std::cout << '\n';
}

// Replaces `target` by a fully written sibling directory.
void PublishDirectory(const fs::path& staging, const fs::path& target) {
  if (fs::exists(target)) fs::remove_all(target);
  fs::rename(staging, target);
}

FeatureTable LoadTableWithMos(const std::string& table_path, const std::string& manifest_path) {
  FeatureTable table = LoadFeatureTable(table_path);
  if (manifest_path.empty()) return table;
  const DatasetManifest m = LoadManifest(manifest_path, {.check_audio = false});
  std::map<std::pair<std::string, std::string>, const ConditionEntry*> index;
  for (const ConditionEntry& c : m.conditions) index[{c.signal_id, c.treatment_id}] = &c;
  for (FeatureRow& row : table) {
    auto it = index.find({row.signal, row.treatment});
    if (it == index.end()) {
      throw Error(ErrorCode::kSchemaError,
                  "condition (" + row.signal + ", " + row.treatment + ") missing from manifest");
    }
    row.mos = it->second->mos;
    row.ci95 = it->second->ci95;
  }
  return table;
}

FeatureTable RatedRows(const FeatureTable& table) {
  FeatureTable out;
  for (const FeatureRow& row : table) {
    if (std::isfinite(row.mos)) out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::optional<uint64_t> seed;
  size_t signals = 24;
  std::string treatments = "train";
  std::string split;
  double duration = 4.0;
  bool class_independent = false;
};

int RunSynth(const SynthArgs& a, const Config& config, Format format) {
  SyntheticSpec spec;
  spec.seed = a.seed.value_or(config.seed);
  spec.signal_count = a.signals;
  spec.duration_s = a.duration;
  if (a.treatments == "train") {
    spec.treatments = DefaultTrainingTreatments();
  } else if (a.treatments == "validate") {
    spec.treatments = DefaultValidationTreatments();
  } else {
    throw Error(ErrorCode::kUsage, "--treatments must be 'train' or 'validate'");
  }
  spec.split = a.split.empty() ? a.treatments : a.split;
  spec.latent.class_dependent = !a.class_independent;

  const fs::path target(a.out);
  const fs::path staging = target.string() + ".tmp";
  if (fs::exists(staging)) fs::remove_all(staging);
  Log("synthesizing " + std::to_string(spec.signal_count) + " x " +
      std::to_string(spec.treatments.size()) + " conditions");
  try {
    GenerateSynthetic(spec, staging);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  PublishDirectory(staging, target);

  json report = {{"command", "synth"},
                 {"directory", target.string()},
                 {"seed", spec.seed},
                 {"split", spec.split},
                 {"signals", spec.signal_count},
                 {"treatments", spec.treatments.size()},
                 {"class_dependent", spec.latent.class_dependent}};
  std::ostringstream text;
  text << "wrote " << spec.signal_count * spec.treatments.size() << " conditions ("
       << spec.signal_count << " signals x " << spec.treatments.size() << " treatments) to "
       << target.string() << "\n";
  Emit(format, text.str(), report.dump(2));
  return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string manifest;
  std::string out;
  std::string segment_dump;
  bool resample = false;
  std::string tail_policy = "drop";
  double max_delay_ms = 250.0;
};

int RunAnalyze(const AnalyzeArgs& a, const Config& config, Format format) {
  AnalysisOptions options;
  options.ingest.resample = a.resample;
  options.ingest.max_delay_ms = a.max_delay_ms;
  if (a.tail_policy == "drop") {
    options.segments.tail_policy = TailPolicy::kDrop;
  } else if (a.tail_policy == "pad") {
    options.segments.tail_policy = TailPolicy::kPadZero;
  } else {
    throw Error(ErrorCode::kUsage, "--tail-policy must be 'drop' or 'pad'");
  }
  const DatasetManifest manifest = LoadManifest(a.manifest);
  Log("analyzing " + std::to_string(manifest.conditions.size()) + " conditions on " +
      std::to_string(config.jobs) + " worker(s)");
  std::vector<std::vector<DmValues>> segments;
  const FeatureTable table = AnalyzeManifest(manifest, options, config.jobs,
                                             a.segment_dump.empty() ? nullptr : &segments);
  std::ostringstream tsv;
  WriteFeatureTable(tsv, table);
  std::string dump;
  if (!a.segment_dump.empty()) {
    std::ostringstream d;
    d << "signal\ttreatment\tsegment";
    for (std::string_view name : kDmNames) d << '\t' << name;
    d << '\n';
    char buf[32];
    for (size_t i = 0; i < table.size(); ++i) {
      for (size_t k = 0; k < segments[i].size(); ++k) {
        d << table[i].signal << '\t' << table[i].treatment << '\t' << k;
        for (size_t m = 0; m < kDmCount; ++m) {
          std::snprintf(buf, sizeof(buf), "%.17g", segments[i][k][m]);
          d << '\t' << buf;
        }
        d << '\n';
      }
    }
    dump = d.str();
  }
  if (a.out.empty()) {
    if (!dump.empty()) WriteFileAtomic(a.segment_dump, dump);
    std::cout << tsv.str();
    return 0;
  }
  WriteFileAtomic(a.out, tsv.str());
  if (!dump.empty()) WriteFileAtomic(a.segment_dump, dump);
  json report = {{"command", "analyze"}, {"rows", table.size()}, {"output", a.out}};
  Emit(format, "wrote " + std::to_string(table.size()) + " feature rows to " + a.out + "\n",
       report.dump(2));
  return 0;
}

// ---------------------------------------------------------------- fit-bf

int RunFitBf(const std::string& table_path, const std::string& manifest_path,
             const std::string& out, const std::string& ann_out, const Config& config,
             Format format) {
  const FeatureTable table = RatedRows(LoadTableWithMos(table_path, manifest_path));
  const BfSet bfs = FitBasisFunctions(table, config.bf, config.jobs);
  std::optional<AnnModel> ann;
  if (!ann_out.empty()) {
    std::vector<AnnInput> x;
    std::vector<double> mos;
    for (const FeatureRow& row : table) {
      x.push_back(AnnFeatures(row));
      mos.push_back(row.mos);
    }
    Log("training baseline network on " + std::to_string(x.size()) + " rows");
    ann = TrainAnn(x, mos, config.ann);
  }
  // Both models are serialized before either file is written.
  const std::string bf_text = SerializeBasisFunctions(bfs);
  const std::string ann_text = ann ? SerializeAnn(*ann) : std::string();
  WriteFileAtomic(out, bf_text);
  if (ann) WriteFileAtomic(ann_out, ann_text);

  std::ostringstream text;
  json rows = json::array();
  char line[160];
  std::snprintf(line, sizeof(line), "%-20s %6s %6s %9s %9s\n", "DM", "rows", "terms", "RMSE",
                "GCV");
  text << line;
  for (const BasisFunction& bf : bfs) {
    std::snprintf(line, sizeof(line), "%-20s %6zu %6zu %9.3f %9.3f\n", bf.dm_name.c_str(),
                  bf.fit_stats.rows, bf.fit_stats.term_count, bf.fit_stats.rmse,
                  bf.fit_stats.gcv);
    text << line;
    rows.push_back({{"dm_name", bf.dm_name},
                    {"rows", bf.fit_stats.rows},
                    {"terms", bf.fit_stats.term_count},
                    {"rmse", bf.fit_stats.rmse},
                    {"gcv", bf.fit_stats.gcv}});
  }
  if (ann) {
    std::snprintf(line, sizeof(line), "baseline network training RMSE %.3f\n", ann->training_rmse);
    text << line;
  }
  json report = {{"command", "fit-bf"}, {"basis_functions", rows}};
  if (ann) report["ann_training_rmse"] = ann->training_rmse;
  Emit(format, text.str(), report.dump(2));
  return 0;
}

// ---------------------------------------------------------------- optimize

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

int RunOptimizeFixture(const std::string& fixture_path, const std::string& out,
                       const Config& config, Format format) {
  const InteractionFixture fx = LoadInteractionFixture(fixture_path);
  SalienceVector salience;
  salience.dm_name = "lin_dist";
  salience.signals = fx.signals;
  for (double s : fx.salience) salience.values.push_back(s);
  const DpwSearchResult result = OptimizeDpw(salience, fx.cem, config.grid);
  const std::optional<double> c_transcribed = Pearson(fx.salience, fx.dpw);

  // The weight is declared INV when the curve anti-correlates with salience,
  // so the evaluated weight always correlates positively.
  LogisticParams params = result.params;
  params.inverted = result.c_opt < 0.0;
  InteractionEntry entry;
  entry.name = "DPW1";
  entry.dm_name = "lin_dist";
  entry.factors = {DpwFactor{"prob_speech", params, result.c_raw, result.c_opt}};
  entry.c_weight = std::abs(result.c_opt);
  const double threshold = config.acceptance_threshold.value_or(0.5);
  entry.accepted = std::abs(result.c_opt) >= threshold;
  InteractionTable table;
  table.tag = "fixture";
  table.acceptance_threshold = threshold;
  table.entries = {entry};
  if (!out.empty()) WriteFileAtomic(out, SerializeInteractionTable(table));

  std::ostringstream text;
  text << InteractionReport(table);
  char line[200];
  std::snprintf(line, sizeof(line),
                "k = %.4g, x0 = %.4g, %s; transcribed weight C = %.4f; %zu candidates\n",
                params.steepness, params.midpoint, params.inverted ? "INV" : "non-inverted", c_transcribed.value_or(NAN),
                result.evaluated);
  text << line;
  json report = {{"command", "optimize"},
                 {"fixture", fixture_path},
                 {"cem", "prob_speech"},
                 {"target_dm", "lin_dist"},
                 {"c_raw", OptionalNumber(result.c_raw)},
                 {"c_opt", result.c_opt},
                 {"c_transcribed_dpw", OptionalNumber(c_transcribed)},
                 {"steepness", params.steepness},
                 {"midpoint", params.midpoint},
                 {"inverted", params.inverted},
                 {"accepted", entry.accepted},
                 {"evaluated", result.evaluated}};
  Emit(format, text.str(), report.dump(2));
  return 0;
}

int RunOptimize(const std::string& table_path, const std::string& manifest_path,
                const std::string& bf_path, const std::string& structure_path,
                const std::string& out, const Config& config, Format format) {
  const BfSet bfs = LoadBasisFunctions(bf_path);
  const FeatureTable table = RatedRows(LoadTableWithMos(table_path, manifest_path));
  const InteractionTable structure =
      structure_path.empty() ? DefaultInteractionTable() : LoadInteractionTable(structure_path);
  TrainingOptions options;
  options.grid = config.grid;
  options.product_grid = config.product_grid;
  options.acceptance_threshold = config.acceptance_threshold;
  Log("searching " + std::to_string(options.grid.size()) + " candidates per interaction");
  const InteractionTable trained = TrainInteractionTable(table, bfs, structure, options);
  const std::string serialized = SerializeInteractionTable(trained);
  WriteFileAtomic(out, serialized);
  Emit(format, InteractionReport(trained), serialized);
  return 0;
}

// ---------------------------------------------------------------- score

int RunScore(const std::string& table_path, const std::string& manifest_path,
             const std::string& bf_path, const std::string& interactions_path,
             const std::string& ann_path, const std::string& system, const std::string& out,
             const Config& config, Format format) {
  const bool is_ann = system == "ann";
  if (!is_ann && system != "csm" && system != "csm-raw") {
    throw Error(ErrorCode::kUsage, "--system must be csm, csm-raw or ann");
  }
  // Models first: a missing model fails before any audio work.
  std::optional<BfSet> bfs;
  std::optional<InteractionTable> interactions;
  std::optional<AnnModel> ann;
  if (is_ann) {
    if (ann_path.empty()) throw Error(ErrorCode::kUsage, "--system ann needs --ann");
    ann = ParseAnn(ReadText(ann_path));
  } else {
    if (bf_path.empty()) throw Error(ErrorCode::kMissingBf, "no basis function file given (--bf)");
    bfs = LoadBasisFunctions(bf_path);
    // Without an interaction table every DM keeps the uniform weight.
    interactions = interactions_path.empty() ? InteractionTable{}
                                             : LoadInteractionTable(interactions_path);
  }
  FeatureTable table;
  if (!table_path.empty()) {
    table = LoadFeatureTable(table_path);
  } else if (!manifest_path.empty()) {
    table = AnalyzeManifest(LoadManifest(manifest_path), AnalysisOptions{}, config.jobs);
  } else {
    throw Error(ErrorCode::kUsage, "score needs --table or --manifest");
  }

  const std::string label = is_ann ? "DM + CEM" : system == "csm" ? "PROPOSED (Opt.)" : "PROPOSED";
  json scores = json::array();
  std::ostringstream text;
  char line[200];
  std::snprintf(line, sizeof(line), "%-12s %-10s %8s\n", "signal", "treatment", "score");
  text << line;
  for (const FeatureRow& row : table) {
    json record = {{"signal", row.signal}, {"treatment", row.treatment}};
    double value = 0.0;
    if (is_ann) {
      value = ann->Predict(AnnFeatures(row));
      record["score"] = value;
    } else {
      const QualityScore q = Score(row.dm, row.cem, *bfs, *interactions,
                                   system == "csm" ? WeightMode::kOptimized : WeightMode::kRaw);
      value = q.value;
      record["score"] = value;
      record["uniform_fallback"] = q.uniform_fallback;
      json parts = json::array();
      for (const DmContribution& c : q.contributions) {
        parts.push_back({{"dm_name", c.dm_name},
                         {"dm_value", c.dm_value},
                         {"bf_value", c.bf_value},
                         {"weight", c.weight}});
      }
      record["contributions"] = parts;
      record["cem"] = {{"epn", row.cem.epn},
                       {"pdev", row.cem.pdev},
                       {"prob_speech", row.cem.prob_speech}};
    }
    scores.push_back(record);
    std::snprintf(line, sizeof(line), "%-12s %-10s %8.3f\n", row.signal.c_str(),
                  row.treatment.c_str(), value);
    text << line;
  }
  json doc = {{"format", "csm-scores"}, {"version", 1}, {"system", label}, {"scores", scores}};
  const std::string serialized = doc.dump(2) + "\n";
  if (!out.empty()) WriteFileAtomic(out, serialized);
  Emit(format, text.str(), serialized);
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct ScoreFile {
  std::string system;
  std::map<std::pair<std::string, std::string>, double> values;
};

ScoreFile LoadScores(const std::string& path) {
  json doc;
  try {
    doc = json::parse(ReadText(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, "scores " + path + ": " + e.what());
  }
  ScoreFile f;
  try {
    if (doc.at("format").get<std::string>() != "csm-scores") {
      throw Error(ErrorCode::kSchemaError, path + " is not a score file");
    }
    f.system = doc.at("system").get<std::string>();
    for (const json& s : doc.at("scores")) {
      const auto key = std::make_pair(s.at("signal").get<std::string>(),
                                      s.at("treatment").get<std::string>());
      if (!f.values.emplace(key, s.at("score").get<double>()).second) {
        throw Error(ErrorCode::kDuplicateCondition,
                    "duplicate score for (" + key.first + ", " + key.second + ") in " + path);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, "scores " + path + ": " + e.what());
  }
  return f;
}

int RunEvaluate(const std::vector<std::string>& score_paths, const std::string& table_path,
                const std::string& manifest_path, const std::string& out, Format format) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::vector<double> mos;
  std::vector<double> ci;
  if (!manifest_path.empty()) {
    const DatasetManifest m = LoadManifest(manifest_path, {.check_audio = false});
    for (const ConditionEntry& c : m.conditions) {
      keys.emplace_back(c.signal_id, c.treatment_id);
      mos.push_back(c.mos);
      ci.push_back(c.ci95);
    }
  } else if (!table_path.empty()) {
    for (const FeatureRow& row : RatedRows(LoadFeatureTable(table_path))) {
      keys.emplace_back(row.signal, row.treatment);
      mos.push_back(row.mos);
      ci.push_back(row.ci95);
    }
  } else {
    throw Error(ErrorCode::kUsage, "evaluate needs --manifest or --table for subjective data");
  }
  std::vector<EvalReport> reports;
  for (const std::string& path : score_paths) {
    const ScoreFile f = LoadScores(path);
    std::vector<double> predictions;
    for (const auto& key : keys) {
      auto it = f.values.find(key);
      if (it == f.values.end()) {
        throw Error(ErrorCode::kSchemaError, path + " has no score for (" + key.first + ", " +
                                                 key.second + ")");
      }
      predictions.push_back(it->second);
    }
    reports.push_back(Evaluate(f.system, predictions, mos, ci));
  }
  const std::string serialized = EvalJson(reports);
  if (!out.empty()) WriteFileAtomic(out, serialized);
  Emit(format, EvalTable(reports), serialized);
  return 0;
}

int ReportError(ErrorCode code, const std::string& message) {
  const int exit_code = ExitCodeFor(code);
  json record = {{"error", std::string(ErrorName(code))},
                 {"message", message},
                 {"exit_code", exit_code}};
  std::cerr << record.dump() << '\n';
  return exit_code;
}

int Main(int argc, char** argv) {
  CLI::App app{"Cognitive salience model workbench"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<int> jobs;
  bool json_output = false;
  app.add_option("--config", config_path, "JSON defaults (otherwise $CSM_CONFIG)");
  app.add_option("--jobs,-j", jobs, "worker threads")->check(CLI::Range(1, 256));
  app.add_flag("--json", json_output, "print the report as JSON");
  app.add_flag("--verbose,-v", g_verbose, "progress messages on stderr");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic listening-test corpus");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--signals", synth.signals, "signal count")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--treatments", synth.treatments, "treatment set: train or validate");
  synth_cmd->add_option("--split", synth.split, "split name (defaults to the treatment set)");
  synth_cmd->add_option("--duration", synth.duration, "excerpt length in seconds");
  synth_cmd->add_flag("--class-independent", synth.class_independent,
                      "disable the class-dependent salience rule");

  std::string manifest, table, out, bf, ann, ann_out, interactions, structure, fixture;
  std::string system = "csm";
  std::vector<std::string> score_files;

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "extract DM and CEM features");
  analyze_cmd->add_option("--manifest", analyze.manifest, "dataset manifest")->required();
  analyze_cmd->add_option("--out", analyze.out, "feature table (TSV); stdout when omitted");
  analyze_cmd->add_option("--segment-dump", analyze.segment_dump,
                          "per-segment metrics (TSV)");
  analyze_cmd->add_flag("--resample", analyze.resample, "resample inputs to 48 kHz");
  analyze_cmd->add_option("--tail-policy", analyze.tail_policy, "drop or pad");
  analyze_cmd->add_option("--max-delay-ms", analyze.max_delay_ms, "alignment search window")
      ->check(CLI::NonNegativeNumber);

  auto* fit_cmd = app.add_subcommand("fit-bf", "fit basis functions");
  fit_cmd->add_option("--table", table, "feature table")->required();
  fit_cmd->add_option("--manifest", manifest, "take MOS from this manifest");
  fit_cmd->add_option("--out", out, "basis function file (JSON)")->required();
  fit_cmd->add_option("--ann-out", ann_out, "also train the DM+CEM network");

  auto* opt_cmd = app.add_subcommand("optimize", "fit detection probability weights");
  opt_cmd->add_option("--fixture", fixture, "salience/CEM fixture (TSV)");
  opt_cmd->add_option("--table", table, "feature table");
  opt_cmd->add_option("--manifest", manifest, "take MOS from this manifest");
  opt_cmd->add_option("--bf", bf, "basis function file");
  opt_cmd->add_option("--structure", structure, "interaction table to train");
  opt_cmd->add_option("--out", out, "trained interaction table (JSON)");

  auto* score_cmd = app.add_subcommand("score", "score conditions");
  score_cmd->add_option("--table", table, "feature table");
  score_cmd->add_option("--manifest", manifest, "analyze this manifest instead");
  score_cmd->add_option("--bf", bf, "basis function file");
  score_cmd->add_option("--interactions", interactions, "trained interaction table");
  score_cmd->add_option("--ann", ann, "DM+CEM network file");
  score_cmd->add_option("--system", system, "csm, csm-raw or ann");
  score_cmd->add_option("--out", out, "score file (JSON)");

  auto* eval_cmd = app.add_subcommand("evaluate", "correlation and RMSE* against MOS");
  eval_cmd->add_option("--scores", score_files, "score files")->required();
  eval_cmd->add_option("--manifest", manifest, "subjective data");
  eval_cmd->add_option("--table", table, "subjective data from a feature table");
  eval_cmd->add_option("--out", out, "evaluation report (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError(ErrorCode::kUsage, e.what());
  }

  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv("CSM_CONFIG")) config_path = env;
    }
    Config config = LoadConfig(config_path);
    if (jobs) config.jobs = *jobs;
    const Format format = json_output ? Format::kJson : Format::kText;

    if (*synth_cmd) return RunSynth(synth, config, format);
    if (*analyze_cmd) return RunAnalyze(analyze, config, format);
    if (*fit_cmd) return RunFitBf(table, manifest, out, ann_out, config, format);
    if (*opt_cmd) {
      if (!fixture.empty()) return RunOptimizeFixture(fixture, out, config, format);
      if (table.empty() || bf.empty() || out.empty()) {
        throw Error(ErrorCode::kUsage, "optimize needs --fixture, or --table, --bf and --out");
      }
      return RunOptimize(table, manifest, bf, structure, out, config, format);
    }
    if (*score_cmd) {
      return RunScore(table, manifest, bf, interactions, ann, system, out, config, format);
    }
    if (*eval_cmd) return RunEvaluate(score_files, table, manifest, out, format);
    throw Error(ErrorCode::kUsage, "no command");
  } catch (const Error& e) {
    return ReportError(e.code(), e.what());
  } catch (const fs::filesystem_error& e) {
    return ReportError(ErrorCode::kUnreadableFile, e.what());
  }
}

}  // namespace
}  // namespace csm

int main(int argc, char** argv) { return csm::Main(argc, argv); }
