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

#include "csm/experiment.h"

#include "csm/error.h"

namespace csm {
namespace {

std::vector<double> Column(const FeatureTable& t, double FeatureRow::*field) {
  std::vector<double> out;
  out.reserve(t.size());
  for (const FeatureRow& row : t) out.push_back(row.*field);
  return out;
}

}  // namespace

SyntheticSpec TrainSpec(const ExperimentOptions& o) {
  SyntheticSpec s;
  s.signal_count = o.signal_count;
  s.treatments = o.train_treatments;
  s.seed = o.seed;
  s.split = "train";
  s.duration_s = o.duration_s;
  s.latent = o.latent;
  return s;
}

SyntheticSpec ValidationSpec(const ExperimentOptions& o) {
  SyntheticSpec s = TrainSpec(o);
  s.treatments = o.validation_treatments;
  s.split = "validate";
  return s;
}

std::vector<double> ScoreTable(const FeatureTable& features, const BfSet& bfs,
                               const InteractionTable& table, WeightMode mode) {
  std::vector<double> out;
  out.reserve(features.size());
  for (const FeatureRow& row : features) out.push_back(Score(row.dm, row.cem, bfs, table, mode).value);
  return out;
}

std::vector<double> PredictTable(const FeatureTable& features, const AnnModel& model) {
  std::vector<double> out;
  out.reserve(features.size());
  for (const FeatureRow& row : features) out.push_back(model.Predict(AnnFeatures(row)));
  return out;
}

ExperimentResult RunOnFeatures(FeatureTable train, FeatureTable validation,
                               const ExperimentOptions& options) {
  ExperimentResult r;
  r.train = std::move(train);
  r.validation = std::move(validation);
  r.bfs = FitBasisFunctions(r.train, options.bf, options.jobs);
  r.table = TrainInteractionTable(r.train, r.bfs, options.structure, options.training);
  r.speech_lin_dist =
      OptimizeDpw(ComputeSalienceVector(r.train, r.bfs, DmIndex("lin_dist")),
                  SignalCemMeans(r.train, CemIndex("prob_speech")), options.training.grid);

  std::vector<AnnInput> x;
  for (const FeatureRow& row : r.train) x.push_back(AnnFeatures(row));
  r.ann = TrainAnn(x, Column(r.train, &FeatureRow::mos), options.ann);

  const auto mos = Column(r.validation, &FeatureRow::mos);
  const auto ci = Column(r.validation, &FeatureRow::ci95);
  r.optimized = Evaluate("PROPOSED (Opt.)",
                         ScoreTable(r.validation, r.bfs, r.table, WeightMode::kOptimized), mos, ci);
  r.raw = Evaluate("PROPOSED", ScoreTable(r.validation, r.bfs, r.table, WeightMode::kRaw), mos, ci);
  r.baseline = Evaluate("DM + CEM", PredictTable(r.validation, r.ann), mos, ci);
  return r;
}

SyntheticCorpus BuildSyntheticCorpus(const ExperimentOptions& options) {
  SyntheticCorpus corpus;
  corpus.train = Synthesize(TrainSpec(options));
  corpus.train_features = AnalyzeSynthetic(corpus.train, options.analysis, options.jobs);
  corpus.validation = Synthesize(ValidationSpec(options));
  corpus.validation_features = AnalyzeSynthetic(corpus.validation, options.analysis, options.jobs);
  for (SyntheticDataset* d : {&corpus.train, &corpus.validation}) {
    for (SyntheticSignal& s : d->signals) std::vector<float>().swap(s.reference);
    for (SyntheticCondition& c : d->conditions) std::vector<float>().swap(c.sut);
  }
  return corpus;
}

void RelabelCorpus(SyntheticCorpus& corpus, const LatentModel& latent) {
  auto relabel = [&](SyntheticDataset& data, FeatureTable& table) {
    AssignRatings(data, latent);
    for (size_t i = 0; i < table.size(); ++i) {
      table[i].mos = data.conditions[i].mos;
      table[i].ci95 = data.conditions[i].ci95;
    }
  };
  relabel(corpus.train, corpus.train_features);
  relabel(corpus.validation, corpus.validation_features);
}

ExperimentResult RunSyntheticExperiment(const ExperimentOptions& options) {
  SyntheticCorpus corpus = BuildSyntheticCorpus(options);
  return RunOnFeatures(std::move(corpus.train_features), std::move(corpus.validation_features),
                       options);
}

}  // namespace csm
