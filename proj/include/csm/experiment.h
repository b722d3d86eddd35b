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

#ifndef CSM_EXPERIMENT_H_
#define CSM_EXPERIMENT_H_

#include <cstdint>
#include <vector>

#include "csm/basis_function.h"
#include "csm/evaluation.h"
#include "csm/pipeline.h"
#include "csm/salience.h"
#include "csm/scoring.h"
#include "csm/synthesis.h"

namespace csm {

// Train/validate run on generated data: basis functions and DPWs come from
// the training split, all systems are scored on the validation split.
struct ExperimentOptions {
  uint64_t seed = 42;
  size_t signal_count = 24;
  double duration_s = 4.0;
  LatentModel latent;
  std::vector<Degradation> train_treatments = DefaultTrainingTreatments();
  std::vector<Degradation> validation_treatments = DefaultValidationTreatments();
  AnalysisOptions analysis;
  BfFitOptions bf;
  TrainingOptions training;
  AnnConfig ann;
  InteractionTable structure = DefaultInteractionTable();
  int jobs = 1;
};

struct ExperimentResult {
  FeatureTable train;
  FeatureTable validation;
  BfSet bfs;
  InteractionTable table;
  AnnModel ann;
  // Direct search of probSpeech against LinDist salience on training data.
  DpwSearchResult speech_lin_dist;
  EvalReport optimized;  // "PROPOSED (Opt.)"
  EvalReport raw;        // "PROPOSED"
  EvalReport baseline;   // "DM + CEM"
};

SyntheticSpec TrainSpec(const ExperimentOptions& options);
SyntheticSpec ValidationSpec(const ExperimentOptions& options);

// Everything downstream of feature extraction.
ExperimentResult RunOnFeatures(FeatureTable train, FeatureTable validation,
                               const ExperimentOptions& options);

// Generated train/validation data with extracted features. Audio buffers are
// released after analysis; ratings can be redrawn with RelabelCorpus.
struct SyntheticCorpus {
  SyntheticDataset train;
  SyntheticDataset validation;
  FeatureTable train_features;
  FeatureTable validation_features;
};

SyntheticCorpus BuildSyntheticCorpus(const ExperimentOptions& options);
void RelabelCorpus(SyntheticCorpus& corpus, const LatentModel& latent);

ExperimentResult RunSyntheticExperiment(const ExperimentOptions& options);

// Scores for each row of `features`.
std::vector<double> ScoreTable(const FeatureTable& features, const BfSet& bfs,
                               const InteractionTable& table, WeightMode mode);
std::vector<double> PredictTable(const FeatureTable& features, const AnnModel& model);

}  // namespace csm

#endif  // CSM_EXPERIMENT_H_
