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

#ifndef CSM_SCORING_H_
#define CSM_SCORING_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csm/basis_function.h"
#include "csm/cognitive_metrics.h"
#include "csm/distortion_metrics.h"
#include "csm/pipeline.h"
#include "csm/salience.h"

namespace csm {

// One thresholded CEM inside a weight expression.
struct DpwFactor {
  std::string cem;
  LogisticParams params;
  // Correlations with the target salience of the raw CEM and of the
  // non-inverted logistic output, as found during training.
  std::optional<double> c_raw;
  std::optional<double> c_opt;
  bool operator==(const DpwFactor&) const = default;
};

struct InteractionEntry {
  std::string name;      // e.g. "DPW1"
  std::string dm_name;   // target distortion metric
  std::vector<DpwFactor> factors;  // product of factor DPWs
  // Reuses the parameters of an earlier single-factor entry with INV
  // flipped, i.e. name = 1 - tied_to.
  std::string tied_to;
  bool forced = false;
  bool accepted = true;
  // Correlation of the weight as evaluated (INV applied) with salience.
  std::optional<double> c_weight;
  std::string note;
  bool operator==(const InteractionEntry&) const = default;
};

struct InteractionTable {
  int version = 1;
  std::string tag = "default";
  double acceptance_threshold = 0.5;
  std::vector<InteractionEntry> entries;
  bool operator==(const InteractionTable&) const = default;
};

// Structure of the published selection: LinDist suppressed by speech and by
// streaming, noise loudness boosted by speech, missing components as its
// complement, segmental NMR weighted by streaming against informational
// masking. Logistic parameters are placeholders until trained.
InteractionTable DefaultInteractionTable();

// Throws InvalidSpec for unknown metric names or bad ties.
void ValidateInteractionTable(const InteractionTable& table);

std::string EquationText(const InteractionEntry& entry);

std::string SerializeInteractionTable(const InteractionTable& table);
InteractionTable ParseInteractionTable(const std::string& text);
InteractionTable LoadInteractionTable(const std::filesystem::path& path);

// Optimized: each factor is its logistic DPW. Raw: each factor is the CEM
// itself (1 - CEM under INV).
enum class WeightMode { kOptimized, kRaw };

double EntryWeight(const InteractionEntry& entry, const CemRecord& cem, WeightMode mode);

struct Weights {
  std::array<double, kDmCount> values{};
  // Every DM weight underflowed to zero; uniform weights were substituted.
  bool uniform_fallback = false;
};

// Accepted entries multiply into their target's weight, DMs without accepted
// entries get 1, then the vector is normalized to unit sum.
Weights ComputeWeights(const CemRecord& cem, const InteractionTable& table,
                       WeightMode mode = WeightMode::kOptimized);

struct DmContribution {
  std::string dm_name;
  double dm_value = 0.0;
  double bf_value = 0.0;
  double weight = 0.0;
};

struct QualityScore {
  double value = 0.0;
  std::array<DmContribution, kDmCount> contributions;
  CemRecord cem;
  bool uniform_fallback = false;
};

QualityScore Score(const DmValues& dm, const CemRecord& cem, const BfSet& bfs,
                   const InteractionTable& table, WeightMode mode = WeightMode::kOptimized);

// Salience of one DM for every signal of `features`, in SignalOrder.
SalienceVector ComputeSalienceVector(const FeatureTable& features, const BfSet& bfs, size_t dm);

// Mean of one CEM over each signal's conditions, in SignalOrder.
std::vector<double> SignalCemMeans(const FeatureTable& features, size_t cem);

struct TrainingOptions {
  SearchGrid grid = DefaultGrid();
  SearchGrid product_grid = CoarseGrid(21, 21);
  std::optional<double> acceptance_threshold;  // overrides the table's
};

// Fits logistic parameters for every entry of `structure` and decides
// acceptance: forced entries are kept, others need a weight/salience
// correlation of at least the threshold, which for a single factor means
// |c_opt| >= threshold with c_opt < 0 exactly when INV is declared.
InteractionTable TrainInteractionTable(const FeatureTable& features, const BfSet& bfs,
                                       const InteractionTable& structure,
                                       const TrainingOptions& options = {});

// Fixed-width table with one row per factor (Weight, CEM, Target DM,
// C raw / opt, Equation).
std::string InteractionReport(const InteractionTable& table);

// Basis functions for all six metrics from a feature table.
BfSet FitBasisFunctions(const FeatureTable& features, const BfFitOptions& options = {},
                        int jobs = 1);

}  // namespace csm

#endif  // CSM_SCORING_H_
