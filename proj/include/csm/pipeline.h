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

#ifndef CSM_PIPELINE_H_
#define CSM_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csm/audio_pair.h"
#include "csm/cognitive_metrics.h"
#include "csm/distortion_metrics.h"
#include "csm/ear_model.h"
#include "csm/manifest.h"
#include "csm/synthesis.h"

namespace csm {

struct AnalysisOptions {
  EarModelConfig ear;
  IngestOptions ingest;
  SegmentOptions segments;
  PdevOptions pdev;
  SpeechClassifier classifier;
};

struct PairAnalysis {
  SegmentPlan plan;
  DmRecord dm;  // channel-averaged
  CemRecord cem;
};

PairAnalysis AnalyzePair(const AudioPair& pair, const EarModel& model,
                         const AnalysisOptions& options);

// One row per (signal, treatment) condition. MOS columns are NaN for
// conditions without subjective data.
struct FeatureRow {
  std::string signal;
  std::string treatment;
  DmValues dm;
  CemRecord cem;
  double mos = 0.0;
  double ci95 = 0.0;
  bool operator==(const FeatureRow&) const = default;
};

using FeatureTable = std::vector<FeatureRow>;

// Runs `count` independent tasks on up to `jobs` threads. The first
// exception thrown by any task is rethrown after all workers stop.
void ParallelFor(size_t count, int jobs, const std::function<void(size_t)>& task);

// `segments`, when given, receives the per-segment metrics of each row.
FeatureTable AnalyzeManifest(const DatasetManifest& manifest, const AnalysisOptions& options,
                             int jobs = 1,
                             std::vector<std::vector<DmValues>>* segments = nullptr);

// In-memory variant for synthetic datasets (no WAV round trip).
FeatureTable AnalyzeSynthetic(const SyntheticDataset& dataset, const AnalysisOptions& options,
                              int jobs = 1);

void WriteFeatureTable(std::ostream& out, const FeatureTable& table);
FeatureTable ReadFeatureTable(std::istream& in);
FeatureTable LoadFeatureTable(const std::filesystem::path& path);

// Signal ids in first-appearance order.
std::vector<std::string> SignalOrder(const FeatureTable& table);

// Writes via a sibling temporary file and rename, so readers never observe a
// partial file.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace csm

#endif  // CSM_PIPELINE_H_
