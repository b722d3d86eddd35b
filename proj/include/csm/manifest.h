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

#ifndef CSM_MANIFEST_H_
#define CSM_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace csm {

inline constexpr int kManifestSchemaVersion = 1;

// Controlled degradation chain: lowpass, then additive noise, then
// amplitude modulation.
struct Degradation {
  std::optional<double> snr_db;      // nullopt: no noise
  std::optional<double> lowpass_hz;  // nullopt: no filter
  double mod_depth = 0.0;
  double mod_rate_hz = 8.0;
  bool operator==(const Degradation&) const = default;
};

struct SignalEntry {
  std::string id;
  std::filesystem::path reference;
  bool operator==(const SignalEntry&) const = default;
};

struct TreatmentEntry {
  std::string id;
  std::string description;
  std::optional<Degradation> degradation;
  bool operator==(const TreatmentEntry&) const = default;
};

struct ConditionEntry {
  std::string signal_id;
  std::string treatment_id;
  std::filesystem::path sut;
  double mos = 0.0;
  double ci95 = 0.0;
  bool operator==(const ConditionEntry&) const = default;
};

// Signals x treatments table. Paths are stored relative to the manifest
// file and resolved against base_dir.
struct DatasetManifest {
  int schema_version = kManifestSchemaVersion;
  std::filesystem::path base_dir;
  std::vector<SignalEntry> signals;
  std::vector<TreatmentEntry> treatments;
  std::vector<ConditionEntry> conditions;

  std::filesystem::path Resolve(const std::filesystem::path& p) const;
  const SignalEntry& signal(const std::string& id) const;
  bool operator==(const DatasetManifest& other) const;
};

struct ManifestLoadOptions {
  // Open every referenced WAV header.
  bool check_audio = true;
};

DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const ManifestLoadOptions& options = {});

// Structural checks shared by loading and writing: ids resolve, no duplicate
// (signal, treatment), mos in [0, 100], ci95 >= 0.
void ValidateManifest(const DatasetManifest& manifest);

void WriteManifest(const std::filesystem::path& path, const DatasetManifest& manifest);

std::string DescribeDegradation(const Degradation& d);

}  // namespace csm

#endif  // CSM_MANIFEST_H_
