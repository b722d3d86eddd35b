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

#include "csm/manifest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "csm/error.h"
#include "csm/wav.h"
#include "json.hpp"

namespace csm {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void SchemaFail(const std::string& what) {
  throw Error(ErrorCode::kSchemaError, what);
}

template <typename T>
T Field(const Json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key)) {
    SchemaFail(where + ": missing field '" + key + "'");
  }
  try {
    return object.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    SchemaFail(where + ": field '" + key + "' has the wrong type");
  }
}

Json DegradationToJson(const Degradation& d) {
  Json j = Json::object();
  j["snr_db"] = d.snr_db ? Json(*d.snr_db) : Json(nullptr);
  j["lowpass_hz"] = d.lowpass_hz ? Json(*d.lowpass_hz) : Json(nullptr);
  j["mod_depth"] = d.mod_depth;
  j["mod_rate_hz"] = d.mod_rate_hz;
  return j;
}

Degradation DegradationFromJson(const Json& j, const std::string& where) {
  Degradation d;
  if (!j.is_object()) SchemaFail(where + ": degradation must be an object");
  if (j.contains("snr_db") && !j["snr_db"].is_null()) d.snr_db = Field<double>(j, "snr_db", where);
  if (j.contains("lowpass_hz") && !j["lowpass_hz"].is_null()) {
    d.lowpass_hz = Field<double>(j, "lowpass_hz", where);
  }
  if (j.contains("mod_depth")) d.mod_depth = Field<double>(j, "mod_depth", where);
  if (j.contains("mod_rate_hz")) d.mod_rate_hz = Field<double>(j, "mod_rate_hz", where);
  return d;
}

}  // namespace

std::filesystem::path DatasetManifest::Resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

const SignalEntry& DatasetManifest::signal(const std::string& id) const {
  for (const SignalEntry& s : signals) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::kSchemaError, "unknown signal id '" + id + "'");
}

bool DatasetManifest::operator==(const DatasetManifest& other) const {
  return schema_version == other.schema_version && signals == other.signals &&
         treatments == other.treatments && conditions == other.conditions;
}

void ValidateManifest(const DatasetManifest& manifest) {
  std::set<std::string> signal_ids;
  std::set<std::string> treatment_ids;
  for (const SignalEntry& s : manifest.signals) {
    if (!signal_ids.insert(s.id).second) SchemaFail("duplicate signal id '" + s.id + "'");
  }
  for (const TreatmentEntry& t : manifest.treatments) {
    if (!treatment_ids.insert(t.id).second) SchemaFail("duplicate treatment id '" + t.id + "'");
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (size_t row = 0; row < manifest.conditions.size(); ++row) {
    const ConditionEntry& c = manifest.conditions[row];
    const std::string where = "condition row " + std::to_string(row);
    if (!signal_ids.count(c.signal_id)) {
      SchemaFail(where + ": unknown signal '" + c.signal_id + "'");
    }
    if (!treatment_ids.count(c.treatment_id)) {
      SchemaFail(where + ": unknown treatment '" + c.treatment_id + "'");
    }
    if (!(c.mos >= 0.0 && c.mos <= 100.0)) {
      SchemaFail(where + ": mos " + std::to_string(c.mos) + " outside [0, 100]");
    }
    if (!(c.ci95 >= 0.0) || !std::isfinite(c.ci95)) {
      SchemaFail(where + ": ci95 must be finite and >= 0");
    }
    if (!seen.insert({c.signal_id, c.treatment_id}).second) {
      throw Error(ErrorCode::kDuplicateCondition,
                  where + ": duplicate condition (" + c.signal_id + ", " +
                      c.treatment_id + ")");
    }
  }
}

DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const ManifestLoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open manifest " + path.string());
  Json root;
  try {
    root = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    SchemaFail(path.string() + ": " + e.what());
  }
  DatasetManifest manifest;
  manifest.base_dir = path.has_parent_path() ? path.parent_path() : ".";
  manifest.schema_version = Field<int>(root, "schema_version", "manifest");
  if (manifest.schema_version != kManifestSchemaVersion) {
    SchemaFail("unsupported manifest schema version " +
               std::to_string(manifest.schema_version));
  }
  const auto signals = Field<Json>(root, "signals", "manifest");
  for (size_t i = 0; i < signals.size(); ++i) {
    const std::string where = "signal row " + std::to_string(i);
    manifest.signals.push_back({Field<std::string>(signals[i], "id", where),
                                Field<std::string>(signals[i], "reference", where)});
  }
  const auto treatments = Field<Json>(root, "treatments", "manifest");
  for (size_t i = 0; i < treatments.size(); ++i) {
    const std::string where = "treatment row " + std::to_string(i);
    TreatmentEntry t;
    t.id = Field<std::string>(treatments[i], "id", where);
    if (treatments[i].contains("description")) {
      t.description = Field<std::string>(treatments[i], "description", where);
    }
    if (treatments[i].contains("degradation") && !treatments[i]["degradation"].is_null()) {
      t.degradation = DegradationFromJson(treatments[i]["degradation"], where);
    }
    manifest.treatments.push_back(std::move(t));
  }
  const auto conditions = Field<Json>(root, "conditions", "manifest");
  for (size_t i = 0; i < conditions.size(); ++i) {
    const std::string where = "condition row " + std::to_string(i);
    ConditionEntry c;
    c.signal_id = Field<std::string>(conditions[i], "signal", where);
    c.treatment_id = Field<std::string>(conditions[i], "treatment", where);
    c.sut = Field<std::string>(conditions[i], "sut", where);
    c.mos = Field<double>(conditions[i], "mos", where);
    c.ci95 = Field<double>(conditions[i], "ci95", where);
    manifest.conditions.push_back(std::move(c));
  }
  ValidateManifest(manifest);

  auto check = [&](const std::filesystem::path& p) {
    const auto full = manifest.Resolve(p);
    if (!std::filesystem::exists(full)) {
      throw Error(ErrorCode::kMissingFile, "missing audio file " + full.string());
    }
    if (options.check_audio) ProbeWav(full);
  };
  for (const SignalEntry& s : manifest.signals) check(s.reference);
  for (const ConditionEntry& c : manifest.conditions) check(c.sut);
  return manifest;
}

void WriteManifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  ValidateManifest(manifest);
  Json root = Json::object();
  root["schema_version"] = manifest.schema_version;
  root["signals"] = Json::array();
  for (const SignalEntry& s : manifest.signals) {
    root["signals"].push_back({{"id", s.id}, {"reference", s.reference.generic_string()}});
  }
  root["treatments"] = Json::array();
  for (const TreatmentEntry& t : manifest.treatments) {
    Json j = {{"id", t.id}, {"description", t.description}};
    j["degradation"] = t.degradation ? DegradationToJson(*t.degradation) : Json(nullptr);
    root["treatments"].push_back(std::move(j));
  }
  root["conditions"] = Json::array();
  for (const ConditionEntry& c : manifest.conditions) {
    root["conditions"].push_back({{"signal", c.signal_id},
                                  {"treatment", c.treatment_id},
                                  {"sut", c.sut.generic_string()},
                                  {"mos", c.mos},
                                  {"ci95", c.ci95}});
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out << root.dump(2) << '\n';
}

std::string DescribeDegradation(const Degradation& d) {
  std::ostringstream out;
  const char* sep = "";
  if (d.lowpass_hz) {
    out << "lowpass " << *d.lowpass_hz << " Hz";
    sep = ", ";
  }
  if (d.snr_db) {
    out << sep << "noise " << *d.snr_db << " dB SNR";
    sep = ", ";
  }
  if (d.mod_depth > 0.0) out << sep << "AM depth " << d.mod_depth << " @ " << d.mod_rate_hz << " Hz";
  const std::string s = out.str();
  return s.empty() ? "identity" : s;
}

}  // namespace csm
