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

#include "csm/scoring.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "csm/error.h"
#include "json.hpp"

namespace csm {
namespace {

using Json = nlohmann::ordered_json;
constexpr char kFormat[] = "csm-interaction-table";

const InteractionEntry* FindEntry(const InteractionTable& table, const std::string& name,
                                  size_t before) {
  for (size_t i = 0; i < before && i < table.entries.size(); ++i) {
    if (table.entries[i].name == name) return &table.entries[i];
  }
  return nullptr;
}

Json OptionalNumber(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> ReadOptional(const Json& item, const char* key) {
  if (!item.contains(key) || item[key].is_null()) return std::nullopt;
  return item[key].get<double>();
}

std::string Fixed(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

// Rows grouped by signal in first-appearance order.
std::vector<std::vector<const FeatureRow*>> GroupBySignal(const FeatureTable& features) {
  std::map<std::string, size_t> slot;
  std::vector<std::vector<const FeatureRow*>> groups;
  for (const FeatureRow& row : features) {
    auto [it, inserted] = slot.emplace(row.signal, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&row);
  }
  return groups;
}

}  // namespace

InteractionTable DefaultInteractionTable() {
  InteractionTable t;
  const LogisticParams mid{10.0, 0.5, false};
  const LogisticParams mid_inv{10.0, 0.5, true};
  t.entries = {
      {"DPW1", "lin_dist", {{"prob_speech", mid_inv}}, "", false, true, {}, ""},
      {"DPW2", "noise_loudness", {{"prob_speech", mid}}, "", false, true, {}, ""},
      {"DPW3", "missing_components", {{"prob_speech", mid_inv}}, "DPW2", true, true, {}, ""},
      {"DPW4", "lin_dist", {{"epn", mid_inv}}, "", false, true, {}, ""},
      {"DPW5", "seg_nmr", {{"epn", mid}, {"pdev", mid_inv}}, "", true, true, {}, ""},
  };
  return t;
}

void ValidateInteractionTable(const InteractionTable& table) {
  if (table.version != 1) throw Error(ErrorCode::kSchemaError, "unsupported interaction table version");
  for (size_t i = 0; i < table.entries.size(); ++i) {
    const InteractionEntry& e = table.entries[i];
    if (DmIndex(e.dm_name) >= kDmCount) {
      throw Error(ErrorCode::kInvalidSpec, e.name + ": unknown target metric '" + e.dm_name + "'");
    }
    if (e.factors.empty()) throw Error(ErrorCode::kInvalidSpec, e.name + ": no factors");
    for (const DpwFactor& f : e.factors) {
      if (CemIndex(f.cem) >= kCemCount) {
        throw Error(ErrorCode::kInvalidSpec, e.name + ": unknown CEM '" + f.cem + "'");
      }
      if (!(f.params.steepness > 0.0) || !std::isfinite(f.params.midpoint)) {
        throw Error(ErrorCode::kInvalidSpec, e.name + ": steepness must be positive");
      }
    }
    if (!e.tied_to.empty()) {
      const InteractionEntry* source = FindEntry(table, e.tied_to, i);
      if (source == nullptr || !source->tied_to.empty() || source->factors.size() != 1 ||
          e.factors.size() != 1 || source->factors[0].cem != e.factors[0].cem) {
        throw Error(ErrorCode::kInvalidSpec,
                    e.name + ": must tie to an earlier single-factor entry on the same CEM");
      }
    }
  }
}

std::string EquationText(const InteractionEntry& e) {
  if (!e.tied_to.empty()) return e.name + " = 1 - " + e.tied_to;
  std::string out = e.name + " = ";
  const bool product = e.factors.size() > 1;
  for (const DpwFactor& f : e.factors) {
    std::string term = (f.params.inverted ? "1 - " : "") + f.cem + "_th";
    out += product ? "(" + term + ")" : term;
  }
  return out;
}

std::string SerializeInteractionTable(const InteractionTable& table) {
  Json doc;
  doc["format"] = kFormat;
  doc["version"] = table.version;
  doc["tag"] = table.tag;
  doc["acceptance_threshold"] = table.acceptance_threshold;
  doc["entries"] = Json::array();
  for (const InteractionEntry& e : table.entries) {
    Json item;
    item["weight"] = e.name;
    item["target_dm"] = e.dm_name;
    item["equation"] = EquationText(e);
    item["tied_to"] = e.tied_to.empty() ? Json(nullptr) : Json(e.tied_to);
    item["forced"] = e.forced;
    item["accepted"] = e.accepted;
    item["c_weight"] = OptionalNumber(e.c_weight);
    item["factors"] = Json::array();
    for (const DpwFactor& f : e.factors) {
      item["factors"].push_back({{"cem", f.cem},
                                 {"steepness", f.params.steepness},
                                 {"midpoint", f.params.midpoint},
                                 {"inverted", f.params.inverted},
                                 {"c_raw", OptionalNumber(f.c_raw)},
                                 {"c_opt", OptionalNumber(f.c_opt)}});
    }
    if (!e.note.empty()) item["note"] = e.note;
    doc["entries"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

InteractionTable ParseInteractionTable(const std::string& text) {
  InteractionTable table;
  try {
    const Json doc = Json::parse(text);
    if (doc.at("format") != kFormat) throw Error(ErrorCode::kSchemaError, "not an interaction table");
    table.version = doc.at("version");
    table.tag = doc.value("tag", "");
    table.acceptance_threshold = doc.value("acceptance_threshold", 0.5);
    for (const Json& item : doc.at("entries")) {
      InteractionEntry e;
      e.name = item.at("weight");
      e.dm_name = item.at("target_dm");
      e.tied_to = item.contains("tied_to") && !item["tied_to"].is_null()
                      ? item["tied_to"].get<std::string>()
                      : "";
      e.forced = item.value("forced", false);
      e.accepted = item.value("accepted", true);
      e.c_weight = ReadOptional(item, "c_weight");
      e.note = item.value("note", "");
      for (const Json& f : item.at("factors")) {
        DpwFactor factor;
        factor.cem = f.at("cem");
        factor.params = {f.at("steepness"), f.at("midpoint"), f.value("inverted", false)};
        factor.c_raw = ReadOptional(f, "c_raw");
        factor.c_opt = ReadOptional(f, "c_opt");
        e.factors.push_back(std::move(factor));
      }
      table.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("interaction table: ") + e.what());
  }
  ValidateInteractionTable(table);
  return table;
}

InteractionTable LoadInteractionTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "interaction table not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseInteractionTable(buffer.str());
}

double EntryWeight(const InteractionEntry& entry, const CemRecord& cem, WeightMode mode) {
  double w = 1.0;
  for (const DpwFactor& f : entry.factors) {
    const double x = cem[CemIndex(f.cem)];
    if (mode == WeightMode::kOptimized) {
      w *= Dpw(x, f.params);
    } else {
      w *= f.params.inverted ? 1.0 - x : x;
    }
  }
  return w;
}

Weights ComputeWeights(const CemRecord& cem, const InteractionTable& table, WeightMode mode) {
  Weights out;
  out.values.fill(1.0);
  for (const InteractionEntry& e : table.entries) {
    if (!e.accepted) continue;
    const size_t m = DmIndex(e.dm_name);
    if (m >= kDmCount) throw Error(ErrorCode::kInvalidSpec, "unknown target metric " + e.dm_name);
    out.values[m] *= std::max(0.0, EntryWeight(e, cem, mode));
  }
  double sum = 0.0;
  for (double w : out.values) sum += w;
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    out.values.fill(1.0 / kDmCount);
    out.uniform_fallback = true;
    return out;
  }
  for (double& w : out.values) w /= sum;
  return out;
}

QualityScore Score(const DmValues& dm, const CemRecord& cem, const BfSet& bfs,
                   const InteractionTable& table, WeightMode mode) {
  for (size_t m = 0; m < kDmCount; ++m) {
    if (bfs[m].dm_name != kDmNames[m]) {
      throw Error(ErrorCode::kMissingBf, "no basis function for " + std::string(kDmNames[m]));
    }
  }
  const Weights weights = ComputeWeights(cem, table, mode);
  QualityScore score;
  score.cem = cem;
  score.uniform_fallback = weights.uniform_fallback;
  double value = 0.0;
  double lo = kMosMax;
  double hi = kMosMin;
  for (size_t m = 0; m < kDmCount; ++m) {
    const double bf = bfs[m](dm[m]);
    score.contributions[m] = {std::string(kDmNames[m]), dm[m], bf, weights.values[m]};
    value += weights.values[m] * bf;
    lo = std::min(lo, bf);
    hi = std::max(hi, bf);
  }
  // Rounding in the weighted sum must not leave the convex hull.
  score.value = std::clamp(value, lo, hi);
  return score;
}

SalienceVector ComputeSalienceVector(const FeatureTable& features, const BfSet& bfs, size_t dm) {
  SalienceVector s;
  s.dm_name = std::string(kDmNames[dm]);
  for (const auto& group : GroupBySignal(features)) {
    std::vector<double> mos;
    std::vector<double> bf;
    for (const FeatureRow* row : group) {
      mos.push_back(row->mos);
      bf.push_back(bfs[dm](row->dm[dm]));
    }
    s.signals.push_back(group.front()->signal);
    try {
      s.values.push_back(Salience(mos, bf));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroVariance) throw;
      s.values.push_back(std::nullopt);
    }
  }
  return s;
}

std::vector<double> SignalCemMeans(const FeatureTable& features, size_t cem) {
  std::vector<double> out;
  for (const auto& group : GroupBySignal(features)) {
    double sum = 0.0;
    for (const FeatureRow* row : group) sum += row->cem[cem];
    out.push_back(sum / static_cast<double>(group.size()));
  }
  return out;
}

InteractionTable TrainInteractionTable(const FeatureTable& features, const BfSet& bfs,
                                       const InteractionTable& structure,
                                       const TrainingOptions& options) {
  ValidateInteractionTable(structure);
  InteractionTable table = structure;
  if (options.acceptance_threshold) table.acceptance_threshold = *options.acceptance_threshold;
  std::array<std::vector<double>, kCemCount> cem_means;
  for (size_t c = 0; c < kCemCount; ++c) cem_means[c] = SignalCemMeans(features, c);

  for (size_t i = 0; i < table.entries.size(); ++i) {
    InteractionEntry& e = table.entries[i];
    const SalienceVector salience = ComputeSalienceVector(features, bfs, DmIndex(e.dm_name));
    e.note.clear();
    try {
      if (!e.tied_to.empty()) {
        const InteractionEntry& source = *FindEntry(table, e.tied_to, i);
        e.factors[0].params = source.factors[0].params;
        e.factors[0].params.inverted = !source.factors[0].params.inverted;
      } else if (e.factors.size() == 1) {
        const DpwSearchResult r =
            OptimizeDpw(salience, cem_means[CemIndex(e.factors[0].cem)], options.grid);
        e.factors[0].params.steepness = r.params.steepness;
        e.factors[0].params.midpoint = r.params.midpoint;
      } else {
        std::vector<std::vector<double>> cems;
        std::vector<bool> inverted;
        for (const DpwFactor& f : e.factors) {
          cems.push_back(cem_means[CemIndex(f.cem)]);
          inverted.push_back(f.params.inverted);
        }
        const ProductSearchResult r = OptimizeProduct(salience, cems, inverted, options.product_grid);
        for (size_t f = 0; f < e.factors.size(); ++f) e.factors[f].params = r.params[f];
      }
      // Reported correlations, recomputed uniformly for every entry kind.
      std::vector<double> weight(salience.values.size(), 1.0);
      for (DpwFactor& f : e.factors) {
        const std::vector<double>& x = cem_means[CemIndex(f.cem)];
        std::vector<double> th(x.size());
        for (size_t j = 0; j < x.size(); ++j) {
          th[j] = Logistic(x[j], f.params.steepness, f.params.midpoint);
          weight[j] *= Dpw(x[j], f.params);
        }
        f.c_raw.reset();
        f.c_opt.reset();
        try {
          f.c_raw = InteractionCost(salience, x);
        } catch (const Error&) {
        }
        try {
          f.c_opt = InteractionCost(salience, th);
        } catch (const Error&) {
        }
      }
      e.c_weight = InteractionCost(salience, weight);
      e.accepted = e.forced || *e.c_weight >= table.acceptance_threshold;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kAllUndefined && err.code() != ErrorCode::kZeroVariance &&
          err.code() != ErrorCode::kInsufficientData) {
        throw;
      }
      e.c_weight.reset();
      e.accepted = e.forced;
      e.note = err.what();
    }
  }
  return table;
}

std::string InteractionReport(const InteractionTable& table) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-7s %-12s %-20s %-15s %-9s %s\n", "Weight", "CEM", "Target DM",
                "C (CEM/DPW)", "Accepted", "Equation");
  out << line;
  for (const InteractionEntry& e : table.entries) {
    for (size_t f = 0; f < e.factors.size(); ++f) {
      const DpwFactor& factor = e.factors[f];
      const std::string c = Fixed(factor.c_raw) + " / " + Fixed(factor.c_opt);
      const std::string accepted = e.accepted ? (e.forced ? "forced" : "yes") : "no";
      std::snprintf(line, sizeof(line), "%-7s %-12s %-20s %-15s %-9s %s\n", e.name.c_str(),
                    factor.cem.c_str(), e.dm_name.c_str(), c.c_str(), f == 0 ? accepted.c_str() : "",
                    f == 0 ? EquationText(e).c_str() : "-");
      out << line;
    }
  }
  return out.str();
}

BfSet FitBasisFunctions(const FeatureTable& features, const BfFitOptions& options, int jobs) {
  BfSet set;
  ParallelFor(kDmCount, jobs, [&](size_t m) {
    std::vector<double> x;
    std::vector<double> y;
    for (const FeatureRow& row : features) {
      x.push_back(row.dm[m]);
      y.push_back(row.mos);
    }
    set[m] = FitBasisFunction(std::string(kDmNames[m]), x, y, options);
  });
  return set;
}

}  // namespace csm
