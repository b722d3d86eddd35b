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

#include "csm/pipeline.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "csm/error.h"

namespace csm {
namespace {

constexpr const char* kTableColumns[] = {"signal", "treatment"};

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

double ParseNumber(const std::string& text, size_t row, const std::string& column) {
  if (text == "nan" || text == "NaN") return std::numeric_limits<double>::quiet_NaN();
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kSchemaError,
              "feature table row " + std::to_string(row) + ": bad number in '" + column + "'");
}

std::vector<std::string> Header() {
  std::vector<std::string> header(std::begin(kTableColumns), std::end(kTableColumns));
  for (auto n : kDmNames) header.emplace_back(n);
  for (auto n : kCemNames) header.emplace_back(n);
  header.emplace_back("mos");
  header.emplace_back("ci95");
  return header;
}

}  // namespace

PairAnalysis AnalyzePair(const AudioPair& pair, const EarModel& model,
                         const AnalysisOptions& options) {
  PairAnalysis result;
  result.plan = Segment(pair, options.segments);
  const AudioPair fitted = FitToPlan(pair, result.plan);
  const auto frames = model.Analyze(fitted);
  std::vector<DmRecord> channels;
  for (const auto& channel : frames) channels.push_back(ComputeDm(channel, result.plan, model));
  result.dm = AverageChannels(channels);
  result.cem = DefaultCemProvider(options.pdev, options.classifier).Compute(fitted, frames);
  return result;
}

void ParallelFor(size_t count, int jobs, const std::function<void(size_t)>& task) {
  const size_t workers = std::min<size_t>(count, static_cast<size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  std::vector<std::thread> threads;
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      while (!failed) {
        const size_t i = next++;
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

FeatureTable AnalyzeManifest(const DatasetManifest& manifest, const AnalysisOptions& options,
                             int jobs, std::vector<std::vector<DmValues>>* segments) {
  const EarModel model(options.ear);
  FeatureTable table(manifest.conditions.size());
  if (segments) segments->assign(table.size(), {});
  ParallelFor(table.size(), jobs, [&](size_t i) {
    const ConditionEntry& c = manifest.conditions[i];
    const SignalEntry& s = manifest.signal(c.signal_id);
    const AudioPair pair = LoadPair(manifest.Resolve(s.reference), manifest.Resolve(c.sut),
                                    options.ingest);
    const PairAnalysis analysis = AnalyzePair(pair, model, options);
    if (segments) (*segments)[i] = analysis.dm.per_segment;
    FeatureRow& row = table[i];
    row.signal = c.signal_id;
    row.treatment = c.treatment_id;
    row.dm = analysis.dm;
    row.cem = analysis.cem;
    row.mos = c.mos;
    row.ci95 = c.ci95;
  });
  return table;
}

FeatureTable AnalyzeSynthetic(const SyntheticDataset& dataset, const AnalysisOptions& options,
                              int jobs) {
  const EarModel model(options.ear);
  FeatureTable table(dataset.conditions.size());
  ParallelFor(table.size(), jobs, [&](size_t i) {
    const SyntheticCondition& c = dataset.conditions[i];
    const SyntheticSignal& s = dataset.signals[c.signal];
    AudioPair pair;
    pair.reference = {s.reference};
    pair.sut = {c.sut};
    const PairAnalysis analysis = AnalyzePair(pair, model, options);
    FeatureRow& row = table[i];
    row.signal = s.id;
    row.treatment = TreatmentId(c.treatment);
    row.dm = analysis.dm;
    row.cem = analysis.cem;
    row.mos = c.mos;
    row.ci95 = c.ci95;
  });
  return table;
}

void WriteFeatureTable(std::ostream& out, const FeatureTable& table) {
  const auto header = Header();
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "\t" : "") << header[i];
  out << '\n';
  char buf[32];
  auto number = [&](double v) {
    if (std::isnan(v)) return std::string("nan");
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const FeatureRow& row : table) {
    out << row.signal << '\t' << row.treatment;
    for (size_t k = 0; k < kDmCount; ++k) out << '\t' << number(row.dm[k]);
    for (size_t k = 0; k < kCemCount; ++k) out << '\t' << number(row.cem[k]);
    out << '\t' << number(row.mos) << '\t' << number(row.ci95) << '\n';
  }
}

FeatureTable ReadFeatureTable(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kSchemaError, "feature table is empty");
  const auto header = SplitTabs(line);
  const auto expected = Header();
  if (header != expected) {
    throw Error(ErrorCode::kSchemaError, "feature table header does not match the expected columns");
  }
  FeatureTable table;
  std::unordered_set<std::string> seen;
  size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != expected.size()) {
      throw Error(ErrorCode::kSchemaError, "feature table row " + std::to_string(row_number) +
                                               ": expected " + std::to_string(expected.size()) +
                                               " fields");
    }
    FeatureRow row;
    row.signal = fields[0];
    row.treatment = fields[1];
    if (!seen.insert(row.signal + "\t" + row.treatment).second) {
      throw Error(ErrorCode::kDuplicateCondition,
                  "duplicate condition (" + row.signal + ", " + row.treatment + ")");
    }
    size_t f = 2;
    for (size_t k = 0; k < kDmCount; ++k, ++f) {
      row.dm[k] = ParseNumber(fields[f], row_number, expected[f]);
    }
    for (size_t k = 0; k < kCemCount; ++k, ++f) {
      row.cem[k] = ParseNumber(fields[f], row_number, expected[f]);
    }
    row.mos = ParseNumber(fields[f], row_number, expected[f]);
    row.ci95 = ParseNumber(fields[f + 1], row_number, expected[f + 1]);
    table.push_back(std::move(row));
  }
  return table;
}

FeatureTable LoadFeatureTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  return ReadFeatureTable(in);
}

std::vector<std::string> SignalOrder(const FeatureTable& table) {
  std::vector<std::string> order;
  std::unordered_set<std::string> seen;
  for (const FeatureRow& row : table) {
    if (seen.insert(row.signal).second) order.push_back(row.signal);
  }
  return order;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kUnreadableFile, "write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace csm
