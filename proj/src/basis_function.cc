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

#include "csm/basis_function.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "csm/error.h"
#include "json.hpp"

namespace csm {
namespace {

using Json = nlohmann::ordered_json;
constexpr char kFormat[] = "csm-basis-functions";
constexpr int kVersion = 1;

double Hinge(const HingeTerm& t, double x) {
  return std::max(0.0, t.direction * (x - t.knot));
}

struct Fit {
  Eigen::VectorXd coefficients;  // intercept first
  double rss = std::numeric_limits<double>::infinity();
  bool full_rank = false;
};

Fit LeastSquares(std::span<const double> x, const Eigen::VectorXd& y,
                 const std::vector<HingeTerm>& terms) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, static_cast<Eigen::Index>(terms.size() + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (size_t t = 0; t < terms.size(); ++t) {
      a(i, static_cast<Eigen::Index>(t + 1)) = Hinge(terms[t], x[i]);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  Fit fit;
  fit.full_rank = qr.rank() == a.cols();
  if (!fit.full_rank) return fit;
  fit.coefficients = qr.solve(y);
  fit.rss = (a * fit.coefficients - y).squaredNorm();
  return fit;
}

size_t KnotCount(const std::vector<HingeTerm>& terms) {
  std::set<double> knots;
  for (const HingeTerm& t : terms) knots.insert(t.knot);
  return knots.size();
}

}  // namespace

std::vector<double> KnotCandidates(std::span<const double> x, double span_alpha, double min_gap) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  size_t end_span = 0;
  size_t min_span = 1;
  if (span_alpha > 0.0 && span_alpha < 1.0) {
    end_span = static_cast<size_t>(std::ceil(3.0 - std::log2(span_alpha / n)));
    min_span = std::max<size_t>(
        1, static_cast<size_t>(std::floor(-std::log2(-std::log1p(-span_alpha) / n) / 2.5)));
  }
  std::vector<double> out;
  if (sorted.size() > 2 * end_span) {
    for (size_t i = end_span; i + end_span < sorted.size(); i += min_span) out.push_back(sorted[i]);
  }
  // Values equal to the minimum give identically zero upward hinges.
  out.erase(std::remove(out.begin(), out.end(), sorted.front()), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (min_gap > 0.0 && !out.empty()) {
    const double gap = min_gap * (sorted.back() - sorted.front());
    std::vector<double> thinned;
    double last = sorted.front();
    for (double k : out) {
      if (k - last >= gap && sorted.back() - k >= gap) {
        thinned.push_back(k);
        last = k;
      }
    }
    out.swap(thinned);
  }
  return out;
}

double BasisFunction::Raw(double x) const {
  double y = intercept;
  for (const HingeTerm& t : terms) y += t.coefficient * Hinge(t, x);
  return y;
}

double BasisFunction::operator()(double x) const {
  return std::clamp(Raw(x), kMosMin, kMosMax);
}

double BasisFunction::Lipschitz() const {
  double l = 0.0;
  for (const HingeTerm& t : terms) l += std::abs(t.coefficient);
  return l;
}

double Gcv(double rss, size_t n, size_t terms, size_t knots, double penalty) {
  const double c = static_cast<double>(terms + 1) + penalty * static_cast<double>(knots);
  const double denom = 1.0 - c / static_cast<double>(n);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return rss / static_cast<double>(n) / (denom * denom);
}

BasisFunction FitBasisFunction(std::string dm_name, std::span<const double> x,
                               std::span<const double> mos, const BfFitOptions& options) {
  if (x.size() != mos.size()) {
    throw Error(ErrorCode::kLengthMismatch, "basis function inputs differ in length");
  }
  if (x.size() < std::max<size_t>(options.min_rows, 2)) {
    throw Error(ErrorCode::kInsufficientData,
                "basis function for " + dm_name + " needs at least " +
                    std::to_string(options.min_rows) + " rows, got " + std::to_string(x.size()));
  }
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(mos[i])) {
      throw Error(ErrorCode::kDegenerateInput, "non-finite value in basis function data for " + dm_name);
    }
    if (mos[i] < kMosMin || mos[i] > kMosMax) {
      throw Error(ErrorCode::kSchemaError, "row " + std::to_string(i + 1) + ": MOS outside [0, 100]");
    }
  }
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
    throw Error(ErrorCode::kDegenerateInput, "constant values for " + dm_name);
  }
  const std::vector<double> candidates = KnotCandidates(x, options.span_alpha, options.min_knot_gap);

  const size_t n = x.size();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(mos.data(), static_cast<Eigen::Index>(n));
  std::vector<HingeTerm> terms;
  Fit current = LeastSquares(x, y, terms);
  // Residuals at rounding level of y count as an exact fit.
  const double scale = std::max(current.rss, 1e-20 * y.squaredNorm());

  // Forward growth.
  while (terms.size() < options.max_terms) {
    const bool pair_allowed = terms.size() + 2 <= options.max_terms;
    std::vector<HingeTerm> best_terms;
    Fit best;
    for (double knot : candidates) {
      const HingeTerm up{0.0, knot, 1};
      const HingeTerm down{0.0, knot, -1};
      // A full-rank mirrored pair is tried first; single terms only when the
      // pair is rank deficient or no room is left for two.
      std::vector<std::vector<HingeTerm>> variants;
      if (pair_allowed) variants.push_back({up, down});
      variants.push_back({up});
      variants.push_back({down});
      for (const auto& added : variants) {
        std::vector<HingeTerm> trial = terms;
        trial.insert(trial.end(), added.begin(), added.end());
        Fit fit = LeastSquares(x, y, trial);
        if (!fit.full_rank) continue;
        if (fit.rss < best.rss - 1e-12 * scale) {
          best = std::move(fit);
          best_terms = std::move(trial);
        }
        if (added.size() == 2) break;
      }
    }
    if (best_terms.empty() || best.rss > current.rss - 1e-9 * scale) break;
    terms = std::move(best_terms);
    current = std::move(best);
  }

  BfFitStats stats;
  stats.rows = n;
  stats.forward_terms = terms.size();
  stats.forward_gcv = Gcv(current.rss, n, terms.size(), KnotCount(terms), options.gcv_penalty);

  // Backward elimination.
  std::vector<HingeTerm> best_terms = terms;
  Fit best_fit = current;
  double best_gcv = stats.forward_gcv;
  while (!terms.empty()) {
    size_t drop = terms.size();
    Fit drop_fit;
    for (size_t t = 0; t < terms.size(); ++t) {
      std::vector<HingeTerm> trial = terms;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(t));
      Fit fit = LeastSquares(x, y, trial);
      if (fit.full_rank && fit.rss < drop_fit.rss) {
        drop_fit = std::move(fit);
        drop = t;
      }
    }
    if (drop == terms.size()) break;
    terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(drop));
    const double gcv = Gcv(drop_fit.rss, n, terms.size(), KnotCount(terms), options.gcv_penalty);
    if (gcv < best_gcv) {
      best_gcv = gcv;
      best_terms = terms;
      best_fit = drop_fit;
    }
  }

  BasisFunction bf;
  bf.dm_name = std::move(dm_name);
  bf.intercept = best_fit.coefficients[0];
  bf.terms = best_terms;
  for (size_t t = 0; t < bf.terms.size(); ++t) {
    bf.terms[t].coefficient = best_fit.coefficients[static_cast<Eigen::Index>(t + 1)];
  }
  stats.rss = best_fit.rss;
  stats.rmse = std::sqrt(best_fit.rss / static_cast<double>(n));
  stats.gcv = best_gcv;
  stats.term_count = bf.terms.size();
  bf.fit_stats = stats;
  return bf;
}

std::string SerializeBasisFunctions(const BfSet& set) {
  Json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["basis_functions"] = Json::array();
  for (const BasisFunction& bf : set) {
    Json item;
    item["dm_name"] = bf.dm_name;
    item["intercept"] = bf.intercept;
    item["terms"] = Json::array();
    for (const HingeTerm& t : bf.terms) {
      item["terms"].push_back(
          {{"coefficient", t.coefficient}, {"knot", t.knot}, {"direction", t.direction > 0 ? "+" : "-"}});
    }
    const BfFitStats& s = bf.fit_stats;
    item["fit_stats"] = {{"rows", s.rows},
                         {"rss", s.rss},
                         {"rmse", s.rmse},
                         {"forward_gcv", s.forward_gcv},
                         {"gcv", s.gcv},
                         {"forward_terms", s.forward_terms},
                         {"term_count", s.term_count}};
    doc["basis_functions"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

BfSet ParseBasisFunctions(const std::string& text) {
  BfSet set;
  std::array<bool, kDmCount> present{};
  try {
    const Json doc = Json::parse(text);
    if (doc.at("format") != kFormat || doc.at("version") != kVersion) {
      throw Error(ErrorCode::kSchemaError, "unsupported basis function file format or version");
    }
    for (const Json& item : doc.at("basis_functions")) {
      const std::string name = item.at("dm_name");
      const size_t index = DmIndex(name);
      if (index >= kDmCount) throw Error(ErrorCode::kSchemaError, "unknown metric '" + name + "'");
      BasisFunction bf;
      bf.dm_name = name;
      bf.intercept = item.at("intercept");
      for (const Json& t : item.at("terms")) {
        const std::string dir = t.at("direction");
        if (dir != "+" && dir != "-") throw Error(ErrorCode::kSchemaError, "bad hinge direction");
        bf.terms.push_back({t.at("coefficient"), t.at("knot"), dir == "+" ? 1 : -1});
      }
      if (item.contains("fit_stats")) {
        const Json& s = item["fit_stats"];
        bf.fit_stats = {s.value("rows", size_t{0}),        s.value("rss", 0.0),
                        s.value("rmse", 0.0),              s.value("forward_gcv", 0.0),
                        s.value("gcv", 0.0),               s.value("forward_terms", size_t{0}),
                        s.value("term_count", bf.terms.size())};
      }
      set[index] = std::move(bf);
      present[index] = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("basis function file: ") + e.what());
  }
  for (size_t m = 0; m < kDmCount; ++m) {
    if (!present[m]) {
      throw Error(ErrorCode::kMissingBf, "no basis function for " + std::string(kDmNames[m]));
    }
  }
  return set;
}

BfSet LoadBasisFunctions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingBf, "basis function file not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseBasisFunctions(buffer.str());
}

}  // namespace csm
