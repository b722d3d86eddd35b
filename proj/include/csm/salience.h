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

#ifndef CSM_SALIENCE_H_
#define CSM_SALIENCE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csm {

struct LogisticParams {
  double steepness = 1.0;
  double midpoint = 0.5;
  bool inverted = false;
  bool operator==(const LogisticParams&) const = default;
};

// 1 / (1 + exp(-k (x - x0))).
double Logistic(double x, double steepness, double midpoint);

// Detection probability weight; 1 - Logistic when inverted.
double Dpw(double x, const LogisticParams& params);

// Pearson correlation over treatments of MOS and basis function output for
// one signal. ZeroVariance when either is constant, InsufficientData below
// three treatments.
double Salience(std::span<const double> mos, std::span<const double> bf_values);

struct SalienceVector {
  std::string dm_name;
  std::vector<std::string> signals;
  std::vector<std::optional<double>> values;  // nullopt: undefined

  size_t defined_count() const;
};

// Signed Pearson correlation across signals of salience and weights.
// Signals with undefined salience or non-finite weight are dropped pairwise.
// InsufficientData below three usable signals, ZeroVariance when either
// side is constant.
double InteractionCost(const SalienceVector& salience, std::span<const double> weights);

struct SearchGrid {
  std::vector<double> steepness;
  std::vector<double> midpoint;
  bool include_inverted = true;

  size_t size() const {
    return steepness.size() * midpoint.size() * (include_inverted ? 2 : 1);
  }
};

std::vector<double> LogSpace(double lo, double hi, size_t count);
std::vector<double> LinSpace(double lo, double hi, size_t count);

// k log-spaced over [0.5, 200] in 61 steps, x0 over [0, 1] in 101 steps.
SearchGrid DefaultGrid();
// k_steps x x0_steps grid over the same ranges.
SearchGrid CoarseGrid(size_t k_steps = 21, size_t x0_steps = 21);

struct DpwSearchResult {
  LogisticParams params;
  std::optional<double> c_raw;  // raw CEM vs salience; nullopt if undefined
  double c_opt = 0.0;           // signed, DPW output vs salience
  size_t evaluated = 0;         // candidates with a defined cost
};

// Candidates within this margin of the running best count as ties.
inline constexpr double kCostTieTolerance = 1e-12;

// Exhaustive search maximizing |C| over steepness (outer, ascending),
// midpoint (ascending), then non-inverted before inverted. A candidate
// replaces the incumbent only when |C| exceeds it by kCostTieTolerance.
// DegenerateGrid for an empty grid, AllUndefined when no candidate has a
// defined cost.
DpwSearchResult OptimizeDpw(const SalienceVector& salience, std::span<const double> cem,
                            const SearchGrid& grid);

// Product of per-factor DPWs with fixed INV flags. Factor parameters are
// searched jointly over `grid` (the same axes for every factor,
// lexicographic order with the first factor outermost).
struct ProductSearchResult {
  std::vector<LogisticParams> params;
  std::optional<double> c_raw;
  double c_opt = 0.0;
  size_t evaluated = 0;
};

ProductSearchResult OptimizeProduct(const SalienceVector& salience,
                                    const std::vector<std::vector<double>>& cems,
                                    const std::vector<bool>& inverted, const SearchGrid& grid);

// Transcribed 24-signal data of the LinDist / probSpeech interaction figure.
struct InteractionFixture {
  std::vector<std::string> signals;
  std::vector<double> salience;
  std::vector<double> cem;
  std::vector<double> dpw;
};

// Tab-separated: signal, salience, cem, dpw; '#' comment lines allowed.
InteractionFixture LoadInteractionFixture(const std::filesystem::path& path);

}  // namespace csm

#endif  // CSM_SALIENCE_H_
