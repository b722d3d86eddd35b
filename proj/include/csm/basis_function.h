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

#ifndef CSM_BASIS_FUNCTION_H_
#define CSM_BASIS_FUNCTION_H_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csm/distortion_metrics.h"

namespace csm {

inline constexpr double kMosMin = 0.0;
inline constexpr double kMosMax = 100.0;

// coefficient * max(0, direction * (x - knot)), direction is +1 or -1.
struct HingeTerm {
  double coefficient = 0.0;
  double knot = 0.0;
  int direction = 1;
  bool operator==(const HingeTerm&) const = default;
};

struct BfFitStats {
  size_t rows = 0;
  double rss = 0.0;
  double rmse = 0.0;
  // GCV of the forward-pass model and of the pruned model returned.
  double forward_gcv = 0.0;
  double gcv = 0.0;
  size_t forward_terms = 0;
  size_t term_count = 0;
  bool operator==(const BfFitStats&) const = default;
};

struct BasisFunction {
  std::string dm_name;
  double intercept = 0.0;
  std::vector<HingeTerm> terms;
  BfFitStats fit_stats;

  // Piecewise-linear value before clamping.
  double Raw(double x) const;
  // Raw(x) clamped to the MOS scale.
  double operator()(double x) const;
  // Sum of |coefficient|, a Lipschitz bound of Raw.
  double Lipschitz() const;
  bool operator==(const BasisFunction&) const = default;
};

struct BfFitOptions {
  size_t max_terms = 8;
  // Cost per knot in the effective parameter count of GCV.
  double gcv_penalty = 3.0;
  size_t min_rows = 10;
  // Knot spacing in observations, Friedman's end-span and min-span rules at
  // significance alpha; 0 disables the rule.
  double span_alpha = 0.05;
  // Minimum distance between knots, and from either end of the data, as a
  // fraction of the observed range. 0 disables.
  double min_knot_gap = 0.05;
};

// Knot candidates: sorted observed values, skipping the end spans and
// keeping every min-span-th interior observation, duplicates removed.
std::vector<double> KnotCandidates(std::span<const double> x, double span_alpha,
                                   double min_gap = 0.0);

// One-dimensional MARS: greedy forward growth with mirrored hinge pairs at
// observed values, then backward elimination scored by GCV. Equal-score
// knot candidates resolve to the lowest value.
BasisFunction FitBasisFunction(std::string dm_name, std::span<const double> x,
                               std::span<const double> mos, const BfFitOptions& options = {});

// GCV = (RSS / n) / (1 - C / n)^2 with C = terms + 1 + penalty * knots.
double Gcv(double rss, size_t n, size_t terms, size_t knots, double penalty);

// One basis function per distortion metric, in kDmNames order.
using BfSet = std::array<BasisFunction, kDmCount>;

std::string SerializeBasisFunctions(const BfSet& set);
BfSet ParseBasisFunctions(const std::string& text);
// MissingBf when the file is absent or a metric has no entry.
BfSet LoadBasisFunctions(const std::filesystem::path& path);

}  // namespace csm

#endif  // CSM_BASIS_FUNCTION_H_
