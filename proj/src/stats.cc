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

#include "csm/stats.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "csm/error.h"

namespace csm {

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> Pearson(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "correlation inputs differ in length: " +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  if (a.size() < 2) return std::nullopt;
  const double mean_a = Mean(a);
  const double mean_b = Mean(b);
  double cross = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cross += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  // Relative floor: inputs that are constant up to rounding count as constant.
  const double scale_a = std::max(std::abs(mean_a), 1.0);
  const double scale_b = std::max(std::abs(mean_b), 1.0);
  const double n = static_cast<double>(a.size());
  if (var_a <= n * 1e-28 * scale_a * scale_a ||
      var_b <= n * 1e-28 * scale_b * scale_b) {
    return std::nullopt;
  }
  const double r = cross / (std::sqrt(var_a) * std::sqrt(var_b));
  return std::clamp(r, -1.0, 1.0);
}

double Rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "rmse inputs differ in length");
  }
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum / static_cast<double>(a.size()));
}

}  // namespace csm
