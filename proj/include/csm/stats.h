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

#ifndef CSM_STATS_H_
#define CSM_STATS_H_

#include <optional>
#include <span>

namespace csm {

double Mean(std::span<const double> values);

// Sample Pearson correlation. Returns nullopt when either input has zero
// variance. Sums run in index order so results are reproducible.
std::optional<double> Pearson(std::span<const double> a,
                              std::span<const double> b);

double Rmse(std::span<const double> a, std::span<const double> b);

}  // namespace csm

#endif  // CSM_STATS_H_
