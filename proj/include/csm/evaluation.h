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

#ifndef CSM_EVALUATION_H_
#define CSM_EVALUATION_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csm/pipeline.h"

namespace csm {

// Cubic in the prediction normalized to the fitted range,
// u = (p - lo) / (hi - lo), clamped to [0, 1] outside it.
struct MonotoneMapping {
  double lo = 0.0;
  double hi = 1.0;
  std::array<double, 4> coefficients{};  // c0 + c1 u + c2 u^2 + c3 u^3

  double operator()(double prediction) const;
  // Minimum of the derivative over u in [0, 1].
  double MinSlope() const;
};

struct MappingOptions {
  size_t constraint_points = 50;
};

// Least-squares cubic subject to a non-negative derivative at evenly spaced
// points of the prediction range (refined until the analytic minimum slope
// is non-negative). DegenerateInput for constant predictions,
// InsufficientData below four conditions.
MonotoneMapping FitMapping(std::span<const double> predictions, std::span<const double> mos,
                           const MappingOptions& options = {});

// sqrt(sum(max(0, |p - mos| - ci95)^2) / (N - dof)).
double RmseStar(std::span<const double> mapped, std::span<const double> mos,
                std::span<const double> ci95, size_t dof = 4);

struct EvalReport {
  std::string system;
  double r = 0.0;
  double rmse_star = 0.0;
  size_t n = 0;
  MonotoneMapping mapping;
  // The monotone fit degenerated to a constant; r is reported as 0.
  bool collapsed = false;
};

EvalReport Evaluate(std::string system, std::span<const double> predictions,
                    std::span<const double> mos, std::span<const double> ci95,
                    const MappingOptions& options = {});

// Fixed-width (System, R, RMSE*, N) table and JSON detail.
std::string EvalTable(std::span<const EvalReport> reports);
std::string EvalJson(std::span<const EvalReport> reports);

inline constexpr size_t kAnnInputs = 9;
using AnnInput = std::array<double, kAnnInputs>;

// Six DMs followed by the three CEMs.
AnnInput AnnFeatures(const FeatureRow& row);
std::array<std::string, kAnnInputs> AnnInputNames();

struct AnnConfig {
  size_t hidden = 5;
  size_t epochs = 5000;
  // Full-batch Adam on the mean squared error of MOS / 100.
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double init_scale = 0.5;
  uint64_t seed = 1;
  size_t min_rows = 30;
};

struct AnnModel {
  std::array<std::string, kAnnInputs> inputs = AnnInputNames();
  AnnInput input_min{};
  AnnInput input_max{};
  size_t hidden = 0;
  // Parameter layout: hidden x inputs weights (row-major), hidden biases,
  // hidden output weights, output bias.
  std::vector<double> parameters;
  double training_rmse = 0.0;
  std::vector<double> loss_log;  // training loss every 500 epochs

  double Predict(const AnnInput& x) const;
  bool operator==(const AnnModel&) const = default;
};

size_t AnnParameterCount(size_t hidden);

// Inputs scaled to [0, 1] by the model's training range (constant inputs map
// to 0).
AnnInput ScaleInput(const AnnModel& model, const AnnInput& x);

// Loss 0.5 * mean((y_hat - y)^2 / 100^2) over raw inputs and its gradient
// with respect to `parameters` (same layout as AnnModel::parameters).
double AnnLoss(const AnnModel& model, std::span<const double> parameters,
               std::span<const AnnInput> inputs, std::span<const double> mos,
               std::vector<double>* gradient);

AnnModel TrainAnn(std::span<const AnnInput> inputs, std::span<const double> mos,
                  const AnnConfig& config = {});

std::string SerializeAnn(const AnnModel& model);
AnnModel ParseAnn(const std::string& text);

}  // namespace csm

#endif  // CSM_EVALUATION_H_
