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

#include "csm/evaluation.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "csm/error.h"
#include "csm/stats.h"
#include "json.hpp"

namespace csm {
namespace {

using Json = nlohmann::ordered_json;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::RowVector4d SlopeRow(double u) { return {0.0, 1.0, 2.0 * u, 3.0 * u * u}; }

// Combinations of `k` indices out of `n`, in lexicographic order.
template <typename Fn>
void ForEachSubset(size_t n, size_t k, Fn fn) {
  std::vector<size_t> idx(k);
  for (size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double Uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double MonotoneMapping::operator()(double p) const {
  const double u = std::clamp((p - lo) / (hi - lo), 0.0, 1.0);
  const auto& c = coefficients;
  return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
}

double MonotoneMapping::MinSlope() const {
  const auto& c = coefficients;
  auto slope = [&](double u) { return c[1] + 2.0 * c[2] * u + 3.0 * c[3] * u * u; };
  double m = std::min(slope(0.0), slope(1.0));
  if (c[3] != 0.0) {
    const double u = -c[2] / (3.0 * c[3]);
    if (u > 0.0 && u < 1.0) m = std::min(m, slope(u));
  }
  return m;
}

MonotoneMapping FitMapping(std::span<const double> predictions, std::span<const double> mos,
                           const MappingOptions& options) {
  if (predictions.size() != mos.size()) {
    throw Error(ErrorCode::kLengthMismatch, "predictions and MOS differ in length");
  }
  if (predictions.size() < 4) throw Error(ErrorCode::kInsufficientData, "mapping needs 4 conditions");
  const auto [lo_it, hi_it] = std::minmax_element(predictions.begin(), predictions.end());
  MonotoneMapping map;
  map.lo = *lo_it;
  map.hi = *hi_it;
  if (!(map.hi - map.lo > 1e-12 * std::max(1.0, std::abs(map.hi)))) {
    throw Error(ErrorCode::kDegenerateInput, "constant predictions");
  }
  const auto n = static_cast<Eigen::Index>(predictions.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (predictions[i] - map.lo) / (map.hi - map.lo);
    a.row(i) << 1.0, u, u * u, u * u * u;
    y[i] = mos[i];
  }
  Eigen::Matrix4d h = a.transpose() * a;
  h += Eigen::Matrix4d::Identity() * (1e-12 * h.trace());
  const Eigen::Vector4d g = a.transpose() * y;

  std::vector<double> points;
  const size_t count = std::max<size_t>(options.constraint_points, 3);
  for (size_t s = 0; s < count; ++s) points.push_back(static_cast<double>(s) / (count - 1));

  // The optimum of this small convex QP has at most three independent
  // active slope constraints; enumerate candidate active sets and keep the
  // best feasible equality-constrained solution.
  Eigen::Vector4d best = Eigen::Vector4d::Zero();
  for (int round = 0; round < 8; ++round) {
    double best_obj = std::numeric_limits<double>::infinity();
    const double tol = 1e-9 * std::max(1.0, g.cwiseAbs().maxCoeff() / static_cast<double>(n));
    auto consider = [&](const std::vector<size_t>& active) {
      const auto k = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(4 + k, 4 + k);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 + k);
      kkt.topLeftCorner(4, 4) = h;
      rhs.head(4) = g;
      for (Eigen::Index r = 0; r < k; ++r) {
        kkt.block(4 + r, 0, 1, 4) = SlopeRow(points[active[r]]);
        kkt.block(0, 4 + r, 4, 1) = SlopeRow(points[active[r]]).transpose();
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (!lu.isInvertible()) return;
      const Eigen::Vector4d c = lu.solve(rhs).head(4);
      for (double u : points) {
        if (SlopeRow(u).dot(c) < -tol) return;
      }
      const double obj = (a * c - y).squaredNorm();
      if (obj < best_obj * (1.0 - 1e-14)) {
        best_obj = obj;
        best = c;
      }
    };
    for (size_t k = 0; k <= 3; ++k) ForEachSubset(points.size(), k, consider);
    for (size_t i = 0; i < 4; ++i) map.coefficients[i] = best[static_cast<Eigen::Index>(i)];
    const double c3 = map.coefficients[3];
    if (map.MinSlope() >= -tol || c3 == 0.0) break;
    points.push_back(std::clamp(-map.coefficients[2] / (3.0 * c3), 0.0, 1.0));
  }
  return map;
}

double RmseStar(std::span<const double> mapped, std::span<const double> mos,
                std::span<const double> ci95, size_t dof) {
  if (mapped.size() != mos.size() || mapped.size() != ci95.size()) {
    throw Error(ErrorCode::kLengthMismatch, "RMSE* inputs differ in length");
  }
  if (mapped.size() <= dof) {
    throw Error(ErrorCode::kInsufficientData, "RMSE* needs more conditions than mapping parameters");
  }
  double sum = 0.0;
  for (size_t i = 0; i < mapped.size(); ++i) {
    if (ci95[i] < 0.0) throw Error(ErrorCode::kSchemaError, "negative confidence interval");
    const double e = std::max(0.0, std::abs(mapped[i] - mos[i]) - ci95[i]);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(mapped.size() - dof));
}

EvalReport Evaluate(std::string system, std::span<const double> predictions,
                    std::span<const double> mos, std::span<const double> ci95,
                    const MappingOptions& options) {
  EvalReport report;
  report.system = std::move(system);
  report.n = predictions.size();
  report.mapping = FitMapping(predictions, mos, options);
  std::vector<double> mapped(predictions.size());
  for (size_t i = 0; i < mapped.size(); ++i) mapped[i] = report.mapping(predictions[i]);
  const auto [lo, hi] = std::minmax_element(mapped.begin(), mapped.end());
  const auto [mlo, mhi] = std::minmax_element(mos.begin(), mos.end());
  const auto r = Pearson(mapped, mos);
  report.collapsed = !r || (*hi - *lo) <= 1e-6 * std::max(1.0, *mhi - *mlo);
  report.r = report.collapsed ? 0.0 : *r;
  report.rmse_star = RmseStar(mapped, mos, ci95);
  return report;
}

std::string EvalTable(std::span<const EvalReport> reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-20s %8s %8s %6s\n", "System", "R", "RMSE*", "N");
  out << line;
  for (const EvalReport& r : reports) {
    std::snprintf(line, sizeof(line), "%-20s %8.3f %8.3f %6zu%s\n", r.system.c_str(), r.r,
                  r.rmse_star, r.n, r.collapsed ? "  (mapping collapsed)" : "");
    out << line;
  }
  return out.str();
}

std::string EvalJson(std::span<const EvalReport> reports) {
  Json doc = Json::array();
  for (const EvalReport& r : reports) {
    doc.push_back({{"system", r.system},
                   {"r", r.r},
                   {"rmse_star", r.rmse_star},
                   {"n", r.n},
                   {"collapsed", r.collapsed},
                   {"mapping",
                    {{"lo", r.mapping.lo},
                     {"hi", r.mapping.hi},
                     {"coefficients", r.mapping.coefficients}}}});
  }
  return doc.dump(2) + "\n";
}

AnnInput AnnFeatures(const FeatureRow& row) {
  AnnInput x{};
  for (size_t m = 0; m < kDmCount; ++m) x[m] = row.dm[m];
  for (size_t c = 0; c < kCemCount; ++c) x[kDmCount + c] = row.cem[c];
  return x;
}

std::array<std::string, kAnnInputs> AnnInputNames() {
  std::array<std::string, kAnnInputs> names;
  for (size_t m = 0; m < kDmCount; ++m) names[m] = std::string(kDmNames[m]);
  for (size_t c = 0; c < kCemCount; ++c) names[kDmCount + c] = std::string(kCemNames[c]);
  return names;
}

size_t AnnParameterCount(size_t hidden) { return hidden * kAnnInputs + 2 * hidden + 1; }

AnnInput ScaleInput(const AnnModel& model, const AnnInput& x) {
  AnnInput s{};
  for (size_t i = 0; i < kAnnInputs; ++i) {
    const double range = model.input_max[i] - model.input_min[i];
    s[i] = range > 0.0 ? (x[i] - model.input_min[i]) / range : 0.0;
  }
  return s;
}

namespace {

// Forward pass on scaled input; fills hidden activations and returns the
// output in [0, 1].
double Forward(size_t hidden, std::span<const double> p, const AnnInput& s, double* act) {
  const double* w1 = p.data();
  const double* b1 = w1 + hidden * kAnnInputs;
  const double* w2 = b1 + hidden;
  const double b2 = w2[hidden];
  double o = b2;
  for (size_t h = 0; h < hidden; ++h) {
    double z = b1[h];
    for (size_t i = 0; i < kAnnInputs; ++i) z += w1[h * kAnnInputs + i] * s[i];
    act[h] = Sigmoid(z);
    o += w2[h] * act[h];
  }
  return Sigmoid(o);
}

}  // namespace

double AnnModel::Predict(const AnnInput& x) const {
  std::vector<double> act(hidden);
  return 100.0 * Forward(hidden, parameters, ScaleInput(*this, x), act.data());
}

double AnnLoss(const AnnModel& model, std::span<const double> p, std::span<const AnnInput> inputs,
               std::span<const double> mos, std::vector<double>* gradient) {
  const size_t hidden = model.hidden;
  if (p.size() != AnnParameterCount(hidden)) {
    throw Error(ErrorCode::kInvalidParameters, "ANN parameter vector has the wrong size");
  }
  if (gradient) gradient->assign(p.size(), 0.0);
  std::vector<double> act(hidden);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  const double* w2 = p.data() + hidden * kAnnInputs + hidden;
  for (size_t r = 0; r < inputs.size(); ++r) {
    const AnnInput s = ScaleInput(model, inputs[r]);
    const double out = Forward(hidden, p, s, act.data());
    const double err = out - mos[r] / 100.0;
    loss += 0.5 * err * err * inv_n;
    if (!gradient) continue;
    double* g = gradient->data();
    const double d_o = err * out * (1.0 - out) * inv_n;
    double* g_w1 = g;
    double* g_b1 = g + hidden * kAnnInputs;
    double* g_w2 = g_b1 + hidden;
    g_w2[hidden] += d_o;
    for (size_t h = 0; h < hidden; ++h) {
      g_w2[h] += d_o * act[h];
      const double d_z = d_o * w2[h] * act[h] * (1.0 - act[h]);
      g_b1[h] += d_z;
      for (size_t i = 0; i < kAnnInputs; ++i) g_w1[h * kAnnInputs + i] += d_z * s[i];
    }
  }
  return loss;
}

AnnModel TrainAnn(std::span<const AnnInput> inputs, std::span<const double> mos,
                  const AnnConfig& config) {
  if (inputs.size() != mos.size()) throw Error(ErrorCode::kLengthMismatch, "ANN inputs and MOS differ");
  if (inputs.size() < config.min_rows) {
    throw Error(ErrorCode::kInsufficientData,
                "ANN training needs at least " + std::to_string(config.min_rows) + " rows");
  }
  if (config.hidden == 0) throw Error(ErrorCode::kInvalidParameters, "ANN needs hidden units");
  AnnModel model;
  model.hidden = config.hidden;
  model.input_min = inputs[0];
  model.input_max = inputs[0];
  for (const AnnInput& x : inputs) {
    for (size_t i = 0; i < kAnnInputs; ++i) {
      if (!std::isfinite(x[i])) throw Error(ErrorCode::kDegenerateInput, "non-finite ANN input");
      model.input_min[i] = std::min(model.input_min[i], x[i]);
      model.input_max[i] = std::max(model.input_max[i], x[i]);
    }
  }
  std::mt19937_64 rng(config.seed);
  model.parameters.resize(AnnParameterCount(config.hidden));
  for (double& w : model.parameters) w = config.init_scale * (2.0 * Uniform(rng) - 1.0);

  std::vector<double> grad;
  std::vector<double> m(model.parameters.size(), 0.0);
  std::vector<double> v(model.parameters.size(), 0.0);
  double b1t = 1.0;
  double b2t = 1.0;
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = AnnLoss(model, model.parameters, inputs, mos, &grad);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNonFiniteLoss, "ANN loss diverged at epoch " + std::to_string(epoch));
    }
    if (epoch % 500 == 0) model.loss_log.push_back(loss);
    b1t *= config.beta1;
    b2t *= config.beta2;
    for (size_t k = 0; k < grad.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * grad[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * grad[k] * grad[k];
      const double mh = m[k] / (1.0 - b1t);
      const double vh = v[k] / (1.0 - b2t);
      model.parameters[k] -= config.learning_rate * mh / (std::sqrt(vh) + 1e-12);
    }
  }
  const double loss = AnnLoss(model, model.parameters, inputs, mos, nullptr);
  if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFiniteLoss, "ANN loss is not finite");
  model.training_rmse = 100.0 * std::sqrt(2.0 * loss);
  return model;
}

std::string SerializeAnn(const AnnModel& model) {
  Json doc;
  doc["format"] = "csm-ann";
  doc["version"] = 1;
  doc["inputs"] = model.inputs;
  doc["input_min"] = model.input_min;
  doc["input_max"] = model.input_max;
  doc["hidden"] = model.hidden;
  doc["parameters"] = model.parameters;
  doc["training_rmse"] = model.training_rmse;
  doc["loss_log"] = model.loss_log;
  return doc.dump(2) + "\n";
}

AnnModel ParseAnn(const std::string& text) {
  AnnModel model;
  try {
    const Json doc = Json::parse(text);
    if (doc.at("format") != "csm-ann" || doc.at("version") != 1) {
      throw Error(ErrorCode::kSchemaError, "not a version 1 ANN model");
    }
    model.inputs = doc.at("inputs").get<std::array<std::string, kAnnInputs>>();
    if (model.inputs != AnnInputNames()) throw Error(ErrorCode::kSchemaError, "ANN input names differ");
    model.input_min = doc.at("input_min").get<AnnInput>();
    model.input_max = doc.at("input_max").get<AnnInput>();
    model.hidden = doc.at("hidden");
    model.parameters = doc.at("parameters").get<std::vector<double>>();
    model.training_rmse = doc.value("training_rmse", 0.0);
    model.loss_log = doc.value("loss_log", std::vector<double>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("ANN model: ") + e.what());
  }
  if (model.parameters.size() != AnnParameterCount(model.hidden)) {
    throw Error(ErrorCode::kSchemaError, "ANN parameter count does not match hidden units");
  }
  return model;
}

}  // namespace csm
