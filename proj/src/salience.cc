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

#include "csm/salience.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "csm/error.h"
#include "csm/stats.h"

namespace csm {
namespace {

constexpr double kMinSteepnessRange = 0.5;
constexpr double kMaxSteepnessRange = 200.0;

struct Usable {
  std::vector<double> salience;
  std::vector<size_t> index;  // positions in the original signal order
};

Usable DefinedSignals(const SalienceVector& s) {
  Usable u;
  for (size_t j = 0; j < s.values.size(); ++j) {
    if (s.values[j]) {
      u.salience.push_back(*s.values[j]);
      u.index.push_back(j);
    }
  }
  return u;
}

std::vector<double> Gather(std::span<const double> values, const std::vector<size_t>& index) {
  std::vector<double> out;
  out.reserve(index.size());
  for (size_t j : index) out.push_back(values[j]);
  return out;
}

void CheckCem(const SalienceVector& salience, std::span<const double> cem) {
  if (cem.size() != salience.values.size()) {
    throw Error(ErrorCode::kLengthMismatch, "CEM vector length differs from salience vector");
  }
  for (double v : cem) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kDegenerateInput, "non-finite CEM value");
  }
}

}  // namespace

double Logistic(double x, double steepness, double midpoint) {
  return 1.0 / (1.0 + std::exp(-steepness * (x - midpoint)));
}

double Dpw(double x, const LogisticParams& p) {
  // The complement is evaluated as the mirrored logistic so its tail keeps
  // full relative precision.
  return p.inverted ? Logistic(-x, p.steepness, -p.midpoint) : Logistic(x, p.steepness, p.midpoint);
}

double Salience(std::span<const double> mos, std::span<const double> bf_values) {
  if (mos.size() != bf_values.size()) {
    throw Error(ErrorCode::kLengthMismatch, "salience inputs differ in length");
  }
  if (mos.size() < 3) {
    throw Error(ErrorCode::kInsufficientData, "salience needs at least three treatments");
  }
  const auto r = Pearson(mos, bf_values);
  if (!r) throw Error(ErrorCode::kZeroVariance, "MOS or basis function output constant over treatments");
  return *r;
}

size_t SalienceVector::defined_count() const {
  size_t n = 0;
  for (const auto& v : values) n += v.has_value();
  return n;
}

double InteractionCost(const SalienceVector& salience, std::span<const double> weights) {
  if (weights.size() != salience.values.size()) {
    throw Error(ErrorCode::kLengthMismatch, "weight vector length differs from salience vector");
  }
  std::vector<double> s;
  std::vector<double> w;
  for (size_t j = 0; j < weights.size(); ++j) {
    if (salience.values[j] && std::isfinite(weights[j])) {
      s.push_back(*salience.values[j]);
      w.push_back(weights[j]);
    }
  }
  if (s.size() < 3) {
    throw Error(ErrorCode::kInsufficientData, "interaction cost needs at least three signals");
  }
  const auto r = Pearson(s, w);
  if (!r) throw Error(ErrorCode::kZeroVariance, "salience or weights constant across signals");
  return *r;
}

std::vector<double> LogSpace(double lo, double hi, size_t count) {
  std::vector<double> out(count);
  for (size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  if (count > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

std::vector<double> LinSpace(double lo, double hi, size_t count) {
  std::vector<double> out(count);
  for (size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

SearchGrid DefaultGrid() {
  return {LogSpace(kMinSteepnessRange, kMaxSteepnessRange, 61), LinSpace(0.0, 1.0, 101), true};
}

SearchGrid CoarseGrid(size_t k_steps, size_t x0_steps) {
  return {LogSpace(kMinSteepnessRange, kMaxSteepnessRange, k_steps), LinSpace(0.0, 1.0, x0_steps),
          false};
}

DpwSearchResult OptimizeDpw(const SalienceVector& salience, std::span<const double> cem,
                            const SearchGrid& grid) {
  if (grid.size() == 0) throw Error(ErrorCode::kDegenerateGrid, "empty search grid");
  CheckCem(salience, cem);
  const Usable u = DefinedSignals(salience);
  const std::vector<double> x = Gather(cem, u.index);

  DpwSearchResult result;
  if (u.salience.size() >= 3) result.c_raw = Pearson(u.salience, x);
  double best = -1.0;
  std::vector<double> w(x.size());
  if (u.salience.size() >= 3) {
    for (double k : grid.steepness) {
      for (double x0 : grid.midpoint) {
        for (int inv = 0; inv < (grid.include_inverted ? 2 : 1); ++inv) {
          const LogisticParams p{k, x0, inv == 1};
          for (size_t j = 0; j < x.size(); ++j) w[j] = Dpw(x[j], p);
          const auto c = Pearson(u.salience, w);
          if (!c) continue;
          ++result.evaluated;
          if (std::abs(*c) > best + kCostTieTolerance) {
            best = std::abs(*c);
            result.params = p;
            result.c_opt = *c;
          }
        }
      }
    }
  }
  if (result.evaluated == 0) {
    throw Error(ErrorCode::kAllUndefined,
                "every candidate yields an undefined cost for " + salience.dm_name);
  }
  return result;
}

ProductSearchResult OptimizeProduct(const SalienceVector& salience,
                                    const std::vector<std::vector<double>>& cems,
                                    const std::vector<bool>& inverted, const SearchGrid& grid) {
  const size_t cells = grid.steepness.size() * grid.midpoint.size();
  if (cells == 0) throw Error(ErrorCode::kDegenerateGrid, "empty search grid");
  if (cems.empty() || cems.size() != inverted.size()) {
    throw Error(ErrorCode::kInvalidParameters, "product needs one INV flag per factor");
  }
  for (const auto& c : cems) CheckCem(salience, c);
  const Usable u = DefinedSignals(salience);
  const size_t n = u.index.size();
  const size_t factors = cems.size();

  // Per-factor DPW vectors for every grid cell.
  std::vector<std::vector<double>> table(factors, std::vector<double>(cells * n));
  for (size_t f = 0; f < factors; ++f) {
    const std::vector<double> x = Gather(cems[f], u.index);
    for (size_t ki = 0; ki < grid.steepness.size(); ++ki) {
      for (size_t xi = 0; xi < grid.midpoint.size(); ++xi) {
        const LogisticParams p{grid.steepness[ki], grid.midpoint[xi], inverted[f]};
        double* row = &table[f][(ki * grid.midpoint.size() + xi) * n];
        for (size_t j = 0; j < n; ++j) row[j] = Dpw(x[j], p);
      }
    }
  }

  ProductSearchResult result;
  if (n >= 3) {
    std::vector<double> raw(n, 1.0);
    for (size_t f = 0; f < factors; ++f) {
      const std::vector<double> x = Gather(cems[f], u.index);
      for (size_t j = 0; j < n; ++j) raw[j] *= inverted[f] ? 1.0 - x[j] : x[j];
    }
    result.c_raw = Pearson(u.salience, raw);

    std::vector<size_t> cell(factors, 0);
    std::vector<size_t> best_cell(factors, 0);
    std::vector<double> w(n);
    double best = -1.0;
    while (true) {
      std::fill(w.begin(), w.end(), 1.0);
      for (size_t f = 0; f < factors; ++f) {
        const double* row = &table[f][cell[f] * n];
        for (size_t j = 0; j < n; ++j) w[j] *= row[j];
      }
      const auto c = Pearson(u.salience, w);
      if (c) {
        ++result.evaluated;
        if (std::abs(*c) > best + kCostTieTolerance) {
          best = std::abs(*c);
          best_cell = cell;
          result.c_opt = *c;
        }
      }
      // Odometer step, last factor fastest.
      bool wrapped = true;
      for (size_t f = factors; f-- > 0;) {
        if (++cell[f] < cells) {
          wrapped = false;
          break;
        }
        cell[f] = 0;
      }
      if (wrapped) break;
    }
    for (size_t f = 0; f < factors; ++f) {
      result.params.push_back({grid.steepness[best_cell[f] / grid.midpoint.size()],
                               grid.midpoint[best_cell[f] % grid.midpoint.size()], inverted[f]});
    }
  }
  if (result.evaluated == 0) {
    throw Error(ErrorCode::kAllUndefined,
                "every candidate yields an undefined cost for " + salience.dm_name);
  }
  return result;
}

InteractionFixture LoadInteractionFixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open fixture " + path.string());
  InteractionFixture fx;
  std::string line;
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name;
    double s = 0.0, c = 0.0, d = 0.0;
    if (!(std::getline(fields, name, '\t') && fields >> s >> c >> d)) {
      if (fx.signals.empty() && name == "signal") continue;  // header
      throw Error(ErrorCode::kSchemaError, "fixture row " + std::to_string(row) + " is malformed");
    }
    fx.signals.push_back(name);
    fx.salience.push_back(s);
    fx.cem.push_back(c);
    fx.dpw.push_back(d);
  }
  if (fx.signals.size() < 3) throw Error(ErrorCode::kInsufficientData, "fixture has too few rows");
  return fx;
}

}  // namespace csm
