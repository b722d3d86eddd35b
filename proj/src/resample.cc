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

#include "csm/resample.h"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace csm {
namespace {

constexpr int kZeroCrossings = 32;
constexpr double kKaiserBeta = 8.6;

double BesselI0(double x) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

std::vector<float> Resample(std::span<const float> input, int from_rate,
                            int to_rate) {
  if (from_rate == to_rate) return {input.begin(), input.end()};
  const double ratio = static_cast<double>(to_rate) / from_rate;
  const double cutoff = std::min(1.0, ratio);  // relative to input Nyquist
  const double half_width = kZeroCrossings / cutoff;
  const double i0_beta = BesselI0(kKaiserBeta);
  const auto out_size =
      static_cast<size_t>(std::llround(static_cast<double>(input.size()) * ratio));
  std::vector<float> output(out_size);
  const auto n = static_cast<int64_t>(input.size());
  for (size_t m = 0; m < out_size; ++m) {
    const double center = static_cast<double>(m) / ratio;
    const auto first = static_cast<int64_t>(std::ceil(center - half_width));
    const auto last = static_cast<int64_t>(std::floor(center + half_width));
    double acc = 0.0;
    for (int64_t k = std::max<int64_t>(first, 0); k <= std::min(last, n - 1); ++k) {
      const double t = static_cast<double>(k) - center;
      const double x = std::numbers::pi * cutoff * t;
      const double sinc = std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x;
      const double r = t / half_width;
      const double window = BesselI0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
      acc += input[static_cast<size_t>(k)] * cutoff * sinc * window;
    }
    output[m] = static_cast<float>(acc);
  }
  return output;
}

}  // namespace csm
