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

#ifndef CSM_COGNITIVE_METRICS_H_
#define CSM_COGNITIVE_METRICS_H_

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "csm/audio_pair.h"
#include "csm/ear_model.h"

namespace csm {

inline constexpr size_t kCemCount = 3;
inline constexpr std::array<std::string_view, kCemCount> kCemNames = {
    "epn", "pdev", "prob_speech"};

// Returns kCemCount for unknown names.
size_t CemIndex(std::string_view name);

// Cognitive effect metrics, each in [0, 1].
struct CemRecord {
  double epn = 0.0;
  double pdev = 0.0;
  double prob_speech = 0.5;

  double operator[](size_t i) const;
  double& operator[](size_t i);
  bool operator==(const CemRecord&) const = default;
};

// Perceptual streaming stand-in. For every time-frequency cell the
// disturbance D = |E_sut - E_ref| (linear excitation) is weighted by its local
// dominance D / (D + E_ref); the result is the disturbance-energy-weighted
// mean dominance. Zero without disturbance, near one for disturbances in
// regions where the reference is silent.
double ComputeEpn(std::span<const FramePair> frames);

struct PdevOptions {
  // Relative floor for normalized band energy, dB.
  double floor_db = -60.0;
  // Saturation scale of 1 - exp(-deviation / scale), dB.
  double saturation_db = 6.0;
};

// Informational masking stand-in: mean absolute deviation over time of the
// reference band energy (dB, normalized by its global mean), averaged over
// bands and squashed to [0, 1). Gain invariant; zero for stationary input.
double ComputePdev(std::span<const FramePair> frames, const PdevOptions& options = {});

struct SpeechFeatures {
  double syllabic_modulation = 0.0;  // envelope power share at 2.5-7 Hz
  double flux_variance = 0.0;        // variance of log10 spectral flux
  double pause_rate = 0.0;           // active-to-pause transitions per second
  bool silent = false;
};

SpeechFeatures ExtractSpeechFeatures(std::span<const float> signal, int sample_rate);

// Logistic speech/music classifier on the reference. Coefficients were fixed
// once against a labelled synthetic speech/music corpus. Silence maps to 0.5.
struct SpeechClassifier {
  double bias = -2.5;
  double syllabic_weight = 54.0;
  double flux_weight = -5.9;
  double pause_weight = 0.85;

  double Probability(const SpeechFeatures& features) const;
};

double ComputeProbSpeech(const AudioPair& pair, const SpeechClassifier& classifier = {});

// Metric-provider boundary so alternate formulas can be swapped in.
class CemProvider {
 public:
  virtual ~CemProvider() = default;
  // `frames` holds one frame sequence per channel.
  virtual CemRecord Compute(const AudioPair& pair,
                            std::span<const std::vector<FramePair>> frames) const = 0;
};

class DefaultCemProvider : public CemProvider {
 public:
  DefaultCemProvider() = default;
  DefaultCemProvider(PdevOptions pdev, SpeechClassifier classifier)
      : pdev_(pdev), classifier_(classifier) {}

  CemRecord Compute(const AudioPair& pair,
                    std::span<const std::vector<FramePair>> frames) const override;

 private:
  PdevOptions pdev_;
  SpeechClassifier classifier_;
};

}  // namespace csm

#endif  // CSM_COGNITIVE_METRICS_H_
