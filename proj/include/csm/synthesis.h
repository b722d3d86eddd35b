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

#ifndef CSM_SYNTHESIS_H_
#define CSM_SYNTHESIS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csm/manifest.h"

namespace csm {

struct LowpassDesign {
  size_t taps = 1023;
  double kaiser_beta = 9.0;
};

// Zero-phase Kaiser-windowed-sinc lowpass applied by FFT convolution.
std::vector<float> Lowpass(std::span<const float> input, int sample_rate,
                           double cutoff_hz, const LowpassDesign& design = {});

// Deterministic degradation chain (lowpass, pink noise at the requested SNR
// relative to the filtered signal, sinusoidal AM), clipped to [-1, 1].
// The identity degradation returns the input unchanged.
std::vector<float> ApplyTreatment(std::span<const float> reference, int sample_rate,
                                  const Degradation& degradation, uint64_t seed);

// Latent listener model. The class-dependent rule makes added noise more
// salient for speech-like signals and linear distortion more salient for
// music-like ones.
struct LatentModel {
  bool class_dependent = true;
  double class_steepness = 12.0;
  double noise_weight_music = 0.4;
  double noise_weight_speech = 1.6;
  double linear_weight_music = 1.6;
  double linear_weight_speech = 0.3;
  // Per-signal multiplicative jitter on the weights (log-normal sigma).
  double signal_jitter = 0.1;
  int listeners = 12;
  double listener_sigma = 8.0;
  double listener_bias_sigma = 4.0;
};

struct SyntheticSpec {
  size_t signal_count = 24;
  std::vector<Degradation> treatments;  // empty: DefaultTrainingTreatments()
  uint64_t seed = 42;
  // Signals and noise draws are keyed by (seed, split, index); distinct
  // splits yield disjoint signal sets.
  std::string split = "train";
  double duration_s = 4.0;
  LatentModel latent;
};

std::vector<Degradation> DefaultTrainingTreatments();
std::vector<Degradation> DefaultValidationTreatments();

// Severity terms of the latent model, each in [0, 1].
double NoiseSeverity(const Degradation& d);
double LinearSeverity(const Degradation& d);
double ModulationSeverity(const Degradation& d);

// Noise-free quality for a signal with speech share `speech_mix`.
double LatentQuality(const Degradation& d, double speech_mix, const LatentModel& model,
                     double noise_jitter = 1.0, double linear_jitter = 1.0);

struct SyntheticSignal {
  std::string id;
  std::string kind;  // "speech", "music", "mixed"
  double speech_mix = 0.0;
  double noise_jitter = 1.0;
  double linear_jitter = 1.0;
  std::vector<float> reference;
};

struct SyntheticCondition {
  size_t signal = 0;
  size_t treatment = 0;
  std::vector<float> sut;
  double latent_mos = 0.0;
  double mos = 0.0;
  double ci95 = 0.0;
};

struct SyntheticDataset {
  SyntheticSpec spec;
  std::vector<SyntheticSignal> signals;
  std::vector<Degradation> treatments;
  std::vector<SyntheticCondition> conditions;  // signal-major order
};

SyntheticDataset Synthesize(const SyntheticSpec& spec);

// Redraws latent MOS, ratings and confidence intervals for the existing audio
// of `data` under `latent`; the audio itself does not depend on the latent model.
void AssignRatings(SyntheticDataset& data, const LatentModel& latent);

// Writes 48 kHz PCM WAV files, manifest.json and ground_truth.json into
// `directory` and returns the manifest.
DatasetManifest GenerateSynthetic(const SyntheticSpec& spec,
                                  const std::filesystem::path& directory);

void WriteSyntheticDataset(const SyntheticDataset& dataset,
                           const std::filesystem::path& directory);

std::string TreatmentId(size_t index);

// Stable 64-bit mixing of seed material.
uint64_t MixSeed(uint64_t seed, std::string_view salt, uint64_t a, uint64_t b = 0);

}  // namespace csm

#endif  // CSM_SYNTHESIS_H_
