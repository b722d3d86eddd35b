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

#ifndef CSM_EAR_MODEL_H_
#define CSM_EAR_MODEL_H_

#include <span>
#include <vector>

#include "csm/audio_pair.h"

namespace csm {

// Every constant of the simplified PEAQ-style front end. Values are the
// documented defaults; tests pin them.
struct EarModelConfig {
  size_t frame_size = 2048;
  size_t hop = 1024;
  size_t band_count = 40;
  double low_hz = 80.0;
  double high_hz = 18000.0;
  // Level of a full-scale sine at its spectral peak, dB SPL.
  double playback_level_db = 92.0;
  double lower_slope_db_per_bark = 27.0;
  double upper_slope_db_per_bark = 24.0;
  // Time-domain spreading: tau = tau_min + 100 Hz / fc * (tau_100 - tau_min).
  double tau_min = 0.008;
  double tau_100 = 0.030;
  double modulation_tau_min = 0.008;
  double modulation_tau_100 = 0.050;
  // Masking offset below excitation, dB: constant below the split, then
  // per-Bark slope.
  double mask_offset_low_db = 3.0;
  double mask_offset_split_bark = 12.0;
  double mask_offset_slope_db_per_bark = 0.25;
  double nmr_floor_db = -40.0;
  size_t ehs_lags = 256;
  // Per-frame sum of squared samples (full scale = 1) below which the error
  // harmonic structure is not evaluated.
  double ehs_energy_threshold = 1e-5;
  // Added to bin powers before the error log-spectrum ratio.
  double ehs_power_floor = 1.0;
};

struct Band {
  double lower_hz = 0.0;
  double upper_hz = 0.0;
  double center_hz = 0.0;
  double center_bark = 0.0;
  size_t first_bin = 0;
  size_t last_bin = 0;  // exclusive
};

double HzToBark(double hz);
double BarkToHz(double bark);

// Outer/middle ear transfer, dB, f in Hz.
double OuterEarWeightDb(double hz);

struct ExcitationFrame {
  std::vector<double> pitch_bands;       // excitation, dB
  std::vector<double> excitation;        // same, linear power
  std::vector<double> loudness_bands;    // specific loudness, sone
  std::vector<double> modulation_bands;  // dimensionless
  std::vector<double> band_energy;       // ear-weighted band power, unspread
  double frame_time = 0.0;               // frame centre, seconds
};

struct FramePair {
  ExcitationFrame reference;
  ExcitationFrame sut;
  // Ear-weighted power of (sut - reference) spectra per band.
  std::vector<double> error_bands;
  // Peak of the error log-spectrum autocorrelation spectrum; 0 when either
  // frame is below the energy threshold.
  double error_harmonicity = 0.0;
};

class EarModel {
 public:
  explicit EarModel(EarModelConfig config = {});

  const EarModelConfig& config() const { return config_; }
  const std::vector<Band>& bands() const { return bands_; }

  double internal_noise(size_t band) const { return internal_noise_[band]; }
  double excitation_threshold(size_t band) const { return threshold_[band]; }
  double mask_offset_db(size_t band) const { return mask_offset_db_[band]; }

  // One channel. Frames cover only full frame_size windows.
  std::vector<FramePair> AnalyzeChannel(std::span<const float> reference,
                                        std::span<const float> sut,
                                        int sample_rate) const;

  // One frame sequence per channel.
  std::vector<std::vector<FramePair>> Analyze(const AudioPair& pair) const;

  // Index of the band containing `hz`, or band_count when outside.
  size_t BandOf(double hz) const;

 private:
  void FinishFrame(std::span<const double> spread, std::vector<double>& smeared,
                   std::vector<double>& mod_mean, std::vector<double>& mod_der,
                   std::vector<double>& previous_envelope, bool first,
                   ExcitationFrame& frame) const;

  EarModelConfig config_;
  std::vector<Band> bands_;
  std::vector<double> window_;
  std::vector<double> bin_weight_;
  std::vector<double> internal_noise_;
  std::vector<double> threshold_;
  std::vector<double> loudness_index_;
  std::vector<double> loudness_scale_;
  std::vector<double> smear_coeff_;
  std::vector<double> modulation_coeff_;
  std::vector<double> mask_offset_db_;
  std::vector<std::vector<double>> spreading_;  // [from][to], normalized
};

}  // namespace csm

#endif  // CSM_EAR_MODEL_H_
