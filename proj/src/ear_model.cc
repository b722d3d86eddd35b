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

#include "csm/ear_model.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "csm/error.h"
#include "csm/fft.h"

namespace csm {
namespace {

constexpr double kLoudnessExponent = 0.23;
constexpr double kLoudnessConstant = 1.07664;
constexpr double kModulationExponent = 0.3;

double SmoothingCoefficient(double center_hz, double tau_min, double tau_100,
                            double frames_per_second) {
  const double tau = tau_min + 100.0 / center_hz * (tau_100 - tau_min);
  return std::exp(-1.0 / (frames_per_second * tau));
}

// Peak of the power spectrum of the (windowed, mean-removed) normalized
// autocorrelation of the error log-spectrum, searched after its first valley.
double ErrorHarmonicity(std::span<const double> log_ratio, size_t lags,
                        RealFft& fft) {
  double energy_head = 0.0;
  for (size_t k = 0; k < lags; ++k) energy_head += log_ratio[k] * log_ratio[k];
  if (energy_head <= 0.0) return 0.0;
  std::vector<double> corr(lags, 0.0);
  double energy_tail = energy_head;
  for (size_t l = 0; l < lags; ++l) {
    if (l > 0) {
      energy_tail += log_ratio[l + lags - 1] * log_ratio[l + lags - 1] -
                     log_ratio[l - 1] * log_ratio[l - 1];
    }
    double cross = 0.0;
    for (size_t k = 0; k < lags; ++k) cross += log_ratio[k] * log_ratio[k + l];
    const double denom = std::sqrt(energy_head * std::max(energy_tail, 0.0));
    corr[l] = denom > 0.0 ? cross / denom : 0.0;
  }
  double mean = 0.0;
  for (double c : corr) mean += c;
  mean /= static_cast<double>(lags);
  for (size_t l = 0; l < lags; ++l) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * l / lags);
    corr[l] = (corr[l] - mean) * w;
  }
  std::vector<std::complex<double>> spectrum(fft.bins());
  fft.Forward(corr, spectrum);
  std::vector<double> power(spectrum.size());
  const double norm = static_cast<double>(lags) * lags;
  for (size_t k = 0; k < spectrum.size(); ++k) power[k] = std::norm(spectrum[k]) / norm;
  size_t k = 1;
  while (k + 1 < power.size() && power[k + 1] <= power[k]) ++k;
  double peak = 0.0;
  for (; k < power.size(); ++k) peak = std::max(peak, power[k]);
  return 1000.0 * peak;
}

}  // namespace

double HzToBark(double hz) { return 7.0 * std::asinh(hz / 650.0); }

double BarkToHz(double bark) { return 650.0 * std::sinh(bark / 7.0); }

double OuterEarWeightDb(double hz) {
  const double f = hz / 1000.0;
  return -0.6 * 3.64 * std::pow(f, -0.8) +
         6.5 * std::exp(-0.6 * (f - 3.3) * (f - 3.3)) - 1e-3 * std::pow(f, 3.6);
}

EarModel::EarModel(EarModelConfig config) : config_(config) {
  if (config_.frame_size < 2 * config_.ehs_lags || config_.hop == 0 ||
      config_.band_count == 0 || !(config_.low_hz < config_.high_hz)) {
    throw Error(ErrorCode::kInvalidParameters, "inconsistent ear model config");
  }
  const size_t n = config_.frame_size;
  window_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }

  // Full-scale sine at a bin centre lands at playback_level_db.
  const double scale = std::pow(10.0, config_.playback_level_db / 20.0) /
                       (static_cast<double>(n) / 4.0);
  const size_t bins = n / 2 + 1;
  const double bin_hz = static_cast<double>(kCanonicalSampleRate) / n;
  bin_weight_.assign(bins, 0.0);
  for (size_t k = 1; k < bins; ++k) {
    bin_weight_[k] =
        scale * scale * std::pow(10.0, OuterEarWeightDb(k * bin_hz) / 10.0);
  }

  const double z_low = HzToBark(config_.low_hz);
  const double z_high = HzToBark(config_.high_hz);
  const double dz = (z_high - z_low) / config_.band_count;
  bands_.resize(config_.band_count);
  for (size_t b = 0; b < config_.band_count; ++b) {
    Band& band = bands_[b];
    band.lower_hz = BarkToHz(z_low + b * dz);
    band.upper_hz = BarkToHz(z_low + (b + 1) * dz);
    band.center_bark = z_low + (b + 0.5) * dz;
    band.center_hz = BarkToHz(band.center_bark);
    band.first_bin = static_cast<size_t>(std::ceil(band.lower_hz / bin_hz));
    band.last_bin = static_cast<size_t>(std::ceil(band.upper_hz / bin_hz));
    band.last_bin = std::min(std::max(band.last_bin, band.first_bin + 1), bins);
  }

  const double frames_per_second =
      static_cast<double>(kCanonicalSampleRate) / config_.hop;
  for (const Band& band : bands_) {
    const double f = band.center_hz / 1000.0;
    internal_noise_.push_back(std::pow(10.0, 0.4 * 0.364 * std::pow(f, -0.8)));
    threshold_.push_back(std::pow(10.0, 0.364 * std::pow(f, -0.8)));
    const double s_db =
        -2.0 - 2.05 * std::atan(f / 4.0) - 0.75 * std::atan(f * f / 2.56);
    loudness_index_.push_back(std::pow(10.0, s_db / 10.0));
    loudness_scale_.push_back(
        kLoudnessConstant *
        std::pow(threshold_.back() / loudness_index_.back(), kLoudnessExponent));
    smear_coeff_.push_back(SmoothingCoefficient(
        band.center_hz, config_.tau_min, config_.tau_100, frames_per_second));
    modulation_coeff_.push_back(
        SmoothingCoefficient(band.center_hz, config_.modulation_tau_min,
                             config_.modulation_tau_100, frames_per_second));
    mask_offset_db_.push_back(
        band.center_bark < config_.mask_offset_split_bark
            ? config_.mask_offset_low_db
            : config_.mask_offset_slope_db_per_bark * band.center_bark);
  }

  const size_t nb = config_.band_count;
  spreading_.assign(nb, std::vector<double>(nb, 0.0));
  for (size_t to = 0; to < nb; ++to) {
    double total = 0.0;
    for (size_t from = 0; from < nb; ++from) {
      const double distance = bands_[to].center_bark - bands_[from].center_bark;
      const double slope = distance < 0.0 ? config_.lower_slope_db_per_bark
                                          : config_.upper_slope_db_per_bark;
      spreading_[from][to] = std::pow(10.0, -slope * std::abs(distance) / 10.0);
      total += spreading_[from][to];
    }
    for (size_t from = 0; from < nb; ++from) spreading_[from][to] /= total;
  }
}

size_t EarModel::BandOf(double hz) const {
  for (size_t b = 0; b < bands_.size(); ++b) {
    if (hz >= bands_[b].lower_hz && hz < bands_[b].upper_hz) return b;
  }
  return bands_.size();
}

void EarModel::FinishFrame(std::span<const double> spread,
                           std::vector<double>& smeared,
                           std::vector<double>& mod_mean,
                           std::vector<double>& mod_der,
                           std::vector<double>& previous_envelope, bool first,
                           ExcitationFrame& frame) const {
  const size_t nb = bands_.size();
  const double frames_per_second =
      static_cast<double>(kCanonicalSampleRate) / config_.hop;
  frame.excitation.resize(nb);
  frame.pitch_bands.resize(nb);
  frame.loudness_bands.resize(nb);
  frame.modulation_bands.resize(nb);
  for (size_t b = 0; b < nb; ++b) {
    const double a = smear_coeff_[b];
    smeared[b] = first ? spread[b] : a * smeared[b] + (1.0 - a) * spread[b];
    const double e = std::max(smeared[b], spread[b]) + internal_noise_[b];
    frame.excitation[b] = e;
    frame.pitch_bands[b] = 10.0 * std::log10(e);
    const double s = loudness_index_[b];
    const double n = loudness_scale_[b] *
                     (std::pow(1.0 - s + s * e / threshold_[b], kLoudnessExponent) - 1.0);
    frame.loudness_bands[b] = std::max(n, 0.0);

    const double envelope = std::pow(spread[b] + internal_noise_[b], kModulationExponent);
    const double m = modulation_coeff_[b];
    const double derivative =
        first ? 0.0 : std::abs(envelope - previous_envelope[b]) * frames_per_second;
    mod_mean[b] = first ? envelope : m * mod_mean[b] + (1.0 - m) * envelope;
    mod_der[b] = first ? 0.0 : m * mod_der[b] + (1.0 - m) * derivative;
    previous_envelope[b] = envelope;
    frame.modulation_bands[b] = mod_der[b] / (1.0 + mod_mean[b] / 0.3);
  }
}

std::vector<FramePair> EarModel::AnalyzeChannel(std::span<const float> reference,
                                                std::span<const float> sut,
                                                int sample_rate) const {
  if (sample_rate != kCanonicalSampleRate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                "ear model runs at 48000 Hz only");
  }
  if (reference.size() != sut.size()) {
    throw Error(ErrorCode::kLengthMismatch, "frame analysis needs aligned input");
  }
  const size_t n = config_.frame_size;
  const size_t nb = bands_.size();
  const size_t bins = n / 2 + 1;
  std::vector<FramePair> frames;
  if (reference.size() < n) return frames;
  const size_t count = (reference.size() - n) / config_.hop + 1;
  frames.reserve(count);

  RealFft fft(n);
  RealFft lag_fft(config_.ehs_lags);
  std::vector<double> buffer(n);
  std::vector<std::complex<double>> spec_ref(bins);
  std::vector<std::complex<double>> spec_sut(bins);
  std::vector<double> power_ref(bins);
  std::vector<double> power_sut(bins);
  std::vector<double> log_ratio(2 * config_.ehs_lags);
  std::vector<double> spread_ref(nb);
  std::vector<double> spread_sut(nb);

  struct State {
    std::vector<double> smeared, mod_mean, mod_der, envelope;
  };
  State state_ref{std::vector<double>(nb), std::vector<double>(nb),
                  std::vector<double>(nb), std::vector<double>(nb)};
  State state_sut = state_ref;

  for (size_t t = 0; t < count; ++t) {
    const size_t offset = t * config_.hop;
    double energy_ref = 0.0;
    double energy_sut = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r = reference[offset + i];
      energy_ref += r * r;
      buffer[i] = window_[i] * r;
    }
    fft.Forward(buffer, spec_ref);
    for (size_t i = 0; i < n; ++i) {
      const double s = sut[offset + i];
      energy_sut += s * s;
      buffer[i] = window_[i] * s;
    }
    fft.Forward(buffer, spec_sut);

    FramePair pair;
    pair.reference.frame_time = pair.sut.frame_time =
        (static_cast<double>(offset) + 0.5 * n) / kCanonicalSampleRate;
    pair.reference.band_energy.assign(nb, 0.0);
    pair.sut.band_energy.assign(nb, 0.0);
    pair.error_bands.assign(nb, 0.0);
    for (size_t k = 0; k < bins; ++k) {
      power_ref[k] = std::norm(spec_ref[k]) * bin_weight_[k];
      power_sut[k] = std::norm(spec_sut[k]) * bin_weight_[k];
    }
    for (size_t b = 0; b < nb; ++b) {
      for (size_t k = bands_[b].first_bin; k < bands_[b].last_bin; ++k) {
        pair.reference.band_energy[b] += power_ref[k];
        pair.sut.band_energy[b] += power_sut[k];
        pair.error_bands[b] += std::norm(spec_sut[k] - spec_ref[k]) * bin_weight_[k];
      }
    }
    for (size_t to = 0; to < nb; ++to) {
      double acc_ref = 0.0;
      double acc_sut = 0.0;
      for (size_t from = 0; from < nb; ++from) {
        acc_ref += pair.reference.band_energy[from] * spreading_[from][to];
        acc_sut += pair.sut.band_energy[from] * spreading_[from][to];
      }
      spread_ref[to] = acc_ref;
      spread_sut[to] = acc_sut;
    }
    FinishFrame(spread_ref, state_ref.smeared, state_ref.mod_mean,
                state_ref.mod_der, state_ref.envelope, t == 0, pair.reference);
    FinishFrame(spread_sut, state_sut.smeared, state_sut.mod_mean,
                state_sut.mod_der, state_sut.envelope, t == 0, pair.sut);

    if (energy_ref > config_.ehs_energy_threshold ||
        energy_sut > config_.ehs_energy_threshold) {
      for (size_t k = 0; k < log_ratio.size(); ++k) {
        log_ratio[k] = std::log10((power_sut[k + 1] + config_.ehs_power_floor) /
                                  (power_ref[k + 1] + config_.ehs_power_floor));
      }
      pair.error_harmonicity =
          ErrorHarmonicity(log_ratio, config_.ehs_lags, lag_fft);
    }
    frames.push_back(std::move(pair));
  }
  return frames;
}

std::vector<std::vector<FramePair>> EarModel::Analyze(const AudioPair& pair) const {
  std::vector<std::vector<FramePair>> channels;
  for (int c = 0; c < pair.channels(); ++c) {
    channels.push_back(
        AnalyzeChannel(pair.reference[c], pair.sut[c], pair.sample_rate));
  }
  return channels;
}

}  // namespace csm
