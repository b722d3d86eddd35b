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

#include "csm/cognitive_metrics.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "csm/error.h"
#include "csm/fft.h"

namespace csm {
namespace {

constexpr size_t kEnvelopeHop = 480;  // 10 ms
constexpr size_t kFluxFrame = 1024;
constexpr double kPauseThreshold = 0.03;  // envelope power vs its mean
constexpr double kSilenceDb = -60.0;

double Clamp01(double v) {
  if (!std::isfinite(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

size_t CemIndex(std::string_view name) {
  for (size_t i = 0; i < kCemCount; ++i) {
    if (kCemNames[i] == name) return i;
  }
  if (name == "EPN") return 0;
  if (name == "PDEV") return 1;
  if (name == "probSpeech") return 2;
  return kCemCount;
}

double CemRecord::operator[](size_t i) const {
  return const_cast<CemRecord&>(*this)[i];
}

double& CemRecord::operator[](size_t i) {
  switch (i) {
    case 0: return epn;
    case 1: return pdev;
    case 2: return prob_speech;
  }
  throw Error(ErrorCode::kInvalidParameters, "CEM index out of range");
}

double ComputeEpn(std::span<const FramePair> frames) {
  double weighted = 0.0;
  double total = 0.0;
  for (const FramePair& f : frames) {
    for (size_t b = 0; b < f.reference.excitation.size(); ++b) {
      const double ref = f.reference.excitation[b];
      const double d = std::abs(f.sut.excitation[b] - ref);
      if (d == 0.0) continue;
      weighted += d * d / (d + ref);
      total += d;
    }
  }
  return total > 0.0 ? Clamp01(weighted / total) : 0.0;
}

double ComputePdev(std::span<const FramePair> frames, const PdevOptions& options) {
  if (frames.empty()) return 0.0;
  const size_t nb = frames[0].reference.band_energy.size();
  double mean = 0.0;
  for (const FramePair& f : frames) {
    for (double e : f.reference.band_energy) mean += e;
  }
  mean /= static_cast<double>(frames.size() * nb);
  if (!(mean > 0.0)) return 0.0;

  const double floor = std::pow(10.0, options.floor_db / 10.0);
  std::vector<double> level(frames.size());
  double deviation = 0.0;
  for (size_t b = 0; b < nb; ++b) {
    double band_mean = 0.0;
    for (size_t t = 0; t < frames.size(); ++t) {
      level[t] = 10.0 * std::log10(std::max(frames[t].reference.band_energy[b] / mean, floor));
      band_mean += level[t];
    }
    band_mean /= static_cast<double>(frames.size());
    double band_dev = 0.0;
    for (double l : level) band_dev += std::abs(l - band_mean);
    deviation += band_dev / static_cast<double>(frames.size());
  }
  deviation /= static_cast<double>(nb);
  // Rounding residue of identical frames must not register as variation.
  if (deviation < 1e-9) return 0.0;
  return Clamp01(1.0 - std::exp(-deviation / options.saturation_db));
}

SpeechFeatures ExtractSpeechFeatures(std::span<const float> signal, int sample_rate) {
  SpeechFeatures features;
  const size_t hops = signal.size() / kEnvelopeHop;
  std::vector<double> envelope(hops, 0.0);
  double mean_power = 0.0;
  for (size_t h = 0; h < hops; ++h) {
    double p = 0.0;
    for (size_t i = 0; i < kEnvelopeHop; ++i) {
      const double v = signal[h * kEnvelopeHop + i];
      p += v * v;
    }
    p /= kEnvelopeHop;
    envelope[h] = std::sqrt(p);
    mean_power += p;
  }
  if (hops < 8 || mean_power == 0.0) {
    features.silent = true;
    return features;
  }
  mean_power /= static_cast<double>(hops);
  const double envelope_rate = static_cast<double>(sample_rate) / kEnvelopeHop;

  // Syllabic-rate modulation share of the envelope (DC included in the total).
  const size_t n = FastFftSize(2 * hops);
  RealFft fft(n);
  std::vector<double> padded(n, 0.0);
  std::copy(envelope.begin(), envelope.end(), padded.begin());
  std::vector<std::complex<double>> spectrum(fft.bins());
  fft.Forward(padded, spectrum);
  double syllabic = 0.0;
  double total = 0.0;
  for (size_t k = 0; k < spectrum.size(); ++k) {
    const double f = k * envelope_rate / n;
    const double p = std::norm(spectrum[k]);
    total += p;
    if (f >= 2.5 && f <= 7.0) syllabic += p;
  }
  features.syllabic_modulation = total > 0.0 ? syllabic / total : 0.0;

  // Pause onsets.
  size_t onsets = 0;
  bool paused = envelope[0] * envelope[0] < kPauseThreshold * mean_power;
  for (size_t h = 1; h < hops; ++h) {
    const bool now = envelope[h] * envelope[h] < kPauseThreshold * mean_power;
    if (now && !paused) ++onsets;
    paused = now;
  }
  features.pause_rate = onsets / (static_cast<double>(hops) / envelope_rate);

  // Spectral flux of normalized magnitude spectra over active frames.
  RealFft frame_fft(kFluxFrame);
  std::vector<double> window(kFluxFrame);
  for (size_t i = 0; i < kFluxFrame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / kFluxFrame);
  }
  std::vector<double> frame(kFluxFrame);
  std::vector<std::complex<double>> frame_spec(frame_fft.bins());
  std::vector<double> previous;
  std::vector<double> current(frame_fft.bins());
  std::vector<double> log_flux;
  double peak_energy = 0.0;
  std::vector<double> energies;
  for (size_t off = 0; off + kFluxFrame <= signal.size(); off += kFluxFrame / 2) {
    double e = 0.0;
    for (size_t i = 0; i < kFluxFrame; ++i) e += static_cast<double>(signal[off + i]) * signal[off + i];
    energies.push_back(e);
    peak_energy = std::max(peak_energy, e);
  }
  const double active = peak_energy * std::pow(10.0, kSilenceDb / 10.0);
  size_t index = 0;
  for (size_t off = 0; off + kFluxFrame <= signal.size(); off += kFluxFrame / 2, ++index) {
    if (energies[index] <= active) {
      previous.clear();
      continue;
    }
    for (size_t i = 0; i < kFluxFrame; ++i) frame[i] = window[i] * signal[off + i];
    frame_fft.Forward(frame, frame_spec);
    double sum = 0.0;
    for (size_t k = 0; k < current.size(); ++k) {
      current[k] = std::abs(frame_spec[k]);
      sum += current[k];
    }
    for (double& c : current) c /= sum;
    if (!previous.empty()) {
      double flux = 0.0;
      for (size_t k = 0; k < current.size(); ++k) {
        flux += (current[k] - previous[k]) * (current[k] - previous[k]);
      }
      log_flux.push_back(std::log10(flux + 1e-12));
    }
    previous = current;
  }
  if (log_flux.size() > 1) {
    double m = 0.0;
    for (double v : log_flux) m += v;
    m /= static_cast<double>(log_flux.size());
    double var = 0.0;
    for (double v : log_flux) var += (v - m) * (v - m);
    features.flux_variance = var / static_cast<double>(log_flux.size() - 1);
  }
  return features;
}

double SpeechClassifier::Probability(const SpeechFeatures& features) const {
  if (features.silent) return 0.5;
  const double z = bias + syllabic_weight * features.syllabic_modulation +
                   flux_weight * features.flux_variance +
                   pause_weight * features.pause_rate;
  return Clamp01(1.0 / (1.0 + std::exp(-z)));
}

double ComputeProbSpeech(const AudioPair& pair, const SpeechClassifier& classifier) {
  std::vector<float> mono(pair.frames(), 0.0f);
  const float scale = 1.0f / static_cast<float>(std::max(pair.channels(), 1));
  for (const auto& channel : pair.reference) {
    for (size_t i = 0; i < mono.size(); ++i) mono[i] += scale * channel[i];
  }
  return classifier.Probability(ExtractSpeechFeatures(mono, pair.sample_rate));
}

CemRecord DefaultCemProvider::Compute(
    const AudioPair& pair, std::span<const std::vector<FramePair>> frames) const {
  CemRecord record;
  record.epn = 0.0;
  record.pdev = 0.0;
  for (const auto& channel : frames) {
    record.epn += ComputeEpn(channel) / static_cast<double>(frames.size());
    record.pdev += ComputePdev(channel, pdev_) / static_cast<double>(frames.size());
  }
  record.prob_speech = ComputeProbSpeech(pair, classifier_);
  return record;
}

}  // namespace csm
