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

#include "csm/synthesis.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "csm/audio_pair.h"
#include "csm/error.h"
#include "csm/fft.h"
#include "csm/wav.h"
#include "json.hpp"

namespace csm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kReferenceRms = 0.1;
constexpr size_t kControlBlock = 240;

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

double Rms(std::span<const float> x) {
  double p = 0.0;
  for (float v : x) p += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : std::sqrt(p / static_cast<double>(x.size()));
}

void ScaleTo(std::vector<float>& x, double rms) {
  const double current = Rms(x);
  if (current <= 0.0) return;
  const auto g = static_cast<float>(rms / current);
  for (float& v : x) v *= g;
}

// Sum of harmonics of a time-varying fundamental. `amplitude(h, f)` is
// queried once per control block for harmonic h at frequency f.
template <typename AmplitudeFn>
void AddHarmonics(std::vector<double>& out, size_t begin, size_t end,
                  const std::vector<double>& f0, size_t max_harmonics, double nyquist_guard,
                  double phase, AmplitudeFn amplitude) {
  std::vector<double> amp(max_harmonics + 1, 0.0);
  std::vector<double> next(max_harmonics + 1, 0.0);
  auto fill = [&](std::vector<double>& a, size_t n) {
    const double f = f0[std::min(n, f0.size() - 1)];
    for (size_t h = 1; h <= max_harmonics; ++h) {
      a[h] = h * f < nyquist_guard ? amplitude(h, h * f, n) : 0.0;
    }
  };
  fill(amp, begin);
  for (size_t block = begin; block < end; block += kControlBlock) {
    const size_t block_end = std::min(block + kControlBlock, end);
    fill(next, block_end);
    for (size_t n = block; n < block_end; ++n) {
      const double frac = static_cast<double>(n - block) / kControlBlock;
      phase += kTwoPi * f0[n] / kCanonicalSampleRate;
      if (phase > kTwoPi) phase -= kTwoPi;
      const double s1 = std::sin(phase);
      const double c2 = 2.0 * std::cos(phase);
      double prev = 0.0;
      double cur = s1;
      double acc = 0.0;
      for (size_t h = 1; h <= max_harmonics; ++h) {
        const double a = amp[h] + frac * (next[h] - amp[h]);
        acc += a * cur;
        const double nxt = c2 * cur - prev;
        prev = cur;
        cur = nxt;
      }
      out[n] += acc;
    }
    std::swap(amp, next);
  }
}

std::vector<double> PinkNoise(size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const size_t size = FastFftSize(n);
  std::vector<double> buffer(size);
  for (double& v : buffer) v = normal(rng);
  RealFft fft(size);
  std::vector<std::complex<double>> spectrum(fft.bins());
  fft.Forward(buffer, spectrum);
  const double bin_hz = static_cast<double>(kCanonicalSampleRate) / size;
  spectrum[0] = 0.0;
  for (size_t k = 1; k < spectrum.size(); ++k) {
    spectrum[k] /= std::sqrt(std::max(k * bin_hz, 50.0) / 50.0);
  }
  fft.Inverse(spectrum, buffer);
  buffer.resize(n);
  return buffer;
}

constexpr double kRoomTone = 0.01;

std::vector<float> SpeechLike(std::mt19937_64& rng, size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Syllable {
    size_t begin, end;
    double f1, f2, f3;
    size_t fricative_end;
  };
  std::vector<Syllable> syllables;
  size_t t = static_cast<size_t>(uniform(0.05, 0.2) * kCanonicalSampleRate);
  while (t < n) {
    const int count = 2 + static_cast<int>(uniform(0.0, 4.0));
    for (int s = 0; s < count && t < n; ++s) {
      Syllable syl;
      syl.begin = t;
      syl.end = std::min(n, t + static_cast<size_t>(uniform(0.16, 0.30) * kCanonicalSampleRate));
      syl.f1 = uniform(300.0, 800.0);
      syl.f2 = uniform(900.0, 2300.0);
      syl.f3 = uniform(2400.0, 3300.0);
      syl.fricative_end = u(rng) < 0.4
          ? syl.begin + static_cast<size_t>(uniform(0.04, 0.09) * kCanonicalSampleRate)
          : syl.begin;
      syllables.push_back(syl);
      t = syl.end;
    }
    t += static_cast<size_t>(uniform(0.15, 0.45) * kCanonicalSampleRate);
  }

  const double base = uniform(95.0, 230.0);
  const double p1 = uniform(0.0, kTwoPi);
  const double p2 = uniform(0.0, kTwoPi);
  std::vector<double> f0(n);
  for (size_t i = 0; i < n; ++i) {
    const double time = static_cast<double>(i) / kCanonicalSampleRate;
    f0[i] = base * (1.0 + 0.12 * std::sin(kTwoPi * 0.5 * time + p1) +
                    0.04 * std::sin(kTwoPi * 2.3 * time + p2));
  }

  std::vector<double> voiced(n, 0.0);
  std::vector<double> noise(n, 0.0);
  std::vector<double> white(n);
  for (double& w : white) w = normal(rng);
  for (const Syllable& syl : syllables) {
    const double length = static_cast<double>(syl.end - syl.begin);
    auto formant_gain = [&](size_t, double f, size_t) {
      auto peak = [](double f, double fc, double bw) {
        const double x = (f - fc) / bw;
        return 1.0 / (1.0 + x * x);
      };
      const double tilt = f > 500.0 ? std::pow(f / 500.0, -0.6) : 1.0;
      return tilt * (0.02 + peak(f, syl.f1, 90.0) + 0.6 * peak(f, syl.f2, 120.0) +
                     0.3 * peak(f, syl.f3, 160.0));
    };
    const size_t max_h = static_cast<size_t>(19000.0 / (base * 0.84));
    std::vector<double> segment(n, 0.0);
    AddHarmonics(segment, syl.begin, syl.end, f0, max_h, 19000.0, 0.0, formant_gain);
    for (size_t i = syl.begin; i < syl.end; ++i) {
      const double x = static_cast<double>(i - syl.begin) / length;
      const double env = std::sin(std::numbers::pi * x);
      voiced[i] += env * env * segment[i];
    }
    if (syl.fricative_end > syl.begin) {
      const double flen = static_cast<double>(syl.fricative_end - syl.begin);
      for (size_t i = syl.begin + 2; i < std::min(syl.fricative_end, n); ++i) {
        const double x = static_cast<double>(i - syl.begin) / flen;
        const double hp = white[i] - 2.0 * white[i - 1] + white[i - 2];
        noise[i] += std::sin(std::numbers::pi * x) * hp;
      }
    }
  }
  std::vector<float> out(n);
  const double voiced_rms = Rms(std::vector<float>(voiced.begin(), voiced.end()));
  const double noise_rms = Rms(std::vector<float>(noise.begin(), noise.end()));
  const double noise_gain = noise_rms > 0.0 ? 0.35 * voiced_rms / noise_rms : 0.0;
  // Room tone, so pauses are not digital silence.
  std::vector<double> room = PinkNoise(n, rng);
  const double room_rms = Rms(std::vector<float>(room.begin(), room.end()));
  const double room_gain = room_rms > 0.0 ? kRoomTone * voiced_rms / room_rms : 0.0;
  for (size_t i = 0; i < n; ++i) {
    out[i] = static_cast<float>(voiced[i] + noise_gain * noise[i] + room_gain * room[i]);
  }
  return out;
}

std::vector<float> MusicLike(std::mt19937_64& rng, size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  std::vector<double> out(n, 0.0);
  const double brightness = uniform(0.7, 1.0);
  const size_t overlap = static_cast<size_t>(0.35 * kCanonicalSampleRate);
  size_t t = 0;
  while (t < n) {
    const size_t length = static_cast<size_t>(uniform(1.0, 2.2) * kCanonicalSampleRate);
    const size_t begin = t;
    const size_t end = std::min(n, t + length + overlap);
    const int root = 45 + static_cast<int>(uniform(0.0, 13.0));
    const bool minor = u(rng) < 0.5;
    std::vector<int> notes = {root, root + (minor ? 3 : 4), root + 7,
                              root + (minor ? 10 : 11) + (u(rng) < 0.5 ? 12 : 0)};
    const double attack = uniform(0.12, 0.3) * kCanonicalSampleRate;
    for (int note : notes) {
      const double f = 440.0 * std::pow(2.0, (note - 69) / 12.0);
      const double rate = uniform(4.5, 6.0);
      const double vib_phase = uniform(0.0, kTwoPi);
      std::vector<double> f0(n);
      for (size_t i = begin; i < end; ++i) {
        f0[i] = f * (1.0 + 0.003 * std::sin(kTwoPi * rate * i / kCanonicalSampleRate + vib_phase));
      }
      std::vector<double> tone(n, 0.0);
      AddHarmonics(tone, begin, end, f0, 60, 19000.0, uniform(0.0, kTwoPi),
                   [&](size_t h, double, size_t) {
                     return std::pow(static_cast<double>(h), -0.8 / brightness);
                   });
      const double span = static_cast<double>(end - begin);
      for (size_t i = begin; i < end; ++i) {
        const double x = static_cast<double>(i - begin);
        const double rise = std::min(1.0, x / attack);
        const double fall = std::min(1.0, (span - x) / static_cast<double>(overlap));
        out[i] += rise * std::max(fall, 0.0) * tone[i];
      }
    }
    t += length;
  }
  std::vector<double> air = PinkNoise(n, rng);
  std::vector<float> result(n);
  const double tone_rms = Rms(std::vector<float>(out.begin(), out.end()));
  const double air_rms = Rms(std::vector<float>(air.begin(), air.end()));
  const double air_gain = air_rms > 0.0 ? 0.02 * tone_rms / air_rms : 0.0;
  for (size_t i = 0; i < n; ++i) result[i] = static_cast<float>(out[i] + air_gain * air[i]);
  return result;
}

std::string SignalId(size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%02zu", index + 1);
  return buf;
}

double Logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

uint64_t MixSeed(uint64_t seed, std::string_view salt, uint64_t a, uint64_t b) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : salt) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  auto mix = [](uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed ^ h) ^ a) ^ (b * 0x632BE59BD9B4E019ULL));
}

std::string TreatmentId(size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02zu", index + 1);
  return buf;
}

std::vector<float> Lowpass(std::span<const float> input, int sample_rate,
                           double cutoff_hz, const LowpassDesign& design) {
  if (design.taps % 2 == 0) {
    throw Error(ErrorCode::kInvalidParameters, "lowpass needs an odd tap count");
  }
  const size_t half = design.taps / 2;
  const double fc = cutoff_hz / sample_rate;
  std::vector<double> kernel(design.taps);
  const double i0 = BesselI0(design.kaiser_beta);
  double sum = 0.0;
  for (size_t i = 0; i < design.taps; ++i) {
    const double m = static_cast<double>(i) - static_cast<double>(half);
    const double sinc = m == 0.0 ? 2.0 * fc : std::sin(kTwoPi * fc * m) / (std::numbers::pi * m);
    const double r = m / static_cast<double>(half);
    kernel[i] = sinc * BesselI0(design.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0;
    sum += kernel[i];
  }
  for (double& k : kernel) k /= sum;

  const size_t size = FastFftSize(input.size() + design.taps);
  RealFft fft(size);
  std::vector<double> buffer(size, 0.0);
  std::copy(input.begin(), input.end(), buffer.begin());
  std::vector<std::complex<double>> x(fft.bins());
  std::vector<std::complex<double>> h(fft.bins());
  fft.Forward(buffer, x);
  std::fill(buffer.begin(), buffer.end(), 0.0);
  std::copy(kernel.begin(), kernel.end(), buffer.begin());
  fft.Forward(buffer, h);
  for (size_t k = 0; k < x.size(); ++k) x[k] *= h[k] / static_cast<double>(size);
  fft.Inverse(x, buffer);
  std::vector<float> out(input.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(buffer[i + half]);
  return out;
}

std::vector<float> ApplyTreatment(std::span<const float> reference, int sample_rate,
                                  const Degradation& d, uint64_t seed) {
  if (d.lowpass_hz && !(*d.lowpass_hz > 0.0 && *d.lowpass_hz < 0.5 * sample_rate)) {
    throw Error(ErrorCode::kInvalidParameters, "lowpass cutoff outside (0, Nyquist)");
  }
  if (d.snr_db && !std::isfinite(*d.snr_db)) {
    throw Error(ErrorCode::kInvalidParameters, "SNR must be finite (omit it for no noise)");
  }
  if (!(d.mod_depth >= 0.0 && d.mod_depth <= 1.0) || !(d.mod_rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidParameters, "modulation depth must lie in [0, 1]");
  }
  std::vector<float> out(reference.begin(), reference.end());
  if (d.lowpass_hz) out = Lowpass(out, sample_rate, *d.lowpass_hz);
  if (d.snr_db) {
    std::mt19937_64 rng(seed);
    std::vector<double> noise = PinkNoise(out.size(), rng);
    double signal_power = 0.0;
    double noise_power = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
      signal_power += static_cast<double>(out[i]) * out[i];
      noise_power += noise[i] * noise[i];
    }
    if (noise_power > 0.0 && signal_power > 0.0) {
      const double gain = std::sqrt(signal_power / noise_power * std::pow(10.0, -*d.snr_db / 10.0));
      for (size_t i = 0; i < out.size(); ++i) out[i] += static_cast<float>(gain * noise[i]);
    }
  }
  if (d.mod_depth > 0.0) {
    for (size_t i = 0; i < out.size(); ++i) {
      out[i] *= static_cast<float>(
          1.0 + d.mod_depth * std::sin(kTwoPi * d.mod_rate_hz * i / sample_rate));
    }
  }
  if (d.lowpass_hz || d.snr_db || d.mod_depth > 0.0) {
    for (float& v : out) v = std::clamp(v, -1.0f, 1.0f);
  }
  return out;
}

std::vector<Degradation> DefaultTrainingTreatments() {
  return {
      {.snr_db = 35.0},
      {.snr_db = 20.0},
      {.lowpass_hz = 11000.0},
      {.lowpass_hz = 5000.0},
      {.snr_db = 28.0, .lowpass_hz = 8000.0},
      {.mod_depth = 0.3},
      {.snr_db = 14.0, .lowpass_hz = 3500.0},
  };
}

std::vector<Degradation> DefaultValidationTreatments() {
  return {
      {.snr_db = 40.0},
      {.snr_db = 25.0},
      {.snr_db = 12.0},
      {.lowpass_hz = 14000.0},
      {.lowpass_hz = 7000.0},
      {.snr_db = 30.0, .lowpass_hz = 4000.0},
      {.snr_db = 18.0, .lowpass_hz = 10000.0},
      {.snr_db = 26.0, .mod_depth = 0.2},
      {.lowpass_hz = 2500.0, .mod_depth = 0.15},
  };
}

double NoiseSeverity(const Degradation& d) {
  return d.snr_db ? Logistic((22.0 - *d.snr_db) / 5.0) : 0.0;
}

double LinearSeverity(const Degradation& d) {
  if (!d.lowpass_hz) return 0.0;
  return std::clamp(std::log2(18000.0 / *d.lowpass_hz) / std::log2(18000.0 / 1500.0), 0.0, 1.0);
}

double ModulationSeverity(const Degradation& d) {
  return std::clamp(d.mod_depth / 0.6, 0.0, 1.0);
}

double LatentQuality(const Degradation& d, double speech_mix, const LatentModel& model,
                     double noise_jitter, double linear_jitter) {
  const double g = model.class_dependent
                       ? Logistic(model.class_steepness * (speech_mix - 0.5))
                       : 0.5;
  const double w_noise = noise_jitter * (model.noise_weight_music +
                                         (model.noise_weight_speech - model.noise_weight_music) * g);
  const double w_linear = linear_jitter * (model.linear_weight_music +
                                           (model.linear_weight_speech - model.linear_weight_music) * g);
  // Salience-weighted mean of per-dimension qualities.
  const double w_mod = 1.0;
  const double q = (w_noise * (1.0 - NoiseSeverity(d)) + w_linear * (1.0 - LinearSeverity(d)) +
                    w_mod * (1.0 - ModulationSeverity(d))) /
                   (w_noise + w_linear + w_mod);
  return std::clamp(100.0 * q, 0.0, 100.0);
}

SyntheticDataset Synthesize(const SyntheticSpec& spec) {
  SyntheticDataset data;
  data.spec = spec;
  data.treatments = spec.treatments.empty() ? DefaultTrainingTreatments() : spec.treatments;
  if (spec.signal_count < 8 || data.treatments.size() < 4) {
    throw Error(ErrorCode::kInvalidSpec, "synthetic spec needs J >= 8 signals and I >= 4 treatments");
  }
  if (!(spec.duration_s >= 2.0) || spec.latent.listeners < 2) {
    throw Error(ErrorCode::kInvalidSpec, "synthetic spec needs >= 2 s excerpts and >= 2 listeners");
  }
  const auto n = static_cast<size_t>(std::llround(spec.duration_s * kCanonicalSampleRate));

  for (size_t j = 0; j < spec.signal_count; ++j) {
    std::mt19937_64 rng(MixSeed(spec.seed, spec.split, j));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SyntheticSignal s;
    s.id = SignalId(j);
    switch (j % 3) {
      case 0:
        s.kind = "speech";
        s.speech_mix = 1.0;
        break;
      case 1:
        s.kind = "music";
        s.speech_mix = 0.0;
        break;
      default:
        s.kind = "mixed";
        s.speech_mix = 0.1 + 0.8 * u(rng);
    }
    s.noise_jitter = std::exp(spec.latent.signal_jitter * normal(rng));
    s.linear_jitter = std::exp(spec.latent.signal_jitter * normal(rng));
    if (s.speech_mix >= 1.0) {
      s.reference = SpeechLike(rng, n);
    } else if (s.speech_mix <= 0.0) {
      s.reference = MusicLike(rng, n);
    } else {
      std::vector<float> speech = SpeechLike(rng, n);
      std::vector<float> music = MusicLike(rng, n);
      ScaleTo(speech, std::sqrt(s.speech_mix));
      ScaleTo(music, std::sqrt(1.0 - s.speech_mix));
      s.reference.resize(n);
      for (size_t i = 0; i < n; ++i) s.reference[i] = speech[i] + music[i];
    }
    ScaleTo(s.reference, kReferenceRms);
    float peak = 0.0f;
    for (float v : s.reference) peak = std::max(peak, std::abs(v));
    if (peak > 0.5f) {
      for (float& v : s.reference) v *= 0.5f / peak;
    }
    data.signals.push_back(std::move(s));
  }

  for (size_t j = 0; j < data.signals.size(); ++j) {
    for (size_t i = 0; i < data.treatments.size(); ++i) {
      SyntheticCondition c;
      c.signal = j;
      c.treatment = i;
      c.sut = ApplyTreatment(data.signals[j].reference, kCanonicalSampleRate, data.treatments[i],
                             MixSeed(spec.seed, spec.split, j, i + 1));
      data.conditions.push_back(std::move(c));
    }
  }
  AssignRatings(data, spec.latent);
  return data;
}

void AssignRatings(SyntheticDataset& data, const LatentModel& latent) {
  if (latent.listeners < 2) {
    throw Error(ErrorCode::kInvalidSpec, "synthetic spec needs >= 2 listeners");
  }
  const SyntheticSpec& spec = data.spec;
  data.spec.latent = latent;
  std::mt19937_64 panel_rng(MixSeed(spec.seed, spec.split + "/panel", 0));
  std::normal_distribution<double> panel_normal(0.0, 1.0);
  std::vector<double> listener_bias(static_cast<size_t>(latent.listeners));
  for (double& b : listener_bias) b = latent.listener_bias_sigma * panel_normal(panel_rng);

  for (SyntheticCondition& c : data.conditions) {
    const SyntheticSignal& s = data.signals[c.signal];
    c.latent_mos = LatentQuality(data.treatments[c.treatment], s.speech_mix, latent,
                                 s.noise_jitter, s.linear_jitter);
    std::mt19937_64 rating_rng(MixSeed(spec.seed, spec.split + "/ratings", c.signal, c.treatment));
    std::normal_distribution<double> normal(0.0, 1.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double bias : listener_bias) {
      const double r = std::clamp(
          c.latent_mos + bias + latent.listener_sigma * normal(rating_rng), 0.0, 100.0);
      sum += r;
      sum_sq += r * r;
    }
    const double l = static_cast<double>(listener_bias.size());
    c.mos = sum / l;
    const double var = std::max(0.0, (sum_sq - l * c.mos * c.mos) / (l - 1.0));
    c.ci95 = 2.201 * std::sqrt(var / l);
  }
}

void WriteSyntheticDataset(const SyntheticDataset& data,
                           const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory / "ref");
  std::filesystem::create_directories(directory / "sut");
  DatasetManifest manifest;
  manifest.base_dir = directory;
  nlohmann::ordered_json truth = nlohmann::ordered_json::object();
  truth["seed"] = data.spec.seed;
  truth["split"] = data.spec.split;
  truth["class_dependent"] = data.spec.latent.class_dependent;
  truth["signals"] = nlohmann::ordered_json::array();
  for (const SyntheticSignal& s : data.signals) {
    const std::filesystem::path rel = std::filesystem::path("ref") / (s.id + ".wav");
    WriteWav(directory / rel, WavData{kCanonicalSampleRate, {s.reference}}, SampleFormat::kPcm24);
    manifest.signals.push_back({s.id, rel});
    truth["signals"].push_back({{"id", s.id},
                                {"kind", s.kind},
                                {"speech_mix", s.speech_mix},
                                {"noise_jitter", s.noise_jitter},
                                {"linear_jitter", s.linear_jitter}});
  }
  for (size_t i = 0; i < data.treatments.size(); ++i) {
    manifest.treatments.push_back(
        {TreatmentId(i), DescribeDegradation(data.treatments[i]), data.treatments[i]});
  }
  truth["conditions"] = nlohmann::ordered_json::array();
  for (const SyntheticCondition& c : data.conditions) {
    const std::string sid = data.signals[c.signal].id;
    const std::string tid = TreatmentId(c.treatment);
    const std::filesystem::path rel = std::filesystem::path("sut") / (sid + "_" + tid + ".wav");
    WriteWav(directory / rel, WavData{kCanonicalSampleRate, {c.sut}}, SampleFormat::kPcm24);
    manifest.conditions.push_back({sid, tid, rel, c.mos, c.ci95});
    truth["conditions"].push_back(
        {{"signal", sid}, {"treatment", tid}, {"latent_mos", c.latent_mos}});
  }
  WriteManifest(directory / "manifest.json", manifest);
  std::ofstream out(directory / "ground_truth.json");
  out << truth.dump(2) << '\n';
}

DatasetManifest GenerateSynthetic(const SyntheticSpec& spec,
                                  const std::filesystem::path& directory) {
  WriteSyntheticDataset(Synthesize(spec), directory);
  return LoadManifest(directory / "manifest.json");
}

}  // namespace csm
