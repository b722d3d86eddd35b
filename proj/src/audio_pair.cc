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

#include "csm/audio_pair.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "csm/error.h"
#include "csm/fft.h"
#include "csm/resample.h"

namespace csm {
namespace {

std::vector<float> ChannelSum(const std::vector<std::vector<float>>& channels) {
  std::vector<float> sum(channels.empty() ? 0 : channels[0].size(), 0.0f);
  for (const auto& channel : channels) {
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += channel[i];
  }
  return sum;
}

void Normalize(WavData& data) {
  float peak = 0.0f;
  for (const auto& channel : data.channels) {
    for (float v : channel) peak = std::max(peak, std::abs(v));
  }
  // Float files may exceed full scale; integer files never do.
  if (peak > 1.0f) {
    for (auto& channel : data.channels) {
      for (float& v : channel) v /= peak;
    }
  }
}

void Conform(WavData& data, const IngestOptions& options, const char* which) {
  if (data.sample_rate != kCanonicalSampleRate) {
    if (!options.resample) {
      throw Error(ErrorCode::kSampleRateMismatch,
                  std::string(which) + " sample rate " +
                      std::to_string(data.sample_rate) +
                      " Hz differs from 48000 Hz and resampling is disabled");
    }
    for (auto& channel : data.channels) {
      channel = Resample(channel, data.sample_rate, kCanonicalSampleRate);
    }
    data.sample_rate = kCanonicalSampleRate;
  }
  Normalize(data);
}

}  // namespace

DelayEstimate EstimateDelay(std::span<const float> reference,
                            std::span<const float> sut, int64_t max_lag) {
  DelayEstimate estimate;
  if (std::equal(reference.begin(), reference.end(), sut.begin(), sut.end())) {
    return estimate;
  }
  double energy_ref = 0.0;
  double energy_sut = 0.0;
  for (float v : reference) energy_ref += static_cast<double>(v) * v;
  for (float v : sut) energy_sut += static_cast<double>(v) * v;
  if (energy_ref == 0.0 || energy_sut == 0.0) {
    // Nothing to align against; keep timing as given.
    estimate.confidence = 0.0;
    estimate.defined = false;
    return estimate;
  }

  const size_t n = FastFftSize(reference.size() + sut.size());
  RealFft fft(n);
  std::vector<double> buffer(n, 0.0);
  std::vector<std::complex<double>> ref_spec(fft.bins());
  std::vector<std::complex<double>> sut_spec(fft.bins());
  std::copy(reference.begin(), reference.end(), buffer.begin());
  fft.Forward(buffer, ref_spec);
  std::fill(buffer.begin(), buffer.end(), 0.0);
  std::copy(sut.begin(), sut.end(), buffer.begin());
  fft.Forward(buffer, sut_spec);
  for (size_t k = 0; k < ref_spec.size(); ++k) {
    sut_spec[k] *= std::conj(ref_spec[k]);
  }
  fft.Inverse(sut_spec, buffer);  // buffer[lag mod n] = sum sut[m] ref[m-lag]

  const double norm = std::sqrt(energy_ref * energy_sut) * static_cast<double>(n);
  double best = -2.0;
  for (int64_t lag = -max_lag; lag <= max_lag; ++lag) {
    const auto index = static_cast<size_t>((lag + static_cast<int64_t>(n)) %
                                           static_cast<int64_t>(n));
    const double value = buffer[index] / norm;
    // Strict comparison keeps the smallest |lag| scan order deterministic.
    if (value > best + 1e-15 ||
        (std::abs(value - best) <= 1e-15 && std::abs(lag) < std::abs(estimate.lag))) {
      best = value;
      estimate.lag = lag;
    }
  }
  estimate.confidence = best;
  return estimate;
}

AudioPair MakePair(WavData reference, WavData sut, const IngestOptions& options) {
  if (reference.channels.size() != sut.channels.size()) {
    throw Error(ErrorCode::kChannelMismatch,
                "reference has " + std::to_string(reference.channels.size()) +
                    " channels, sut has " + std::to_string(sut.channels.size()));
  }
  if (reference.channels.empty() || reference.channels.size() > 2) {
    throw Error(ErrorCode::kChannelMismatch, "only mono and stereo are supported");
  }
  if (!options.resample && reference.sample_rate != sut.sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                "reference " + std::to_string(reference.sample_rate) +
                    " Hz vs sut " + std::to_string(sut.sample_rate) + " Hz");
  }
  Conform(reference, options, "reference");
  Conform(sut, options, "sut");

  const auto max_lag = static_cast<int64_t>(
      std::llround(options.max_delay_ms * 1e-3 * kCanonicalSampleRate));
  const DelayEstimate delay =
      EstimateDelay(ChannelSum(reference.channels), ChannelSum(sut.channels), max_lag);
  if (delay.defined && delay.confidence < options.confidence_floor) {
    throw Error(ErrorCode::kAlignmentFailure,
                "cross-correlation peak " + std::to_string(delay.confidence) +
                    " below confidence floor " +
                    std::to_string(options.confidence_floor));
  }

  const size_t ref_skip = delay.lag < 0 ? static_cast<size_t>(-delay.lag) : 0;
  const size_t sut_skip = delay.lag > 0 ? static_cast<size_t>(delay.lag) : 0;
  const size_t ref_avail = reference.frames() > ref_skip ? reference.frames() - ref_skip : 0;
  const size_t sut_avail = sut.frames() > sut_skip ? sut.frames() - sut_skip : 0;
  const size_t length = std::min(ref_avail, sut_avail);

  AudioPair pair;
  pair.sample_rate = kCanonicalSampleRate;
  pair.estimated_delay = delay.lag;
  pair.alignment_confidence = delay.confidence;
  for (size_t c = 0; c < reference.channels.size(); ++c) {
    const auto& r = reference.channels[c];
    const auto& s = sut.channels[c];
    pair.reference.emplace_back(r.begin() + static_cast<std::ptrdiff_t>(ref_skip),
                                r.begin() + static_cast<std::ptrdiff_t>(ref_skip + length));
    pair.sut.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(sut_skip),
                          s.begin() + static_cast<std::ptrdiff_t>(sut_skip + length));
  }
  return pair;
}

AudioPair LoadPair(const std::filesystem::path& reference_path,
                   const std::filesystem::path& sut_path,
                   const IngestOptions& options) {
  return MakePair(ReadWav(reference_path), ReadWav(sut_path), options);
}

SegmentPlan Segment(const AudioPair& pair, const SegmentOptions& options) {
  if (!(options.segment_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidParameters, "segment length must be positive");
  }
  SegmentPlan plan;
  plan.segment_length = options.segment_seconds;
  plan.hop = options.segment_seconds;
  plan.tail_policy = options.tail_policy;
  plan.segment_samples = static_cast<size_t>(
      std::llround(options.segment_seconds * pair.sample_rate));
  const size_t frames = pair.frames();
  if (frames < plan.segment_samples) {
    throw Error(ErrorCode::kTooShort,
                "pair lasts " + std::to_string(pair.duration()) +
                    " s, shorter than one " +
                    std::to_string(options.segment_seconds) + " s segment");
  }
  plan.segment_count = frames / plan.segment_samples;
  if (options.tail_policy == TailPolicy::kPadZero &&
      frames % plan.segment_samples != 0) {
    ++plan.segment_count;
  }
  return plan;
}

AudioPair FitToPlan(const AudioPair& pair, const SegmentPlan& plan) {
  AudioPair fitted = pair;
  const size_t length = plan.covered_samples();
  for (auto& channel : fitted.reference) channel.resize(length, 0.0f);
  for (auto& channel : fitted.sut) channel.resize(length, 0.0f);
  return fitted;
}

TailPolicy ParseTailPolicy(const std::string& text) {
  if (text == "drop") return TailPolicy::kDrop;
  if (text == "pad" || text == "pad_zero") return TailPolicy::kPadZero;
  throw Error(ErrorCode::kUsage, "unknown tail policy '" + text + "'");
}

}  // namespace csm
