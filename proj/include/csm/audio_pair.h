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

#ifndef CSM_AUDIO_PAIR_H_
#define CSM_AUDIO_PAIR_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "csm/wav.h"

namespace csm {

inline constexpr int kCanonicalSampleRate = 48000;

// Reference and signal under test, aligned, deinterleaved, equal length.
struct AudioPair {
  std::vector<std::vector<float>> reference;
  std::vector<std::vector<float>> sut;
  int sample_rate = kCanonicalSampleRate;
  // Samples by which the original sut lagged the reference (negative when it
  // led). Already compensated in the buffers above.
  int64_t estimated_delay = 0;
  double alignment_confidence = 1.0;

  int channels() const { return static_cast<int>(reference.size()); }
  size_t frames() const { return reference.empty() ? 0 : reference[0].size(); }
  double duration() const {
    return static_cast<double>(frames()) / sample_rate;
  }
};

struct IngestOptions {
  bool resample = false;
  double max_delay_ms = 250.0;
  // Normalized cross-correlation peak below this is an AlignmentFailure.
  double confidence_floor = 0.3;
};

struct DelayEstimate {
  int64_t lag = 0;  // sut[n] ~ reference[n - lag]
  double confidence = 1.0;
  // False when either signal is digital silence; lag is then 0.
  bool defined = true;
};

// Global delay from the normalized cross-correlation peak of the channel
// sums, searched over |lag| <= max_lag.
DelayEstimate EstimateDelay(std::span<const float> reference,
                            std::span<const float> sut, int64_t max_lag);

// Validates, resamples (if enabled), aligns and truncates to the common
// length. Gain is left untouched.
AudioPair MakePair(WavData reference, WavData sut, const IngestOptions& options);

AudioPair LoadPair(const std::filesystem::path& reference_path,
                   const std::filesystem::path& sut_path,
                   const IngestOptions& options);

enum class TailPolicy { kDrop, kPadZero };

struct SegmentOptions {
  double segment_seconds = 2.0;
  TailPolicy tail_policy = TailPolicy::kDrop;
};

// Non-overlapping segments shared by reference and sut.
struct SegmentPlan {
  double segment_length = 2.0;
  double hop = 2.0;
  size_t segment_samples = 0;
  size_t segment_count = 0;
  TailPolicy tail_policy = TailPolicy::kDrop;

  size_t begin(size_t segment) const { return segment * segment_samples; }
  size_t end(size_t segment) const { return (segment + 1) * segment_samples; }
  size_t covered_samples() const { return segment_count * segment_samples; }
};

SegmentPlan Segment(const AudioPair& pair, const SegmentOptions& options);

// Returns a copy of `pair` truncated (drop) or zero-padded (pad) so that its
// length equals plan.covered_samples().
AudioPair FitToPlan(const AudioPair& pair, const SegmentPlan& plan);

TailPolicy ParseTailPolicy(const std::string& text);

}  // namespace csm

#endif  // CSM_AUDIO_PAIR_H_
