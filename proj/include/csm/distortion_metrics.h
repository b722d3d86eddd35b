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

#ifndef CSM_DISTORTION_METRICS_H_
#define CSM_DISTORTION_METRICS_H_

#include <array>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "csm/audio_pair.h"
#include "csm/ear_model.h"

namespace csm {

inline constexpr size_t kDmCount = 6;

enum class Dm : size_t {
  kLinDist = 0,
  kModDiff,
  kNoiseLoudness,
  kMissingComponents,
  kEhs,
  kSegNmr,
};

inline constexpr std::array<std::string_view, kDmCount> kDmNames = {
    "lin_dist", "mod_diff", "noise_loudness", "missing_components", "ehs",
    "seg_nmr"};

// Returns kDmCount for unknown names.
size_t DmIndex(std::string_view name);

struct DmValues {
  double lin_dist = 0.0;
  double mod_diff = 0.0;
  double noise_loudness = 0.0;
  double missing_components = 0.0;
  double ehs = 0.0;
  double seg_nmr = 0.0;

  double operator[](size_t i) const;
  double& operator[](size_t i);
  double operator[](Dm dm) const { return (*this)[static_cast<size_t>(dm)]; }
  bool operator==(const DmValues&) const = default;
};

struct DmRecord : DmValues {
  std::vector<DmValues> per_segment;
  bool operator==(const DmRecord&) const = default;
};

// Frame index ranges [first, last) per segment, by frame centre time.
// Frames past the last segment are dropped.
std::vector<std::pair<size_t, size_t>> AssignFrames(
    std::span<const FramePair> frames, const SegmentPlan& plan);

// Excerpt value from per-segment values: arithmetic mean for lin_dist,
// noise_loudness, missing_components and ehs; root mean square for mod_diff;
// seg_nmr is the dB value of the root mean square of the linear per-segment
// ratios.
DmValues TimeAverage(std::span<const DmValues> segments);

DmRecord ComputeDm(std::span<const FramePair> frames, const SegmentPlan& plan,
                   const EarModel& model);

// Stereo: per-segment element-wise mean over channels; the excerpt value is
// then re-derived with TimeAverage.
DmRecord AverageChannels(std::span<const DmRecord> channels);

// Header row plus one tab-separated row per segment.
void WriteSegmentDump(std::ostream& out, const DmRecord& record);

}  // namespace csm

#endif  // CSM_DISTORTION_METRICS_H_
