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

#include "csm/distortion_metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "csm/error.h"

namespace csm {
namespace {

// -60 dB.
constexpr double kMinLinearGain = 1e-6;

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Partial loudness of what `louder` adds on top of `masker`, summed over
// bands and scaled to a 24-band equivalent.
double PartialLoudness(std::span<const double> louder,
                       std::span<const double> masker, const EarModel& model) {
  double total = 0.0;
  for (size_t b = 0; b < louder.size(); ++b) {
    const double excess = std::max(louder[b] - masker[b], 0.0);
    if (excess == 0.0) continue;
    const double thr = model.excitation_threshold(b);
    const double s = 0.5;
    total += std::pow(thr / s, 0.23) *
             (std::pow(1.0 + excess / (thr + s * masker[b]), 0.23) - 1.0);
  }
  return total * 24.0 / static_cast<double>(louder.size());
}

// Per-band linear gain from the least-squares regression of sut on
// reference excitation over the segment's frames: the slope is the linear
// part, the intercept absorbs an additive floor. Bands whose reference is
// too steady for a slope fall back to the ratio of means.
double LinearDistortion(std::span<const FramePair> frames, size_t first,
                        size_t last, size_t nb) {
  const double count = static_cast<double>(last - first);
  std::vector<double> diff(nb);
  for (size_t b = 0; b < nb; ++b) {
    double mr = 0.0;
    double ms = 0.0;
    for (size_t t = first; t < last; ++t) {
      mr += frames[t].reference.excitation[b];
      ms += frames[t].sut.excitation[b];
    }
    mr /= count;
    ms /= count;
    double cov = 0.0;
    double var = 0.0;
    for (size_t t = first; t < last; ++t) {
      const double r = frames[t].reference.excitation[b] - mr;
      cov += r * (frames[t].sut.excitation[b] - ms);
      var += r * r;
    }
    const double steady = 1e-4 * mr * mr * count;
    const double gain = var > steady ? cov / var : ms / mr;
    diff[b] = 10.0 * std::log10(std::max(gain, kMinLinearGain));
  }
  // Level adaptation: the median band offset is treated as overall gain.
  const double level = Median(diff);
  double total = 0.0;
  for (double d : diff) total += std::abs(d - level);
  return total / static_cast<double>(nb);
}

}  // namespace

size_t DmIndex(std::string_view name) {
  for (size_t i = 0; i < kDmCount; ++i) {
    if (kDmNames[i] == name) return i;
  }
  // Aliases used in reports.
  if (name == "LinDist") return 0;
  if (name == "ModDiff") return 1;
  if (name == "NoiseLoudness") return 2;
  if (name == "MissingComponents") return 3;
  if (name == "EHS") return 4;
  if (name == "SegNMR" || name == "SegmentalNMR") return 5;
  return kDmCount;
}

double DmValues::operator[](size_t i) const {
  return const_cast<DmValues&>(*this)[i];
}

double& DmValues::operator[](size_t i) {
  switch (static_cast<Dm>(i)) {
    case Dm::kLinDist: return lin_dist;
    case Dm::kModDiff: return mod_diff;
    case Dm::kNoiseLoudness: return noise_loudness;
    case Dm::kMissingComponents: return missing_components;
    case Dm::kEhs: return ehs;
    case Dm::kSegNmr: return seg_nmr;
  }
  throw Error(ErrorCode::kInvalidParameters, "DM index out of range");
}

std::vector<std::pair<size_t, size_t>> AssignFrames(
    std::span<const FramePair> frames, const SegmentPlan& plan) {
  std::vector<std::pair<size_t, size_t>> ranges(plan.segment_count, {0, 0});
  size_t t = 0;
  for (size_t s = 0; s < plan.segment_count; ++s) {
    const double end =
        static_cast<double>(plan.end(s)) / kCanonicalSampleRate;
    ranges[s].first = t;
    while (t < frames.size() && frames[t].reference.frame_time < end) ++t;
    ranges[s].second = t;
  }
  return ranges;
}

DmValues TimeAverage(std::span<const DmValues> segments) {
  DmValues out;
  if (segments.empty()) return out;
  const double n = static_cast<double>(segments.size());
  double nmr_power = 0.0;
  for (const DmValues& s : segments) {
    out.lin_dist += s.lin_dist;
    out.noise_loudness += s.noise_loudness;
    out.missing_components += s.missing_components;
    out.ehs += s.ehs;
    out.mod_diff += s.mod_diff * s.mod_diff;
    const double ratio = std::pow(10.0, s.seg_nmr / 10.0);
    nmr_power += ratio * ratio;
  }
  out.lin_dist /= n;
  out.noise_loudness /= n;
  out.missing_components /= n;
  out.ehs /= n;
  out.mod_diff = std::sqrt(out.mod_diff / n);
  out.seg_nmr = 10.0 * std::log10(std::sqrt(nmr_power / n));
  return out;
}

DmRecord ComputeDm(std::span<const FramePair> frames, const SegmentPlan& plan,
                   const EarModel& model) {
  if (frames.empty()) {
    throw Error(ErrorCode::kEmptySegment, "no analysis frames");
  }
  const size_t nb = model.bands().size();
  const double nmr_floor = std::pow(10.0, model.config().nmr_floor_db / 10.0);
  std::vector<double> mask_factor(nb);
  for (size_t b = 0; b < nb; ++b) {
    mask_factor[b] = std::pow(10.0, -model.mask_offset_db(b) / 10.0);
  }

  DmRecord record;
  for (const auto& [first, last] : AssignFrames(frames, plan)) {
    if (first == last) {
      throw Error(ErrorCode::kEmptySegment,
                  "segment " + std::to_string(record.per_segment.size()) +
                      " contains no analysis frames");
    }
    DmValues seg;
    const double count = static_cast<double>(last - first);
    for (size_t t = first; t < last; ++t) {
      const FramePair& f = frames[t];
      double mod = 0.0;
      double nmr = 0.0;
      for (size_t b = 0; b < nb; ++b) {
        mod += std::abs(f.sut.modulation_bands[b] - f.reference.modulation_bands[b]);
        nmr += f.error_bands[b] / (f.reference.excitation[b] * mask_factor[b]);
      }
      seg.mod_diff += mod / static_cast<double>(nb);
      seg.noise_loudness += PartialLoudness(f.sut.excitation, f.reference.excitation, model);
      seg.missing_components +=
          PartialLoudness(f.reference.excitation, f.sut.excitation, model);
      seg.ehs += f.error_harmonicity;
      seg.seg_nmr += 10.0 * std::log10(std::max(nmr / static_cast<double>(nb), nmr_floor));
    }
    seg.mod_diff /= count;
    seg.noise_loudness /= count;
    seg.missing_components /= count;
    seg.ehs /= count;
    seg.seg_nmr /= count;
    seg.lin_dist = LinearDistortion(frames, first, last, nb);
    record.per_segment.push_back(seg);
  }
  static_cast<DmValues&>(record) = TimeAverage(record.per_segment);
  return record;
}

DmRecord AverageChannels(std::span<const DmRecord> channels) {
  if (channels.size() == 1) return channels[0];
  DmRecord out;
  const double n = static_cast<double>(channels.size());
  out.per_segment.resize(channels[0].per_segment.size());
  for (const DmRecord& channel : channels) {
    for (size_t s = 0; s < out.per_segment.size(); ++s) {
      for (size_t i = 0; i < kDmCount; ++i) {
        out.per_segment[s][i] += channel.per_segment[s][i] / n;
      }
    }
  }
  static_cast<DmValues&>(out) = TimeAverage(out.per_segment);
  return out;
}

void WriteSegmentDump(std::ostream& out, const DmRecord& record) {
  out << "segment";
  for (auto name : kDmNames) out << '\t' << name;
  out << '\n';
  char buf[32];
  for (size_t s = 0; s < record.per_segment.size(); ++s) {
    out << s;
    for (size_t i = 0; i < kDmCount; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", record.per_segment[s][i]);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

}  // namespace csm
