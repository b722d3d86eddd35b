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

#ifndef CSM_WAV_H_
#define CSM_WAV_H_

#include <filesystem>
#include <vector>

namespace csm {

enum class SampleFormat { kPcm16, kPcm24, kFloat32 };

// Deinterleaved audio, samples nominally in [-1, 1].
struct WavData {
  int sample_rate = 48000;
  std::vector<std::vector<float>> channels;

  size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
  double duration() const {
    return static_cast<double>(frames()) / sample_rate;
  }
};

// Reads 16/24-bit integer or 32-bit float PCM WAV (plain or extensible
// header). Throws Error(kUnreadableFile) on anything else.
WavData ReadWav(const std::filesystem::path& path);

// Reads only the header; used for cheap existence/decodability checks.
void ProbeWav(const std::filesystem::path& path);

void WriteWav(const std::filesystem::path& path, const WavData& data,
              SampleFormat format = SampleFormat::kPcm16);

}  // namespace csm

#endif  // CSM_WAV_H_
