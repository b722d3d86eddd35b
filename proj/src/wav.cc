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

#include "csm/wav.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "csm/error.h"

namespace csm {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

struct Header {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
  std::streampos data_offset = 0;
  uint32_t data_size = 0;
};

uint32_t ReadU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

[[noreturn]] void Fail(const std::filesystem::path& path,
                       const std::string& why) {
  throw Error(ErrorCode::kUnreadableFile, path.string() + ": " + why);
}

Header ParseHeader(std::ifstream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 12> riff{};
  if (!in.read(reinterpret_cast<char*>(riff.data()), riff.size()) ||
      std::memcmp(riff.data(), "RIFF", 4) != 0 ||
      std::memcmp(riff.data() + 8, "WAVE", 4) != 0) {
    Fail(path, "not a RIFF/WAVE file");
  }
  Header header;
  bool have_format = false;
  while (true) {
    std::array<unsigned char, 8> chunk{};
    if (!in.read(reinterpret_cast<char*>(chunk.data()), chunk.size())) {
      Fail(path, "missing data chunk");
    }
    const uint32_t size = ReadU32(chunk.data() + 4);
    if (std::memcmp(chunk.data(), "fmt ", 4) == 0) {
      if (size < 16) Fail(path, "short fmt chunk");
      std::vector<unsigned char> body(size);
      if (!in.read(reinterpret_cast<char*>(body.data()), size)) {
        Fail(path, "truncated fmt chunk");
      }
      header.format = ReadU16(body.data());
      header.channels = ReadU16(body.data() + 2);
      header.sample_rate = ReadU32(body.data() + 4);
      header.bits = ReadU16(body.data() + 14);
      if (header.format == kFormatExtensible) {
        if (size < 26) Fail(path, "short extensible fmt chunk");
        header.format = ReadU16(body.data() + 24);
      }
      have_format = true;
    } else if (std::memcmp(chunk.data(), "data", 4) == 0) {
      if (!have_format) Fail(path, "data chunk before fmt chunk");
      header.data_offset = in.tellg();
      header.data_size = size;
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
    if (size & 1 && std::memcmp(chunk.data(), "fmt ", 4) == 0) {
      in.seekg(1, std::ios::cur);
    }
  }
  const bool pcm_ok = header.format == kFormatPcm &&
                      (header.bits == 16 || header.bits == 24);
  const bool float_ok = header.format == kFormatFloat && header.bits == 32;
  if (!pcm_ok && !float_ok) {
    Fail(path, "unsupported sample format (format " +
                   std::to_string(header.format) + ", " +
                   std::to_string(header.bits) + " bits)");
  }
  if (header.channels == 0 || header.sample_rate == 0) {
    Fail(path, "invalid channel count or sample rate");
  }
  return header;
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace

void ProbeWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(path, "cannot open");
  ParseHeader(in, path);
}

WavData ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(path, "cannot open");
  const Header header = ParseHeader(in, path);
  const size_t bytes_per_sample = header.bits / 8;
  const size_t frame_bytes = bytes_per_sample * header.channels;
  // Some writers leave the size field at 0 or 0xFFFFFFFF for streamed files.
  in.seekg(0, std::ios::end);
  const auto available = static_cast<size_t>(in.tellg() - header.data_offset);
  size_t data_size = header.data_size;
  if (data_size == 0 || data_size > available) data_size = available;
  const size_t frames = data_size / frame_bytes;

  std::vector<unsigned char> raw(frames * frame_bytes);
  in.seekg(header.data_offset);
  if (!in.read(reinterpret_cast<char*>(raw.data()), raw.size())) {
    Fail(path, "truncated sample data");
  }

  WavData data;
  data.sample_rate = static_cast<int>(header.sample_rate);
  data.channels.assign(header.channels, std::vector<float>(frames));
  for (size_t f = 0; f < frames; ++f) {
    for (size_t c = 0; c < header.channels; ++c) {
      const unsigned char* p = raw.data() + f * frame_bytes + c * bytes_per_sample;
      float value = 0.0f;
      if (header.format == kFormatFloat) {
        uint32_t bits = ReadU32(p);
        std::memcpy(&value, &bits, sizeof(value));
      } else if (header.bits == 16) {
        value = static_cast<float>(static_cast<int16_t>(ReadU16(p))) / 32768.0f;
      } else {
        int32_t v = static_cast<int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) v -= 0x1000000;
        value = static_cast<float>(v) / 8388608.0f;
      }
      data.channels[c][f] = value;
    }
  }
  return data;
}

void WriteWav(const std::filesystem::path& path, const WavData& data,
              SampleFormat format) {
  const uint16_t channels = static_cast<uint16_t>(data.channels.size());
  const size_t frames = data.frames();
  const uint16_t bits = format == SampleFormat::kPcm16   ? 16
                        : format == SampleFormat::kPcm24 ? 24
                                                         : 32;
  const uint16_t bytes = bits / 8;
  const uint32_t data_size = static_cast<uint32_t>(frames * channels * bytes);

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  PutU32(out, 36 + data_size);
  out.append("WAVEfmt ");
  PutU32(out, 16);
  PutU16(out, format == SampleFormat::kFloat32 ? kFormatFloat : kFormatPcm);
  PutU16(out, channels);
  PutU32(out, static_cast<uint32_t>(data.sample_rate));
  PutU32(out, static_cast<uint32_t>(data.sample_rate) * channels * bytes);
  PutU16(out, static_cast<uint16_t>(channels * bytes));
  PutU16(out, bits);
  out.append("data");
  PutU32(out, data_size);
  for (size_t f = 0; f < frames; ++f) {
    for (size_t c = 0; c < channels; ++c) {
      const float v = data.channels[c][f];
      if (format == SampleFormat::kFloat32) {
        uint32_t word;
        std::memcpy(&word, &v, sizeof(word));
        PutU32(out, word);
        continue;
      }
      const double clamped = std::clamp(static_cast<double>(v), -1.0, 1.0);
      if (format == SampleFormat::kPcm16) {
        const long q = std::lround(clamped * 32767.0);
        PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
      } else {
        const long q = std::lround(clamped * 8388607.0);
        const uint32_t u = static_cast<uint32_t>(q) & 0xFFFFFF;
        out.push_back(static_cast<char>(u & 0xFF));
        out.push_back(static_cast<char>((u >> 8) & 0xFF));
        out.push_back(static_cast<char>((u >> 16) & 0xFF));
      }
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !file.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  }
}

}  // namespace csm
