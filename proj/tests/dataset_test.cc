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

#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include "criteria.h"
#include "csm/experiment.h"
#include "csm/fft.h"
#include "csm/manifest.h"
#include "csm/synthesis.h"
#include "csm/wav.h"
#include "test_util.h"

namespace csm {
namespace {

using testing::ScratchDir;

constexpr int kRate = kCanonicalSampleRate;

std::vector<float> Noise(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 0.1f);
  std::vector<float> x(n);
  for (float& v : x) v = g(rng);
  return x;
}

double Power(const std::vector<float>& x) {
  double p = 0.0;
  for (float v : x) p += static_cast<double>(v) * v;
  return p / static_cast<double>(x.size());
}

// Power in [lo_hz, rate/2] from one whole-signal transform.
double BandPower(const std::vector<float>& x, double lo_hz) {
  RealFft fft(x.size());
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(fft.bins());
  fft.Forward(in, out);
  double p = 0.0;
  for (size_t k = 0; k < out.size(); ++k) {
    if (k * static_cast<double>(kRate) / x.size() >= lo_hz) p += std::norm(out[k]);
  }
  return p;
}

std::string ManifestJson(const std::string& conditions) {
  return R"({"schema_version": 1,
    "signals": [{"id": "A", "reference": "a.wav"}, {"id": "B", "reference": "b.wav"}],
    "treatments": [{"id": "T1", "description": "noise", "degradation": {"snr_db": 20}},
                   {"id": "T2", "description": "clean", "degradation": null}],
    "conditions": [)" + conditions + "]}";
}

std::string Row(const std::string& s, const std::string& t, double mos) {
  return R"({"signal": ")" + s + R"(", "treatment": ")" + t + R"(", "sut": "sut.wav", "mos": )" +
         std::to_string(mos) + R"(, "ci95": 3.5})";
}

class Manifest : public ::testing::Test {
 protected:
  void SetUp() override {
    const WavData w{kRate, {Noise(kRate / 10, 1)}};
    for (const char* name : {"a.wav", "b.wav", "sut.wav"}) WriteWav(dir_ / name, w);
  }
  std::filesystem::path Write(const std::string& text) {
    const auto p = dir_ / "manifest.json";
    std::ofstream(p) << text;
    return p;
  }
  ScratchDir dir_{"manifest"};
};

TEST_F(Manifest, WellFormed) {
  const auto path = Write(ManifestJson(Row("A", "T1", 40) + "," + Row("A", "T2", 90) + "," +
                                       Row("B", "T1", 35) + "," + Row("B", "T2", 95)));
  const DatasetManifest m = LoadManifest(path);
  EXPECT_EQ(m.conditions.size(), 4u);
  ASSERT_TRUE(m.treatments[0].degradation.has_value());
  EXPECT_EQ(m.treatments[0].degradation->snr_db, 20.0);
  EXPECT_FALSE(m.treatments[1].degradation.has_value());
  EXPECT_EQ(m.Resolve(m.signal("B").reference), dir_ / "b.wav");
}

TEST_F(Manifest, DuplicateCondition) {
  const auto path = Write(ManifestJson(Row("A", "T1", 40) + "," + Row("A", "T1", 45)));
  try {
    LoadManifest(path);
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateCondition);
    EXPECT_NE(std::string(e.what()).find("(A, T1)"), std::string::npos) << e.what();
  }
}

TEST_F(Manifest, MosOutOfRange) {
  const auto path = Write(ManifestJson(Row("A", "T1", 40) + "," + Row("B", "T1", 101)));
  try {
    LoadManifest(path);
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST_F(Manifest, MissingPiecesRaise) {
  EXPECT_CSM_ERROR(LoadManifest(dir_ / "absent.json"), ErrorCode::kMissingFile);
  EXPECT_CSM_ERROR(LoadManifest(Write("{not json")), ErrorCode::kSchemaError);
  EXPECT_CSM_ERROR(LoadManifest(Write(ManifestJson(Row("C", "T1", 40)))), ErrorCode::kSchemaError);
  std::filesystem::remove(dir_ / "sut.wav");
  EXPECT_CSM_ERROR(LoadManifest(Write(ManifestJson(Row("A", "T1", 40)))), ErrorCode::kMissingFile);
}

TEST_F(Manifest, RoundTrip) {
  const DatasetManifest m = LoadManifest(Write(ManifestJson(Row("A", "T1", 40) + "," + Row("B", "T2", 72.25))));
  const auto copy = dir_ / "copy.json";
  WriteManifest(copy, m);
  EXPECT_EQ(LoadManifest(copy), m);
}

TEST(Treatment, IdentityIsBitExact) {
  const auto x = Noise(kRate, 2);
  EXPECT_EQ(ApplyTreatment(x, kRate, Degradation{}, 5), x);
}

TEST(Treatment, NoiseHitsRequestedSnr) {
  const auto x = testing::HarmonicComplex(2.0, kRate);
  for (double snr : {35.0, 20.0, 10.0}) {
    Degradation d;
    d.snr_db = snr;
    const auto y = ApplyTreatment(x, kRate, d, 9);
    std::vector<float> diff(x.size());
    for (size_t i = 0; i < x.size(); ++i) diff[i] = y[i] - x[i];
    EXPECT_NEAR(10 * std::log10(Power(x) / Power(diff)), snr, 0.5);
  }
}

TEST(Treatment, LowpassStopband) {
  const auto x = Noise(kRate, 3);
  Degradation d;
  d.lowpass_hz = 6000.0;
  const auto y = ApplyTreatment(x, kRate, d, 1);
  EXPECT_GE(10 * std::log10(BandPower(x, 7000.0) / BandPower(y, 7000.0)), 40.0);
  // Passband stays near unity.
  std::vector<float> tone(kRate);
  for (size_t i = 0; i < tone.size(); ++i) {
    tone[i] = static_cast<float>(0.3 * std::sin(2 * M_PI * 1000.0 * i / kRate) +
                                 0.2 * std::sin(2 * M_PI * 5000.0 * i / kRate));
  }
  const auto passed = Lowpass(tone, kRate, 12000.0);
  EXPECT_NEAR(10 * std::log10(Power(passed) / Power(tone)), 0.0, 0.5);
}

TEST(Treatment, Deterministic) {
  const auto x = Noise(kRate, 4);
  Degradation d;
  d.snr_db = 15;
  d.mod_depth = 0.4;
  EXPECT_EQ(ApplyTreatment(x, kRate, d, 11), ApplyTreatment(x, kRate, d, 11));
  EXPECT_NE(ApplyTreatment(x, kRate, d, 11), ApplyTreatment(x, kRate, d, 12));
}

TEST(Treatment, InvalidParameters) {
  const auto x = Noise(1000, 5);
  Degradation d;
  d.lowpass_hz = 30000.0;
  EXPECT_CSM_ERROR(ApplyTreatment(x, kRate, d, 1), ErrorCode::kInvalidParameters);
  d = {};
  d.snr_db = INFINITY;
  EXPECT_CSM_ERROR(ApplyTreatment(x, kRate, d, 1), ErrorCode::kInvalidParameters);
  d = {};
  d.mod_depth = 1.5;
  EXPECT_CSM_ERROR(ApplyTreatment(x, kRate, d, 1), ErrorCode::kInvalidParameters);
}

TEST(LatentModel, BoundedAndNonIncreasingInSeverity) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (bool dependent : {true, false}) {
    LatentModel model;
    model.class_dependent = dependent;
    for (int t = 0; t < 2000; ++t) {
      Degradation d;
      if (u(rng) < 0.7) d.snr_db = 5 + 40 * u(rng);
      if (u(rng) < 0.7) d.lowpass_hz = 2000 + 18000 * u(rng);
      d.mod_depth = u(rng) < 0.5 ? 0.8 * u(rng) : 0.0;
      const double mix = u(rng), nj = 0.8 + 0.4 * u(rng), lj = 0.8 + 0.4 * u(rng);
      const double q = LatentQuality(d, mix, model, nj, lj);
      ASSERT_GE(q, 0.0);
      ASSERT_LE(q, 100.0);
      Degradation worse = d;
      switch (t % 3) {
        case 0: worse.snr_db = d.snr_db ? *d.snr_db - 3 * u(rng) : 40.0; break;
        case 1: worse.lowpass_hz = d.lowpass_hz ? *d.lowpass_hz * (1 - 0.3 * u(rng)) : 15000.0; break;
        default: worse.mod_depth = std::min(1.0, d.mod_depth + 0.2 * u(rng)); break;
      }
      EXPECT_LE(LatentQuality(worse, mix, model, nj, lj), q + 1e-12);
    }
  }
}

TEST(LatentModel, ClassIndependentIgnoresSpeechShare) {
  LatentModel model;
  model.class_dependent = false;
  Degradation d;
  d.snr_db = 20;
  d.lowpass_hz = 6000;
  EXPECT_DOUBLE_EQ(LatentQuality(d, 0.0, model), LatentQuality(d, 1.0, model));
  model.class_dependent = true;
  Degradation noise;
  noise.snr_db = 20;
  Degradation lowpass;
  lowpass.lowpass_hz = 5000;
  // Noise hurts speech more, band limitation hurts music more.
  EXPECT_LT(LatentQuality(noise, 1.0, model), LatentQuality(noise, 0.0, model));
  EXPECT_LT(LatentQuality(lowpass, 0.0, model), LatentQuality(lowpass, 1.0, model));
}

TEST(Synthesize, DefaultShape) {
  SyntheticSpec spec;
  spec.duration_s = 2.0;
  const SyntheticDataset data = Synthesize(spec);
  EXPECT_EQ(data.signals.size(), 24u);
  EXPECT_EQ(data.treatments.size(), 7u);
  EXPECT_EQ(data.conditions.size(), 168u);
  for (const SyntheticCondition& c : data.conditions) {
    EXPECT_GE(c.mos, 0.0);
    EXPECT_LE(c.mos, 100.0);
    EXPECT_GT(c.ci95, 0.0);
    EXPECT_EQ(c.sut.size(), data.signals[c.signal].reference.size());
  }
  size_t speech = 0, music = 0;
  for (const auto& s : data.signals) {
    speech += s.kind == "speech";
    music += s.kind == "music";
  }
  EXPECT_EQ(speech, 8u);
  EXPECT_EQ(music, 8u);
}

TEST(Synthesize, Errors) {
  SyntheticSpec spec;
  spec.signal_count = 7;
  EXPECT_CSM_ERROR(Synthesize(spec), ErrorCode::kInvalidSpec);
  spec.signal_count = 8;
  spec.treatments.assign(3, Degradation{});
  EXPECT_CSM_ERROR(Synthesize(spec), ErrorCode::kInvalidSpec);
  spec.treatments.clear();
  spec.duration_s = 1.0;
  EXPECT_CSM_ERROR(Synthesize(spec), ErrorCode::kInvalidSpec);
}

TEST(Synthesize, RelabelingKeepsAudio) {
  SyntheticSpec spec;
  spec.signal_count = 8;
  spec.duration_s = 2.0;
  SyntheticDataset data = Synthesize(spec);
  const auto before = data.conditions;
  LatentModel flat;
  flat.class_dependent = false;
  AssignRatings(data, flat);
  bool changed = false;
  for (size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(data.conditions[i].sut, before[i].sut);
    changed |= data.conditions[i].mos != before[i].mos;
  }
  EXPECT_TRUE(changed);
  EXPECT_FALSE(data.spec.latent.class_dependent);
}

TEST(GenerateSynthetic, BitIdenticalRuns) {
  ScratchDir a("synth_a"), b("synth_b");
  SyntheticSpec spec;
  spec.signal_count = 8;
  spec.treatments = {Degradation{}, {.snr_db = 20.0}, {.lowpass_hz = 5000.0}, {.mod_depth = 0.3}};
  spec.duration_s = 2.0;
  const DatasetManifest ma = GenerateSynthetic(spec, a.path());
  const DatasetManifest mb = GenerateSynthetic(spec, b.path());
  EXPECT_EQ(ma.conditions.size(), 32u);
  auto bytes = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(bytes(a / "manifest.json"), bytes(b / "manifest.json"));
  for (const ConditionEntry& c : ma.conditions) {
    EXPECT_EQ(bytes(ma.Resolve(c.sut)), bytes(mb.Resolve(c.sut)));
  }
  for (const SignalEntry& s : ma.signals) {
    EXPECT_EQ(bytes(ma.Resolve(s.reference)), bytes(mb.Resolve(s.reference)));
  }
  EXPECT_EQ(LoadManifest(a / "manifest.json"), ma);
}

TEST(MixSeed, DistinctStreams) {
  EXPECT_NE(MixSeed(1, "train", 0), MixSeed(1, "validate", 0));
  EXPECT_NE(MixSeed(1, "train", 0), MixSeed(1, "train", 1));
  EXPECT_EQ(MixSeed(3, "x", 4, 5), MixSeed(3, "x", 4, 5));
  EXPECT_EQ(TreatmentId(0), "T01");
}

}  // namespace
}  // namespace csm
