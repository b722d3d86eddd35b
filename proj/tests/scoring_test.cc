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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "criteria.h"
#include "csm/ear_model.h"
#include "csm/pipeline.h"
#include "csm/scoring.h"
#include "csm/synthesis.h"
#include "test_util.h"

namespace csm {
namespace {

BfSet ConstantBfs(double v) {
  BfSet set;
  for (size_t m = 0; m < kDmCount; ++m) {
    set[m].dm_name = std::string(kDmNames[m]);
    set[m].intercept = v;
  }
  return set;
}

// Numeric toy corpus: lin_dist drives MOS for music-like signals, noise
// loudness for speech-like ones.
FeatureTable ToyTable(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> e(0, 1.5);
  FeatureTable table;
  for (int j = 0; j < 24; ++j) {
    const double ps = j / 23.0;
    for (int i = 0; i < 7; ++i) {
      FeatureRow r;
      r.signal = "S" + std::to_string(100 + j);
      r.treatment = "T0" + std::to_string(i + 1);
      r.dm.lin_dist = u(rng);
      r.dm.noise_loudness = u(rng);
      r.dm.mod_diff = u(rng);
      r.dm.missing_components = u(rng);
      r.dm.ehs = u(rng);
      r.dm.seg_nmr = -30 + 25 * u(rng);
      r.cem = {0.2 + 0.1 * u(rng), 0.5 + 0.1 * u(rng), ps};
      r.mos = std::clamp(90 - 60 * (1 - ps) * r.dm.lin_dist - 60 * ps * r.dm.noise_loudness + e(rng),
                         0.0, 100.0);
      r.ci95 = 3;
      table.push_back(r);
    }
  }
  return table;
}

TEST(Weights, EmptyTableIsUniform) {
  const Weights w = ComputeWeights({0.1, 0.9, 0.4}, InteractionTable{});
  for (double v : w.values) EXPECT_DOUBLE_EQ(v, 1.0 / 6.0);
  EXPECT_FALSE(w.uniform_fallback);
}

TEST(Weights, MidpointHandOracle) {
  // Every default entry sits at x0 = 0.5, so each factor contributes 0.5.
  const Weights w = ComputeWeights({0.5, 0.5, 0.5}, DefaultInteractionTable());
  const double raw[kDmCount] = {0.25, 1.0, 0.5, 0.5, 1.0, 0.25};
  for (size_t m = 0; m < kDmCount; ++m) EXPECT_NEAR(w.values[m], raw[m] / 3.5, 1e-15) << kDmNames[m];
}

TEST(Weights, CertainSpeechSuppressesLinDist) {
  InteractionTable t = DefaultInteractionTable();
  for (auto& e : t.entries) {
    for (auto& f : e.factors) f.params.steepness = 100.0;
  }
  const InteractionEntry& dpw1 = t.entries[0];
  const InteractionEntry& dpw2 = t.entries[1];
  const CemRecord speech{0.3, 0.3, 1.0};
  EXPECT_LT(EntryWeight(dpw1, speech, WeightMode::kOptimized), 1e-12);
  EXPECT_GT(EntryWeight(dpw2, speech, WeightMode::kOptimized), 1 - 1e-12);
  EXPECT_DOUBLE_EQ(EntryWeight(dpw1, {0.3, 0.3, 0.8}, WeightMode::kRaw), 1.0 - 0.8);
}

TEST(Weights, AllZeroFallsBackToUniform) {
  InteractionTable t;
  for (size_t m = 0; m < kDmCount; ++m) {
    t.entries.push_back({"W" + std::to_string(m), std::string(kDmNames[m]),
                         {{"prob_speech", {1.0, 0.5, false}}}, "", false, true, {}, ""});
  }
  const Weights w = ComputeWeights({0.2, 0.2, 0.0}, t, WeightMode::kRaw);
  EXPECT_TRUE(w.uniform_fallback);
  for (double v : w.values) EXPECT_DOUBLE_EQ(v, 1.0 / 6.0);
}

TEST(Score, AcceptanceProperties) {
  const testing::Criterion c = testing::ScoringCriterion();
  EXPECT_TRUE(c.passed()) << c.Summary();
}

TEST(Score, EqualBfOutputsGiveThatValue) {
  const QualityScore s = Score({}, {0.7, 0.1, 0.9}, ConstantBfs(63.25), DefaultInteractionTable());
  EXPECT_NEAR(s.value, 63.25, 1e-12);
  EXPECT_EQ(s.contributions[2].dm_name, "noise_loudness");
}

TEST(Score, MissingBfRaises) {
  BfSet bfs = ConstantBfs(50);
  bfs[4].dm_name.clear();
  EXPECT_CSM_ERROR(Score({}, {}, bfs, DefaultInteractionTable()), ErrorCode::kMissingBf);
}

TEST(Score, NonIncreasingInDmWithNonIncreasingBf) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    BfSet bfs;
    for (size_t m = 0; m < kDmCount; ++m) {
      bfs[m].dm_name = std::string(kDmNames[m]);
      bfs[m].intercept = 60 + 40 * u(rng);
      for (int k = 0; k < 3; ++k) {
        const int dir = u(rng) < 0.5 ? 1 : -1;
        bfs[m].terms.push_back({dir * -50 * u(rng), u(rng), dir});
      }
    }
    DmValues dm;
    for (size_t m = 0; m < kDmCount; ++m) dm[m] = u(rng);
    const CemRecord cem{u(rng), u(rng), u(rng)};
    const size_t m = t % kDmCount;
    const double before = Score(dm, cem, bfs, DefaultInteractionTable()).value;
    dm[m] += 0.3 * u(rng);
    EXPECT_LE(Score(dm, cem, bfs, DefaultInteractionTable()).value, before + 1e-12);
  }
}

TEST(InteractionTable, SerializationRoundTrip) {
  InteractionTable t = DefaultInteractionTable();
  t.entries[0].factors[0].c_raw = -0.77;
  t.entries[0].factors[0].c_opt = -0.92;
  t.entries[0].c_weight = 0.92;
  t.entries[3].accepted = false;
  t.entries[3].note = "weak";
  const std::string text = SerializeInteractionTable(t);
  EXPECT_EQ(ParseInteractionTable(text), t);
  EXPECT_EQ(SerializeInteractionTable(ParseInteractionTable(text)), text);
  EXPECT_CSM_ERROR(ParseInteractionTable("[]"), ErrorCode::kSchemaError);
}

TEST(InteractionTable, Validation) {
  InteractionTable t = DefaultInteractionTable();
  EXPECT_NO_THROW(ValidateInteractionTable(t));
  t.entries[0].dm_name = "loudness";
  EXPECT_CSM_ERROR(ValidateInteractionTable(t), ErrorCode::kInvalidSpec);
  t = DefaultInteractionTable();
  t.entries[2].tied_to = "DPW9";
  EXPECT_CSM_ERROR(ValidateInteractionTable(t), ErrorCode::kInvalidSpec);
  EXPECT_EQ(EquationText(DefaultInteractionTable().entries[0]), "DPW1 = 1 - prob_speech_th");
  EXPECT_EQ(EquationText(DefaultInteractionTable().entries[2]), "DPW3 = 1 - DPW2");
}

TEST(TrainInteractionTable, FindsClassDependentSalience) {
  const FeatureTable table = ToyTable(3);
  const BfSet bfs = FitBasisFunctions(table);
  const InteractionTable t = TrainInteractionTable(table, bfs, DefaultInteractionTable());
  const InteractionEntry& dpw1 = t.entries[0];
  const InteractionEntry& dpw2 = t.entries[1];
  ASSERT_TRUE(dpw1.factors[0].c_raw.has_value());
  EXPECT_LT(*dpw1.factors[0].c_raw, -0.5);
  EXPECT_TRUE(dpw1.accepted);
  EXPECT_GE(*dpw1.c_weight, 0.5);
  EXPECT_TRUE(dpw2.accepted);
  EXPECT_TRUE(dpw1.factors[0].params.inverted);
  // The tied entry mirrors its source.
  EXPECT_EQ(t.entries[2].factors[0].params.steepness, dpw2.factors[0].params.steepness);
  EXPECT_EQ(t.entries[2].factors[0].params.midpoint, dpw2.factors[0].params.midpoint);
  EXPECT_TRUE(t.entries[4].accepted);
  EXPECT_NE(InteractionReport(t).find("DPW5"), std::string::npos);
}

TEST(TrainInteractionTable, Deterministic) {
  const FeatureTable table = ToyTable(9);
  const BfSet bfs = FitBasisFunctions(table, {}, 3);
  EXPECT_EQ(bfs, FitBasisFunctions(table, {}, 1));
  EXPECT_EQ(TrainInteractionTable(table, bfs, DefaultInteractionTable()),
            TrainInteractionTable(table, bfs, DefaultInteractionTable()));
}

// Harmonic references through the real front end, MOS from the latent model.
class ToyPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const EarModel model;
    const AnalysisOptions options;
    std::vector<Degradation> treatments = DefaultTrainingTreatments();
    treatments.insert(treatments.begin(), Degradation{});
    int j = 0;
    for (double f0 : {110.0, 147.0, 196.0, 262.0, 330.0, 440.0}) {
      const auto ref = testing::HarmonicComplex(2.0, kCanonicalSampleRate, f0);
      for (size_t i = 0; i < treatments.size(); ++i) {
        AudioPair p;
        p.reference = {ref};
        p.sut = {ApplyTreatment(ref, kCanonicalSampleRate, treatments[i], 10 * j + i)};
        const PairAnalysis a = AnalyzePair(p, model, options);
        table_.push_back({"S" + std::to_string(j), TreatmentId(i), a.dm, a.cem,
                          LatentQuality(treatments[i], 0.5, LatentModel{}), 2.0});
      }
      ++j;
    }
    bfs_ = FitBasisFunctions(table_);
  }
  static QualityScore ScoreOf(const std::vector<float>& r, const std::vector<float>& s) {
    AudioPair p;
    p.reference = {r};
    p.sut = {s};
    const PairAnalysis a = AnalyzePair(p, EarModel(), AnalysisOptions());
    return Score(a.dm, a.cem, bfs_, DefaultInteractionTable());
  }
  static inline FeatureTable table_;
  static inline BfSet bfs_;
};

TEST_F(ToyPipeline, IdentityScoresHigh) {
  const auto ref = testing::HarmonicComplex(2.0, kCanonicalSampleRate, 150.0);
  EXPECT_GE(ScoreOf(ref, ref).value, 90.0);
}

TEST_F(ToyPipeline, MoreNoiseScoresLower) {
  const auto ref = testing::HarmonicComplex(2.0, kCanonicalSampleRate, 150.0);
  const double a = ScoreOf(ref, testing::AddWhiteNoise(ref, 30.0, 1)).value;
  const double b = ScoreOf(ref, testing::AddWhiteNoise(ref, 15.0, 1)).value;
  EXPECT_LT(b, a);
}

}  // namespace
}  // namespace csm
