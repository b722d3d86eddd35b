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
#include <random>
#include <vector>

#include "criteria.h"
#include "csm/salience.h"
#include "test_util.h"

namespace csm {
namespace {

SalienceVector Vec(const std::vector<double>& v) {
  SalienceVector s;
  s.dm_name = "lin_dist";
  for (size_t j = 0; j < v.size(); ++j) {
    s.signals.push_back("S" + std::to_string(j));
    s.values.emplace_back(v[j]);
  }
  return s;
}

TEST(Salience, Examples) {
  const std::vector<double> mos = {80, 60, 40, 20};
  EXPECT_DOUBLE_EQ(Salience(mos, mos), 1.0);
  EXPECT_DOUBLE_EQ(Salience(mos, std::vector<double>{20, 40, 60, 80}), -1.0);
  const std::vector<double> bf = {75, 65, 35, 30};
  EXPECT_NEAR(Salience(mos, bf), testing::ReferencePearson(mos, bf), 1e-12);
  EXPECT_CSM_ERROR(Salience(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                   ErrorCode::kInsufficientData);
}

TEST(Salience, AcceptanceOracle) {
  const testing::Criterion c = testing::PearsonOracleCriterion();
  EXPECT_TRUE(c.passed()) << c.Summary();
}

TEST(InteractionCost, AffineWeightsGiveOne) {
  const std::vector<double> s = {0.2, -0.4, 0.9, 0.1, 0.5};
  std::vector<double> w;
  for (double v : s) w.push_back(0.3 * v + 0.4);
  EXPECT_NEAR(InteractionCost(Vec(s), w), 1.0, 1e-15);
  for (double& v : w) v = -v;
  EXPECT_NEAR(InteractionCost(Vec(s), w), -1.0, 1e-15);
}

TEST(InteractionCost, SkipsUndefinedSalience) {
  SalienceVector s = Vec({0.1, 0.5, 0.9, 0.3});
  s.values[1].reset();
  EXPECT_EQ(s.defined_count(), 3u);
  EXPECT_NEAR(InteractionCost(s, std::vector<double>{1, 100, 9, 3}), 1.0, 1e-12);
}

TEST(InteractionCost, FixtureValues) {
  const testing::Criterion c = testing::FixtureCriterion();
  EXPECT_TRUE(c.passed()) << c.Summary();
}

TEST(Dpw, Properties) {
  const testing::Criterion c = testing::DpwCriterion();
  EXPECT_TRUE(c.passed()) << c.Summary();
  EXPECT_NEAR(Dpw(0.7, {10.0, 0.5, false}), 0.8808, 5e-5);
  EXPECT_NEAR(Dpw(0.7, {10.0, 0.5, true}), 1.0 - 0.8808, 5e-5);
}

TEST(OptimizeDpw, AcceptanceGrid) {
  const testing::Criterion c = testing::GridSearchCriterion();
  EXPECT_TRUE(c.passed()) << c.Summary();
}

TEST(OptimizeDpw, NeverMuchWorseThanRaw) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> s(12), cem(12);
    for (size_t j = 0; j < 12; ++j) {
      cem[j] = u(rng);
      s[j] = cem[j] + 0.5 * u(rng);
    }
    const DpwSearchResult r = OptimizeDpw(Vec(s), cem, DefaultGrid());
    ASSERT_TRUE(r.c_raw.has_value());
    EXPECT_GE(std::abs(r.c_opt), std::abs(*r.c_raw) - 0.02);
    EXPECT_LE(r.evaluated, DefaultGrid().size());
  }
}

TEST(OptimizeDpw, Errors) {
  const SearchGrid empty{{}, {0.5}, true};
  EXPECT_CSM_ERROR(OptimizeDpw(Vec({0.1, 0.2, 0.3}), std::vector<double>{0.1, 0.5, 0.9}, empty),
                   ErrorCode::kDegenerateGrid);
  EXPECT_CSM_ERROR(OptimizeDpw(Vec({0.3, 0.3, 0.3}), std::vector<double>{0.1, 0.5, 0.9}, DefaultGrid()),
                   ErrorCode::kAllUndefined);
  EXPECT_CSM_ERROR(OptimizeDpw(Vec({0.1, 0.2, 0.3}), std::vector<double>{0.1, 0.5}, DefaultGrid()),
                   ErrorCode::kLengthMismatch);
}

TEST(OptimizeDpw, TieBreakPrefersSmallSteepnessThenMidpointThenPlain) {
  // Two signals on either side of every midpoint collapse every candidate
  // to the same |C|.
  const std::vector<double> cem = {0.0, 0.0, 1.0, 1.0};
  const SearchGrid grid{{1.0, 2.0}, {0.25, 0.75}, true};
  const DpwSearchResult r = OptimizeDpw(Vec({0.1, 0.2, 0.8, 0.9}), cem, grid);
  EXPECT_EQ(r.params, (LogisticParams{1.0, 0.25, false}));
}

TEST(OptimizeProduct, FindsJointOptimum) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> a(20), b(20), s(20);
  for (size_t j = 0; j < 20; ++j) {
    a[j] = u(rng);
    b[j] = u(rng);
    s[j] = Logistic(a[j], 10, 0.5) * (1 - Logistic(b[j], 10, 0.5));
  }
  const SearchGrid grid = CoarseGrid(21, 21);
  const ProductSearchResult r = OptimizeProduct(Vec(s), {a, b}, {false, true}, grid);
  ASSERT_EQ(r.params.size(), 2u);
  EXPECT_GT(r.c_opt, 0.99);
  EXPECT_FALSE(r.params[0].inverted);
  EXPECT_TRUE(r.params[1].inverted);
  EXPECT_CSM_ERROR(OptimizeProduct(Vec(s), {a, b}, {false}, grid), ErrorCode::kInvalidParameters);
}

TEST(Grids, Shapes) {
  const SearchGrid g = DefaultGrid();
  EXPECT_EQ(g.steepness.size(), 61u);
  EXPECT_EQ(g.midpoint.size(), 101u);
  EXPECT_EQ(g.size(), 12322u);
  EXPECT_DOUBLE_EQ(g.steepness.front(), 0.5);
  EXPECT_DOUBLE_EQ(g.steepness.back(), 200.0);
  EXPECT_DOUBLE_EQ(g.midpoint.back(), 1.0);
  EXPECT_NEAR(g.steepness[1] / g.steepness[0], g.steepness[60] / g.steepness[59], 1e-12);
}

TEST(Fixture, RejectsMalformedRows) {
  testing::ScratchDir dir("fixture");
  const auto path = dir / "f.tsv";
  std::FILE* f = std::fopen(path.c_str(), "w");
  std::fputs("signal\tsalience\tcem\tdpw\nS1\t0.5\tx\t0.1\n", f);
  std::fclose(f);
  EXPECT_CSM_ERROR(LoadInteractionFixture(path), ErrorCode::kSchemaError);
  EXPECT_CSM_ERROR(LoadInteractionFixture(dir / "none.tsv"), ErrorCode::kUnreadableFile);
}

}  // namespace
}  // namespace csm
