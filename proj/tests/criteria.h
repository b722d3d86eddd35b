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

#ifndef CSM_TESTS_CRITERIA_H_
#define CSM_TESTS_CRITERIA_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace csm::testing {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::vector<Check> checks;
  bool passed() const;
  std::string Summary() const;
};

std::filesystem::path TestDataDir();

Criterion FixtureCriterion();
Criterion PearsonOracleCriterion();
Criterion DpwCriterion();
Criterion GridSearchCriterion();
Criterion MarsCriterion();
Criterion PerceptualCriterion();
Criterion AnnCriterion();
Criterion ScoringCriterion();

struct SyntheticRunOptions {
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int jobs = 1;
  bool verbose = false;
};
// Ordering of the three systems and the null control. Both need the same
// corpora, so they are computed together.
std::vector<Criterion> SyntheticCriteria(const SyntheticRunOptions& options);

// Textbook two-pass Pearson in long double, independent of the library.
double ReferencePearson(const std::vector<double>& a, const std::vector<double>& b);

// Broadband harmonic test signal with slow amplitude modulation.
std::vector<float> HarmonicComplex(double seconds, int rate, double f0 = 220.0,
                                   double rms = 0.1);
std::vector<float> AddWhiteNoise(const std::vector<float>& x, double snr_db, uint64_t seed);

}  // namespace csm::testing

#endif  // CSM_TESTS_CRITERIA_H_
