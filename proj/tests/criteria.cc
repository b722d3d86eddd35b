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

#include "criteria.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "csm/basis_function.h"
#include "csm/error.h"
#include "csm/evaluation.h"
#include "csm/experiment.h"
#include "csm/pipeline.h"
#include "csm/salience.h"
#include "csm/scoring.h"
#include "csm/stats.h"
#include "csm/synthesis.h"

namespace csm::testing {
namespace {

using Clock = std::chrono::steady_clock;

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

template <typename F>
std::optional<ErrorCode> CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

Check ExpectCode(std::string name, std::optional<ErrorCode> got, ErrorCode want) {
  Check c{std::move(name), got == want, ""};
  c.detail = got ? std::string(ErrorName(*got)) : std::string("no error");
  return c;
}

std::vector<double> Uniform(std::mt19937_64& rng, size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

SalienceVector MakeSalience(std::string dm, const std::vector<double>& values) {
  SalienceVector s;
  s.dm_name = std::move(dm);
  for (size_t j = 0; j < values.size(); ++j) {
    s.signals.push_back("S" + std::to_string(j));
    s.values.emplace_back(values[j]);
  }
  return s;
}

AudioPair MonoPair(const std::vector<float>& ref, const std::vector<float>& sut) {
  AudioPair p;
  p.reference = {ref};
  p.sut = {sut};
  return p;
}

double Hinge(double x, double knot, int dir) { return std::max(0.0, dir * (x - knot)); }

}  // namespace

bool Criterion::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string Criterion::Summary() const {
  std::string out;
  for (const Check& c : checks) {
    if (!out.empty()) out += "; ";
    out += c.name + (c.passed ? " ok" : " FAILED");
    if (!c.detail.empty()) out += " (" + c.detail + ")";
  }
  return out;
}

std::filesystem::path TestDataDir() { return CSM_TEST_DATA_DIR; }

double ReferencePearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  long double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < n; ++i) {
    const long double da = a[i] - ma;
    const long double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

std::vector<float> HarmonicComplex(double seconds, int rate, double f0, double rms) {
  const size_t n = static_cast<size_t>(seconds * rate);
  std::vector<double> x(n, 0.0);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (int h = 1; h * f0 < 0.45 * rate; ++h) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(h));
    const double phase = 0.7 * h * h;
    for (size_t i = 0; i < n; ++i) x[i] += amp * std::sin(kTwoPi * h * f0 * i / rate + phase);
  }
  double power = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x[i] *= 1.0 + 0.3 * std::sin(kTwoPi * 3.0 * i / rate);
    power += x[i] * x[i];
  }
  const double g = rms / std::sqrt(power / n);
  std::vector<float> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = static_cast<float>(g * x[i]);
  return out;
}

std::vector<float> AddWhiteNoise(const std::vector<float>& x, double snr_db, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> noise(x.size());
  double pn = 0.0, px = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    noise[i] = g(rng);
    pn += noise[i] * noise[i];
    px += static_cast<double>(x[i]) * x[i];
  }
  const double scale = std::sqrt(px / pn * std::pow(10.0, -snr_db / 10.0));
  std::vector<float> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = static_cast<float>(x[i] + scale * noise[i]);
  return out;
}

Criterion FixtureCriterion() {
  Criterion cr{"fixture reproduction", {}};
  const auto t0 = Clock::now();
  const InteractionFixture fx = LoadInteractionFixture(TestDataDir() / "interaction_fixture.tsv");
  const double c_cem = ReferencePearson(fx.salience, fx.cem);
  const double c_dpw = ReferencePearson(fx.salience, fx.dpw);
  const DpwSearchResult opt = OptimizeDpw(MakeSalience("lin_dist", fx.salience), fx.cem, DefaultGrid());
  const double elapsed = Seconds(t0);
  cr.checks.push_back({"signals", fx.signals.size() == 24, Format("%zu", fx.signals.size())});
  cr.checks.push_back({"salience vs cem", std::abs(c_cem + 0.77) <= 0.01, Format("%.5f", c_cem)});
  cr.checks.push_back({"salience vs dpw", std::abs(c_dpw + 0.927) <= 0.005, Format("%.5f", c_dpw)});
  cr.checks.push_back({"|c_opt| >= 0.92", std::abs(opt.c_opt) >= 0.92,
                       Format("%.4f k=%.3g x0=%.2f%s", opt.c_opt, opt.params.steepness,
                              opt.params.midpoint, opt.params.inverted ? " INV" : "")});
  cr.checks.push_back({"runtime < 1 s", elapsed < 1.0, Format("%.3f s", elapsed)});
  return cr;
}

Criterion PearsonOracleCriterion() {
  Criterion cr{"salience and interaction cost oracle", {}};
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<size_t> len(3, 12);
  double worst_s = 0.0, worst_c = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const size_t n = len(rng);
    const auto mos = Uniform(rng, n, 0.0, 100.0);
    const auto bf = Uniform(rng, n, 0.0, 100.0);
    worst_s = std::max(worst_s, std::abs(Salience(mos, bf) - ReferencePearson(mos, bf)));
    const auto s = Uniform(rng, n, -1.0, 1.0);
    const auto w = Uniform(rng, n, 0.0, 1.0);
    worst_c = std::max(worst_c, std::abs(InteractionCost(MakeSalience("m", s), w) -
                                         ReferencePearson(s, w)));
  }
  cr.checks.push_back({"salience max error <= 1e-12", worst_s <= 1e-12, Format("%.2e", worst_s)});
  cr.checks.push_back({"cost max error <= 1e-12", worst_c <= 1e-12, Format("%.2e", worst_c)});

  const std::vector<double> mos = {80, 60, 40, 20};
  const std::vector<double> flat = {50, 50, 50, 50};
  cr.checks.push_back(ExpectCode("constant BF output", CodeOf([&] { Salience(mos, flat); }),
                                 ErrorCode::kZeroVariance));
  cr.checks.push_back(ExpectCode("constant MOS", CodeOf([&] { Salience(flat, mos); }),
                                 ErrorCode::kZeroVariance));
  const auto sv = MakeSalience("m", {0.1, 0.5, -0.3, 0.8});
  cr.checks.push_back(ExpectCode("constant weights",
                                 CodeOf([&] { InteractionCost(sv, std::vector<double>(4, 0.3)); }),
                                 ErrorCode::kZeroVariance));
  const auto flat_s = MakeSalience("m", {0.4, 0.4, 0.4, 0.4});
  cr.checks.push_back(ExpectCode("constant salience in search",
                                 CodeOf([&] { OptimizeDpw(flat_s, mos, DefaultGrid()); }),
                                 ErrorCode::kAllUndefined));
  return cr;
}

Criterion DpwCriterion() {
  Criterion cr{"logistic weight properties", {}};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> logk(std::log(0.5), std::log(200.0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool midpoint_ok = true;
  double worst_sum = 0.0;
  size_t strict_pairs = 0, strict_fail = 0, sat_fail = 0;
  for (int t = 0; t < 10000; ++t) {
    const double k = std::exp(logk(rng));
    const double x0 = unit(rng);
    double a = unit(rng), b = unit(rng);
    if (a > b) std::swap(a, b);
    const LogisticParams p{k, x0, false};
    const LogisticParams q{k, x0, true};
    midpoint_ok &= Dpw(x0, p) == 0.5 && Dpw(x0, q) == 0.5;
    worst_sum = std::max(worst_sum, std::abs(Dpw(a, p) + Dpw(a, q) - 1.0));
    if (a == b) continue;
    // Strictness is representable only while the logistic is not saturated in
    // double precision.
    const bool resolvable = std::abs(k * (a - x0)) < 36.0 && std::abs(k * (b - x0)) < 36.0;
    const bool up = Dpw(a, p) < Dpw(b, p);
    const bool down = Dpw(a, q) > Dpw(b, q);
    const bool weak = Dpw(a, p) <= Dpw(b, p) && Dpw(a, q) >= Dpw(b, q);
    if (resolvable) {
      ++strict_pairs;
      strict_fail += !(up && down);
    } else {
      sat_fail += !weak;
    }
  }
  cr.checks.push_back({"midpoint gives 0.5", midpoint_ok, ""});
  cr.checks.push_back({"complement sum within 1e-15", worst_sum <= 1e-15, Format("%.2e", worst_sum)});
  cr.checks.push_back({"strictly monotone", strict_fail == 0 && sat_fail == 0,
                       Format("%zu strict pairs, %zu violations, %zu saturated violations",
                              strict_pairs, strict_fail, sat_fail)});
  const double v = Dpw(0.7, {10.0, 0.5, false});
  cr.checks.push_back({"closed form k=10 x0=0.5 x=0.7",
                       std::abs(v - 1.0 / (1.0 + std::exp(-2.0))) <= 1e-15, Format("%.6f", v)});
  return cr;
}

Criterion GridSearchCriterion() {
  Criterion cr{"grid search", {}};
  std::mt19937_64 rng(5);
  const SearchGrid toy{{0.5, 2.0, 8.0, 32.0, 128.0}, {0.1, 0.3, 0.5, 0.7, 0.9}, true};
  size_t mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const auto s = Uniform(rng, 10, -1.0, 1.0);
    const auto cem = Uniform(rng, 10, 0.0, 1.0);
    const DpwSearchResult got = OptimizeDpw(MakeSalience("m", s), cem, toy);
    struct Cand {
      LogisticParams p;
      double c;
    };
    std::vector<Cand> all;
    for (double k : toy.steepness) {
      for (double x0 : toy.midpoint) {
        for (bool inv : {false, true}) {
          std::vector<double> w;
          for (double x : cem) w.push_back(Dpw(x, {k, x0, inv}));
          if (const auto c = Pearson(s, w)) all.push_back({{k, x0, inv}, *c});
        }
      }
    }
    double best = 0.0;
    for (const Cand& c : all) best = std::max(best, std::abs(c.c));
    // Lexicographic (k, x0, non-inverted first) among the maximizers.
    const Cand* pick = nullptr;
    for (const Cand& c : all) {
      if (std::abs(c.c) < best - kCostTieTolerance) continue;
      if (!pick || std::tie(c.p.steepness, c.p.midpoint, c.p.inverted) <
                       std::tie(pick->p.steepness, pick->p.midpoint, pick->p.inverted)) {
        pick = &c;
      }
    }
    mismatches += !(pick && pick->p == got.params && pick->c == got.c_opt &&
                    got.evaluated == all.size());
  }
  cr.checks.push_back({"5x5 equals brute force", mismatches == 0,
                       Format("%zu of 200 differ", mismatches)});

  const SearchGrid grid = DefaultGrid();
  const double k_step = std::log(grid.steepness[1] / grid.steepness[0]);
  const double x_step = grid.midpoint[1] - grid.midpoint[0];
  size_t recovered = 0;
  bool first_ok = false;
  std::string detail;
  constexpr int kTrials = 10;
  for (int t = 0; t < kTrials; ++t) {
    std::mt19937_64 r(1000 + t);
    std::normal_distribution<double> noise(0.0, 0.02);
    const auto cem = Uniform(r, 24, 0.0, 1.0);
    std::vector<double> s;
    for (double x : cem) s.push_back(Logistic(x, 8.0, 0.4) + noise(r));
    const DpwSearchResult got = OptimizeDpw(MakeSalience("m", s), cem, grid);
    const bool ok = std::abs(std::log(got.params.steepness / 8.0)) <= k_step * (1 + 1e-9) &&
                    std::abs(got.params.midpoint - 0.4) <= x_step * (1 + 1e-9) &&
                    !got.params.inverted && std::abs(got.c_opt) >= 0.99;
    recovered += ok;
    if (t == 0) first_ok = ok;
    detail += Format("%s k=%.2f x0=%.2f c=%.4f", t ? ", " : "", got.params.steepness,
                     got.params.midpoint, got.c_opt);
  }
  // The gate is the first seeded dataset; the others show how often noise at
  // sigma 0.02 moves the optimum past one cell of the default grid.
  cr.checks.push_back({"recovery of k=8 x0=0.4", first_ok,
                       Format("draw 1 gates; all draws %zu/%d: ", recovered, kTrials) + detail});
  return cr;
}

Criterion MarsCriterion() {
  Criterion cr{"hinge regression recovery", {}};
  auto truth = [](double x) { return 80.0 - 20.0 * Hinge(x, 3.0, 1); };
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto draw = [&](size_t n, std::vector<double>& x, std::vector<double>& y) {
    x = Uniform(rng, n, 0.0, 6.0);
    y.clear();
    for (double v : x) y.push_back(truth(v) + noise(rng));
  };
  std::vector<double> x, y, hx, hy;
  draw(200, x, y);
  draw(200, hx, hy);
  const BasisFunction bf = FitBasisFunction("lin_dist", x, y);
  double knot_err = 1e9;
  for (const HingeTerm& t : bf.terms) knot_err = std::min(knot_err, std::abs(t.knot - 3.0));
  std::vector<double> pred;
  for (double v : hx) pred.push_back(bf(v));
  const double rmse = Rmse(pred, hy);
  const double slope = (bf(5.5) - bf(4.0)) / 1.5;
  cr.checks.push_back({"knot error <= 0.25", knot_err <= 0.25, Format("%.3f", knot_err)});
  cr.checks.push_back({"held-out RMSE <= 2", rmse <= 2.0, Format("%.3f", rmse)});
  cr.checks.push_back({"slope within 10% of -20", std::abs(slope + 20.0) <= 2.0, Format("%.2f", slope)});

  size_t increases = 0;
  for (int t = 0; t < 100; ++t) {
    std::mt19937_64 r(500 + t);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double k1 = 0.2 + 0.6 * u(r), k2 = 0.2 + 0.6 * u(r);
    const double a = 60 * u(r) - 30, b = 60 * u(r) - 30;
    std::normal_distribution<double> e(0.0, 3.0 * u(r));
    const size_t n = 20 + static_cast<size_t>(100 * u(r));
    std::vector<double> xs, ys;
    for (size_t i = 0; i < n; ++i) {
      const double v = u(r);
      xs.push_back(v);
      ys.push_back(std::clamp(50 + a * Hinge(v, k1, 1) + b * Hinge(v, k2, -1) + e(r), 0.0, 100.0));
    }
    const BasisFunction f = FitBasisFunction("m", xs, ys);
    increases += f.fit_stats.gcv > f.fit_stats.forward_gcv;
  }
  cr.checks.push_back({"pruning never increases GCV", increases == 0,
                       Format("%zu of 100 fits", increases)});
  return cr;
}

Criterion PerceptualCriterion() {
  Criterion cr{"perceptual model invariants", {}};
  const EarModel model;
  const AnalysisOptions options;
  const std::vector<float> ref = HarmonicComplex(4.0, kCanonicalSampleRate);
  auto dm = [&](const std::vector<float>& r, const std::vector<float>& s) {
    return AnalyzePair(MonoPair(r, s), model, options).dm;
  };

  const DmRecord id = dm(ref, ref);
  const bool floor = id.lin_dist == 0.0 && id.mod_diff == 0.0 && id.noise_loudness == 0.0 &&
                     id.missing_components == 0.0 && id.ehs == 0.0 && id.seg_nmr <= -20.0;
  cr.checks.push_back({"identity floor", floor,
                       Format("lin %.3g mod %.3g nl %.3g mc %.3g ehs %.3g nmr %.1f", id.lin_dist,
                              id.mod_diff, id.noise_loudness, id.missing_components, id.ehs,
                              id.seg_nmr)});

  std::vector<DmRecord> noisy;
  for (double snr : {30.0, 20.0, 10.0}) noisy.push_back(dm(ref, AddWhiteNoise(ref, snr, 9)));
  cr.checks.push_back(
      {"noise loudness ordered", noisy[0].noise_loudness < noisy[1].noise_loudness &&
                                     noisy[1].noise_loudness < noisy[2].noise_loudness,
       Format("%.4g < %.4g < %.4g", noisy[0].noise_loudness, noisy[1].noise_loudness,
              noisy[2].noise_loudness)});
  cr.checks.push_back({"seg_nmr ordered",
                       noisy[0].seg_nmr < noisy[1].seg_nmr && noisy[1].seg_nmr < noisy[2].seg_nmr,
                       Format("%.2f < %.2f < %.2f", noisy[0].seg_nmr, noisy[1].seg_nmr,
                              noisy[2].seg_nmr)});

  const double l_none = id.lin_dist;
  const double l12 = dm(ref, Lowpass(ref, kCanonicalSampleRate, 12000.0)).lin_dist;
  const double l6 = dm(ref, Lowpass(ref, kCanonicalSampleRate, 6000.0)).lin_dist;
  cr.checks.push_back({"lin_dist ordered over cutoffs", l_none < l12 && l12 < l6,
                       Format("%.4g < %.4g < %.4g", l_none, l12, l6)});

  const std::vector<float> sut = AddWhiteNoise(Lowpass(ref, kCanonicalSampleRate, 8000.0), 20.0, 4);
  const DmRecord fwd = dm(ref, sut);
  const DmRecord rev = dm(sut, ref);
  cr.checks.push_back({"swap exchanges nl and mc",
                       fwd.noise_loudness == rev.missing_components &&
                           fwd.missing_components == rev.noise_loudness,
                       Format("nl %.6g/%.6g mc %.6g/%.6g", fwd.noise_loudness,
                              rev.missing_components, fwd.missing_components,
                              rev.noise_loudness)});
  return cr;
}

Criterion AnnCriterion() {
  Criterion cr{"ANN baseline", {}};
  std::mt19937_64 rng(12);
  AnnModel model;
  model.hidden = 5;
  model.input_min.fill(0.0);
  model.input_max.fill(1.0);
  model.parameters = Uniform(rng, AnnParameterCount(5), -1.5, 1.5);
  std::vector<AnnInput> inputs(40);
  for (AnnInput& in : inputs) {
    for (double& v : in) v = Uniform(rng, 1, 0.0, 1.0)[0];
  }
  const auto mos = Uniform(rng, inputs.size(), 10.0, 90.0);
  std::vector<double> grad;
  AnnLoss(model, model.parameters, inputs, mos, &grad);
  std::uniform_int_distribution<size_t> pick(0, model.parameters.size() - 1);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const size_t i = pick(rng);
    std::vector<double> p = model.parameters;
    const double h = 1e-5;
    p[i] += h;
    const double up = AnnLoss(model, p, inputs, mos, nullptr);
    p[i] -= 2 * h;
    const double down = AnnLoss(model, p, inputs, mos, nullptr);
    const double fd = (up - down) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-10});
    worst = std::max(worst, std::abs(fd - grad[i]) / scale);
  }
  cr.checks.push_back({"gradient relative error <= 1e-4", worst <= 1e-4, Format("%.2e", worst)});

  std::vector<AnnInput> toy(60);
  std::vector<double> target;
  for (size_t r = 0; r < toy.size(); ++r) {
    for (double& v : toy[r]) v = Uniform(rng, 1, 0.0, 1.0)[0];
    target.push_back(20.0 + 60.0 * toy[r][0]);
  }
  AnnConfig config;
  const AnnModel a = TrainAnn(toy, target, config);
  const AnnModel b = TrainAnn(toy, target, config);
  cr.checks.push_back({"fixed seed bit-reproducible", a == b, ""});
  cr.checks.push_back({"toy training RMSE <= 2", a.training_rmse <= 2.0, Format("%.3f", a.training_rmse)});
  return cr;
}

Criterion ScoringCriterion() {
  Criterion cr{"quality scoring", {}};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_bfs = [&] {
    BfSet set;
    for (size_t m = 0; m < kDmCount; ++m) {
      set[m].dm_name = std::string(kDmNames[m]);
      set[m].intercept = 100 * u(rng);
      for (int t = 0; t < 3; ++t) set[m].terms.push_back({80 * u(rng) - 40, u(rng), u(rng) < 0.5 ? -1 : 1});
    }
    return set;
  };
  InteractionTable table = DefaultInteractionTable();
  size_t outside = 0, sum_fail = 0;
  double worst_sum = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const BfSet bfs = random_bfs();
    for (InteractionEntry& e : table.entries) {
      for (DpwFactor& f : e.factors) f.params = {std::exp(6 * u(rng) - 1), u(rng), u(rng) < 0.5};
    }
    DmValues dm;
    for (size_t m = 0; m < kDmCount; ++m) dm[m] = 1.2 * u(rng) - 0.1;
    CemRecord cem;
    for (size_t c = 0; c < kCemCount; ++c) cem[c] = u(rng);
    const WeightMode mode = t % 2 ? WeightMode::kRaw : WeightMode::kOptimized;
    const QualityScore s = Score(dm, cem, bfs, table, mode);
    double lo = 1e9, hi = -1e9, wsum = 0.0;
    for (const DmContribution& c : s.contributions) {
      lo = std::min(lo, c.bf_value);
      hi = std::max(hi, c.bf_value);
      wsum += c.weight;
    }
    outside += s.value < lo || s.value > hi;
    worst_sum = std::max(worst_sum, std::abs(wsum - 1.0));
    sum_fail += std::abs(wsum - 1.0) > 1e-12;
  }
  cr.checks.push_back({"score within BF output range", outside == 0, Format("%zu of 2000 outside", outside)});
  cr.checks.push_back({"weights sum to 1 within 1e-12", sum_fail == 0, Format("%.2e", worst_sum)});

  InteractionTable empty;
  CemRecord cem{0.3, 0.6, 0.9};
  const Weights w = ComputeWeights(cem, empty);
  bool uniform = true;
  for (double v : w.values) uniform &= std::abs(v - 1.0 / 6.0) <= 1e-15;
  cr.checks.push_back({"empty table gives 1/6", uniform, ""});
  return cr;
}

std::vector<Criterion> SyntheticCriteria(const SyntheticRunOptions& options) {
  Criterion order{"synthetic end-to-end ordering", {}};
  Criterion null{"null-hypothesis control", {}};
  const auto t0 = Clock::now();
  size_t wins = 0, triggers = 0;
  std::string order_detail, null_detail;
  for (uint64_t seed : options.seeds) {
    const auto ts = Clock::now();
    ExperimentOptions o;
    o.seed = seed;
    o.jobs = options.jobs;
    SyntheticCorpus corpus = BuildSyntheticCorpus(o);
    const ExperimentResult r = RunOnFeatures(corpus.train_features, corpus.validation_features, o);
    const bool win = r.optimized.r > r.baseline.r && r.optimized.r > r.raw.r &&
                     r.optimized.rmse_star < r.baseline.rmse_star &&
                     r.optimized.rmse_star < r.raw.rmse_star;
    wins += win;
    order_detail += Format("%sseed %llu opt %.3f/%.2f raw %.3f/%.2f ann %.3f/%.2f",
                           order_detail.empty() ? "" : ", ", static_cast<unsigned long long>(seed),
                           r.optimized.r, r.optimized.rmse_star, r.raw.r, r.raw.rmse_star,
                           r.baseline.r, r.baseline.rmse_star);

    ExperimentOptions n = o;
    n.latent.class_dependent = false;
    RelabelCorpus(corpus, n.latent);
    const ExperimentResult nr = RunOnFeatures(corpus.train_features, corpus.validation_features, n);
    const double c = nr.speech_lin_dist.c_opt;
    triggers += std::abs(c) >= 0.5;
    null_detail += Format("%s%.2f", null_detail.empty() ? "" : " ", c);
    if (options.verbose) {
      std::cerr << "seed " << seed << (win ? " win" : " loss") << " null c_opt " << c << " ("
                << Format("%.1f", Seconds(ts)) << " s)\n";
    }
  }
  const double elapsed = Seconds(t0);
  order.checks.push_back({">= 8/10 seeds Opt beats ANN and raw in R and RMSE*", wins >= 8,
                          Format("%zu/%zu; ", wins, options.seeds.size()) + order_detail});
  order.checks.push_back({"runtime < 10 min", elapsed < 600.0, Format("%.0f s", elapsed)});
  null.checks.push_back({"|c_opt| >= 0.5 on <= 2/10 seeds", triggers <= 2,
                         Format("%zu/%zu; c_opt %s", triggers, options.seeds.size(),
                                null_detail.c_str())});
  return {order, null};
}

}  // namespace csm::testing
