/*
 * Copyright 2026 The PointExplainer Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "pointexplainer/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "gtest/gtest.h"
#include "pointexplainer/error.h"

namespace pointexplainer {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Energy of the radial residual r(t) - b theta(t) at DFT bins whose frequency
// lies in [lo, hi] Hz, by direct summation.
double BandEnergy(const HandDrawnSignal& s, const CohortParams& p, double lo,
                  double hi) {
  const size_t n = s.size();
  std::vector<double> e(n);
  for (size_t i = 0; i < n; ++i) {
    const double theta = kTwoPi * p.turns * static_cast<double>(i) /
                         static_cast<double>(n - 1);
    e[i] = std::hypot(s.samples[i].x, s.samples[i].y) - p.pitch * theta;
  }
  double energy = 0.0;
  for (size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * p.sample_rate / n;
    if (f < lo || f > hi) continue;
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double a = kTwoPi * static_cast<double>(k * i % n) / n;
      re += e[i] * std::cos(a);
      im -= e[i] * std::sin(a);
    }
    energy += re * re + im * im;
  }
  return energy;
}

TEST(SpiralTemplate, Geometry) {
  const auto t = SpiralTemplate(1.0, 1.0, 101);
  EXPECT_EQ(t[0][0], 0.0);
  EXPECT_EQ(t[0][1], 0.0);
  EXPECT_NEAR(std::hypot(t[100][0], t[100][1]), kTwoPi, 1e-12);
  for (size_t i = 1; i < t.size(); ++i) {
    EXPECT_GT(std::hypot(t[i][0], t[i][1]), std::hypot(t[i - 1][0], t[i - 1][1]));
  }
  EXPECT_THROW(SpiralTemplate(1.0, 1.0, 1), Error);
}

TEST(SimulateSubject, DegeneratePdCoincidesWithTemplate) {
  CohortParams p;
  p.tremor_amplitude = 0.0;
  p.noise = 0.0;
  p.micrographia_rate = 0.0;
  p.points_per_subject = 500;
  const auto s = SimulateSubject(Label::kPD, p, 3);
  const auto t = SpiralTemplate(p.pitch, p.turns, 500);
  ASSERT_EQ(s.size(), 500u);
  for (size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(s.samples[i].x, t[i][0]);
    EXPECT_EQ(s.samples[i].y, t[i][1]);
  }
  EXPECT_EQ(s.label, Label::kPD);
  EXPECT_EQ(s.radius.size(), 500u);
}

TEST(SimulateSubject, DeterministicAndTimestamped) {
  CohortParams p;
  p.points_per_subject = 400;
  const auto a = SimulateSubject(Label::kPD, p, 9);
  const auto b = SimulateSubject(Label::kPD, p, 9);
  const auto c = SimulateSubject(Label::kPD, p, 10);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.samples[i].x, b.samples[i].x);
    EXPECT_EQ(a.samples[i].pressure, b.samples[i].pressure);
    EXPECT_EQ(a.samples[i].timestamp, 1000.0 * i / p.sample_rate);
    EXPECT_GE(a.samples[i].pressure, 0.0);
    EXPECT_LE(a.samples[i].pressure, 1.0);
  }
  EXPECT_NE(a.samples[5].x, c.samples[5].x);
}

TEST(SimulateSubject, MicrographiaShrinksOuterTurn) {
  CohortParams p;
  p.tremor_amplitude = 0.0;
  p.noise = 0.0;
  const auto pd = SimulateSubject(Label::kPD, p, 1);
  const auto hc = SimulateSubject(Label::kHC, p, 1);
  const auto& a = pd.samples.back();
  const auto& b = hc.samples.back();
  EXPECT_NEAR(std::hypot(a.x, a.y) / std::hypot(b.x, b.y),
              1.0 - p.micrographia_rate * p.turns, 1e-12);
}

TEST(SimulateSubject, TremorBandEnergyContrast) {
  CohortParams p;
  const double lo = p.tremor_frequency - 1.5;
  const double hi = p.tremor_frequency + 1.5;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const double pd = BandEnergy(SimulateSubject(Label::kPD, p, seed), p, lo, hi);
    const double hc = BandEnergy(SimulateSubject(Label::kHC, p, seed), p, lo, hi);
    EXPECT_GE(pd, 10.0 * hc) << seed;
  }
}

TEST(SimulateSubject, Validation) {
  CohortParams p;
  p.pitch = 0.0;
  EXPECT_THROW(SimulateSubject(Label::kHC, p, 0), Error);
  p = {};
  p.tremor_amplitude = -1.0;
  EXPECT_THROW(SimulateSubject(Label::kHC, p, 0), Error);
  p = {};
  EXPECT_THROW(SimulateSubject(Label::kUnknown, p, 0), Error);
}

TEST(GenerateCohort, CountsAndIds) {
  CohortParams p;
  p.n_pd = 3;
  p.n_hc = 2;
  p.points_per_subject = 200;
  const auto cohort = GenerateCohort(p);
  ASSERT_EQ(cohort.size(), 5u);
  std::set<std::string> ids;
  int pd = 0;
  for (const auto& s : cohort) {
    ids.insert(s.subject_id);
    pd += s.label == Label::kPD;
    EXPECT_EQ(s.size(), 200u);
  }
  EXPECT_EQ(pd, 3);
  EXPECT_EQ(ids.size(), 5u);
  EXPECT_EQ(cohort[0].subject_id, "PD_001");
  EXPECT_EQ(cohort[4].subject_id, "HC_002");
  const auto again = GenerateCohort(p);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(again[i].samples.back().x, cohort[i].samples.back().x);
  }
  p.n_pd = 0;
  try {
    GenerateCohort(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("empty class"), std::string::npos);
  }
}

TEST(GenerateCohort, DefaultCohortSeparableByTremorEnergy) {
  CohortParams p;
  const auto cohort = GenerateCohort(p);
  ASSERT_EQ(cohort.size(), 60u);
  std::vector<std::pair<double, bool>> scored;
  for (const auto& s : cohort) {
    scored.emplace_back(BandEnergy(s, p, p.tremor_frequency - 1.5,
                                   p.tremor_frequency + 1.5),
                        s.label == Label::kPD);
  }
  // Best single threshold.
  std::sort(scored.begin(), scored.end());
  size_t best = 0;
  for (size_t cut = 0; cut <= scored.size(); ++cut) {
    size_t correct = 0;
    for (size_t i = 0; i < scored.size(); ++i) {
      correct += (i >= cut) == scored[i].second;
    }
    best = std::max(best, correct);
  }
  EXPECT_GE(static_cast<double>(best) / scored.size(), 0.95);
}

}  // namespace
}  // namespace pointexplainer
