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
#include <cstdio>
#include <numbers>
#include <string>

#include "pointexplainer/error.h"
#include "pointexplainer/random.h"

namespace pointexplainer {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string SubjectId(const char* prefix, int index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s_%03d", prefix, index);
  return buffer;
}

}  // namespace

void ValidateCohortParams(const CohortParams& p) {
  if (p.n_pd < 0 || p.n_hc < 0) throw ConfigError("subject counts must be >= 0");
  if (p.points_per_subject < 2) {
    throw ConfigError("points_per_subject must be >= 2");
  }
  if (!(p.pitch > 0.0) || !(p.turns > 0.0) || !(p.sample_rate > 0.0) ||
      !(p.tremor_frequency > 0.0)) {
    throw ConfigError(
        "pitch, turns, sample_rate and tremor_frequency must be positive");
  }
  if (!(p.tremor_amplitude >= 0.0) || !(p.tremor_phase_jitter >= 0.0) ||
      !(p.micrographia_rate >= 0.0) || !(p.pressure_drift >= 0.0) ||
      !(p.noise >= 0.0)) {
    throw ConfigError("amplitudes, rates and noise must be >= 0");
  }
  if (p.micrographia_rate * p.turns >= 1.0) {
    throw ConfigError("micrographia_rate * turns must stay below 1");
  }
}

std::vector<std::array<double, 2>> SpiralTemplate(double pitch, double turns,
                                                  int n_points) {
  if (n_points < 2) throw ConfigError("spiral template needs >= 2 points");
  std::vector<std::array<double, 2>> out(static_cast<size_t>(n_points));
  const double span = kTwoPi * turns;
  for (int i = 0; i < n_points; ++i) {
    const double theta = span * i / (n_points - 1);
    const double r = pitch * theta;
    out[i] = {r * std::cos(theta), r * std::sin(theta)};
  }
  return out;
}

HandDrawnSignal SimulateSubject(Label label, const CohortParams& params,
                                uint64_t subject_seed) {
  ValidateCohortParams(params);
  if (label == Label::kUnknown) throw ConfigError("subject needs a label");
  const bool pd = label == Label::kPD;
  Rng rng(subject_seed);
  const int n = params.points_per_subject;
  const double span = kTwoPi * params.turns;
  const double spacing = kTwoPi * params.pitch;
  const double dt = 1.0 / params.sample_rate;

  // Per-subject variation of tremor strength and frequency.
  const double amplitude =
      params.tremor_amplitude * spacing * rng.Uniform(0.75, 1.25);
  const double frequency = params.tremor_frequency * rng.Uniform(0.9, 1.1);
  double phase = rng.Uniform(0.0, kTwoPi);
  const double pressure_base = rng.Uniform(0.45, 0.6);
  const double pressure_period = rng.Uniform(8.0, 15.0);
  const double azimuth = rng.Uniform(40.0, 60.0);
  const double altitude = rng.Uniform(45.0, 65.0);
  double pressure_walk = 0.0;

  HandDrawnSignal signal;
  signal.label = label;
  signal.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    const double theta = span * i / (n - 1);
    double r = params.pitch * theta;
    double pressure =
        pressure_base + 0.05 * std::sin(kTwoPi * t / pressure_period);
    if (pd) {
      r *= 1.0 - params.micrographia_rate * theta / kTwoPi;
      if (amplitude > 0.0) {
        phase += kTwoPi * frequency * dt;
        if (i > 0) phase += rng.Normal(0.0, params.tremor_phase_jitter);
        r += amplitude * std::sin(phase);
      }
      pressure_walk += rng.Normal(0.0, params.pressure_drift * std::sqrt(dt));
      pressure += pressure_walk + 0.03 * std::sin(phase);
    }
    RawSample& s = signal.samples[i];
    s.x = r * std::cos(theta);
    s.y = r * std::sin(theta);
    if (params.noise > 0.0) {
      s.x += rng.Normal(0.0, params.noise * spacing);
      s.y += rng.Normal(0.0, params.noise * spacing);
    }
    s.pressure = std::clamp(pressure, 0.0, 1.0);
    s.azimuth = azimuth;
    s.altitude = altitude;
    s.timestamp = 1000.0 * i / params.sample_rate;
  }
  return DeriveKinematics(std::move(signal));
}

std::vector<HandDrawnSignal> GenerateCohort(const CohortParams& params) {
  ValidateCohortParams(params);
  if (params.n_pd == 0 || params.n_hc == 0) {
    throw ConfigError("empty class: cohort needs n_pd >= 1 and n_hc >= 1");
  }
  std::vector<HandDrawnSignal> cohort;
  cohort.reserve(static_cast<size_t>(params.n_pd + params.n_hc));
  uint64_t stream = 0;
  for (int i = 1; i <= params.n_pd; ++i) {
    cohort.push_back(SimulateSubject(Label::kPD, params,
                                     DeriveSeed(params.seed, stream++)));
    cohort.back().subject_id = SubjectId("PD", i);
  }
  for (int i = 1; i <= params.n_hc; ++i) {
    cohort.push_back(SimulateSubject(Label::kHC, params,
                                     DeriveSeed(params.seed, stream++)));
    cohort.back().subject_id = SubjectId("HC", i);
  }
  return cohort;
}

}  // namespace pointexplainer
