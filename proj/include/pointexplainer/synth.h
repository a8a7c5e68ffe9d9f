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


// Synthetic Archimedean-spiral cohorts standing in for clinical recordings.
//
// Healthy drawings follow the template with small white positional noise and
// a smooth pressure profile. Parkinsonian drawings add a radial tremor, a
// progressive shrink of the spiral (micrographia) and irregular pressure.

#ifndef POINTEXPLAINER_SYNTH_H_
#define POINTEXPLAINER_SYNTH_H_

#include <array>
#include <cstdint>
#include <vector>

#include "pointexplainer/signal.h"

namespace pointexplainer {

struct CohortParams {
  int n_pd = 30;
  int n_hc = 30;
  int points_per_subject = 3000;
  double pitch = 2.0;  // b in r = b * theta
  double turns = 3.0;
  double sample_rate = 100.0;  // Hz
  // Tremor amplitude as a fraction of the distance between turns (2 pi b).
  double tremor_amplitude = 0.06;
  double tremor_frequency = 5.0;  // Hz
  // Per-sample standard deviation of the tremor phase random walk (radians).
  double tremor_phase_jitter = 0.02;
  // Fractional radius loss per completed turn.
  double micrographia_rate = 0.08;
  // Standard deviation of the PD pressure random walk per second.
  double pressure_drift = 0.05;
  // Positional white noise, as a fraction of the distance between turns.
  double noise = 0.004;
  uint64_t seed = 0;
};

// Throws a config Error on a non-positive physical parameter, a negative
// amplitude or noise, or fewer than two points.
void ValidateCohortParams(const CohortParams& params);

// r = b * theta at n_points uniformly spaced angles over [0, 2 pi turns].
std::vector<std::array<double, 2>> SpiralTemplate(double pitch, double turns,
                                                  int n_points);

// One recording with derived kinematics; subject_id is left empty.
HandDrawnSignal SimulateSubject(Label label, const CohortParams& params,
                                uint64_t subject_seed);

// n_pd PD subjects (PD_001, ...) followed by n_hc HC subjects (HC_001, ...),
// each simulated from its own seed derived from params.seed. Throws a config
// Error when either class is empty.
std::vector<HandDrawnSignal> GenerateCohort(const CohortParams& params);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_SYNTH_H_
