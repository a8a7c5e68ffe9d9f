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


// Run configuration: every tunable of a pipeline run in one plain-text
// `key = value` file. Lines starting with '#' are comments. Unknown keys are
// rejected.

#ifndef POINTEXPLAINER_CONFIG_H_
#define POINTEXPLAINER_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pointexplainer/classifier.h"
#include "pointexplainer/point_cloud.h"
#include "pointexplainer/signal.h"
#include "pointexplainer/surrogate.h"
#include "pointexplainer/synth.h"

namespace pointexplainer {

inline constexpr std::string_view kVersion = "pointexplainer 1.0.0";

struct RunConfig {
  std::filesystem::path run_dir = "run";
  // Recordings to train on; empty means <run_dir>/cohort.
  std::filesystem::path cohort_dir;
  CsvSchema csv_schema = CsvSchema::kCanonical;
  CohortParams cohort;

  HeightFeature height_feature = HeightFeature::kRadius;
  ColorMode color = ColorMode::kNone;
  size_t window = 256;
  size_t step = 64;
  double alpha = 0.5;

  std::vector<int> point_widths = {64, 128, 256};
  std::vector<int> head_widths = {128};
  int folds = 3;
  int epochs = 8;
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  int batch_size = 16;

  size_t superpoints = 11;
  size_t perturbations = 200;
  PerturbationStrategy strategy = PerturbationStrategy::kCentroid;
  std::vector<PerturbationStrategy> verify_strategies = {
      PerturbationStrategy::kCentroid, PerturbationStrategy::kHeightFlatten};
  std::vector<SurrogateKind> surrogates = {
      std::begin(kAllSurrogateKinds), std::end(kAllSurrogateKinds)};
  SurrogateKind explain_surrogate = SurrogateKind::kXGB;
  SurrogateHyper hyper;
  // 0 explains every subject in cmd_verify.
  int verify_instances = 0;
  int smoothing_window = 15;

  int bootstrap = 1000;
  double confidence = 0.95;
  int calibration_bins = 10;
  int sweep_points = 101;

  uint64_t seed = 0;
  int threads = 1;

  std::filesystem::path resolved_cohort_dir() const {
    return cohort_dir.empty() ? run_dir / "cohort" : cohort_dir;
  }
  PointSetConfig network() const;
  TrainConfig training(uint64_t shuffle_seed) const;
};

// Throws a config Error for an unknown key or a malformed value.
void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value);
// "key=value"
void ApplyOverride(RunConfig& config, std::string_view assignment);

// Applies every `key = value` line on top of `base`; errors name the line.
RunConfig ParseRunConfig(std::istream& in, RunConfig base = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Throws a config Error on inconsistent or out-of-range values.
void ValidateRunConfig(const RunConfig& config);

// Every key in sorted order, one `key = value` line each; parses back to the
// same configuration.
std::string RunConfigToText(const RunConfig& config);

std::vector<std::string> RunConfigKeys();

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_CONFIG_H_
