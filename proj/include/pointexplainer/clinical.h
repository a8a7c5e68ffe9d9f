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


// Subject-level classification metrics, cross-validation folds and the
// clinical-applicability analyses: ROC, calibration and decision curves with
// bootstrap confidence bands.

#ifndef POINTEXPLAINER_CLINICAL_H_
#define POINTEXPLAINER_CLINICAL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointexplainer/signal.h"

namespace pointexplainer {

struct ScoredSubject {
  std::string subject_id;
  double score = 0.0;  // final vote fraction
  Label label = Label::kUnknown;
};

struct ConfusionCounts {
  size_t tp = 0;
  size_t fn = 0;
  size_t tn = 0;
  size_t fp = 0;

  size_t total() const { return tp + fn + tn + fp; }
};

// nullopt marks an empty denominator.
struct MetricSet {
  ConfusionCounts counts;
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> f1;
};

ConfusionCounts Confusion(std::span<const ScoredSubject> scored, double alpha);
MetricSet MetricsFromCounts(const ConfusionCounts& counts);
// PD is predicted iff score >= alpha. Throws a data Error on an empty input
// or an unlabelled subject.
MetricSet ClassificationMetrics(std::span<const ScoredSubject> scored,
                                double alpha);

struct SubjectLabel {
  std::string subject_id;
  Label label = Label::kUnknown;
};

// k disjoint folds of subject ids. Each class is shuffled and dealt
// round-robin, continuing from the fold where the previous class stopped, so
// per-class and total fold sizes differ by at most one. Throws a config Error
// when k < 2 and a data Error when a class has fewer than k subjects.
std::vector<std::vector<std::string>> StratifiedKFold(
    const std::vector<SubjectLabel>& subjects, int k, uint64_t seed);

struct RocPoint {
  double threshold = 0.0;  // +inf for the origin
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  std::vector<RocPoint> curve;  // from (0, 0) to (1, 1)
  double auc = 0.0;
};

// Sweep over the distinct scores; trapezoidal AUC, which scores ties as one
// half. Throws a data Error unless both classes are present.
RocResult RocAuc(std::span<const ScoredSubject> scored);

// Upper envelope of the ROC curve linearly interpolated at `fpr`.
double TprAt(const RocResult& roc, double fpr);

struct CalibrationPoint {
  int bin = 0;
  double mean_score = 0.0;
  double observed = 0.0;  // fraction of PD subjects in the bin
  size_t count = 0;
};

struct CalibrationResult {
  std::vector<CalibrationPoint> curve;  // empty bins omitted
  double brier = 0.0;
};

// Equal-width bins over [0, 1]; a score of exactly 1 falls in the last bin.
CalibrationResult Calibration(std::span<const ScoredSubject> scored,
                              int bins = 10);

struct NetBenefitPoint {
  double threshold = 0.0;
  double model = 0.0;
  double treat_all = 0.0;
  double treat_none = 0.0;
};

// Throws a config Error for a threshold outside (0, 1).
std::vector<NetBenefitPoint> DecisionCurve(
    std::span<const ScoredSubject> scored, std::span<const double> thresholds);

// `count` evenly spaced values from lo to hi inclusive.
std::vector<double> Grid(double lo, double hi, int count);

// Returns nullopt when the statistic is undefined on a resample.
using CurveStatistic = std::function<std::optional<std::vector<double>>(
    const std::vector<ScoredSubject>&)>;

struct BootstrapBand {
  std::vector<double> estimate;  // statistic on the full input
  std::vector<double> mean;      // mean over resamples
  std::vector<double> lo;
  std::vector<double> hi;
  size_t resamples = 0;
};

// Subject-level percentile bootstrap. A resample on which the statistic is
// undefined is redrawn up to ten times before a numeric Error is thrown.
// Non-finite entries of a resample are left out of that entry's percentiles.
// Each resample draws from its own stream derived from `seed`, so the result
// does not depend on `threads`.
BootstrapBand BootstrapCi(const CurveStatistic& statistic,
                          const std::vector<ScoredSubject>& scored,
                          int resamples = 1000, double level = 0.95,
                          uint64_t seed = 0, int threads = 1);

// Linear-interpolation percentile of finite values, q in [0, 1]; NaN when
// none are finite.
double Percentile(std::vector<double> values, double q);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_CLINICAL_H_
