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


// Faithfulness metrics of an explanation against the black box it explains.

#ifndef POINTEXPLAINER_FIDELITY_H_
#define POINTEXPLAINER_FIDELITY_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointexplainer/classifier.h"
#include "pointexplainer/point_cloud.h"
#include "pointexplainer/surrogate.h"

namespace pointexplainer {

// -1, 0 or 1.
int Sign(double v);

// |f_out - g_out|.
double ProbabilityConsistency(double f_out, double g_out);

// 1 when f_out and g_out fall on the same side of 0.5 (sign(0) = 0).
int CategoryAlignment(double f_out, double g_out);

// Pearson correlation; nullopt when either input has zero variance. Throws a
// data Error on a length mismatch or fewer than two entries.
std::optional<double> Pearson(std::span<const double> x,
                              std::span<const double> y);

// Pearson correlation of |weights| and |deltas|; nullopt when undefined.
std::optional<double> AttributionConsistency(std::span<const double> weights,
                                             std::span<const double> deltas);

// Fraction of superpoints where sign(weight) == sign(delta).
double DirectionAlignment(std::span<const double> weights,
                          std::span<const double> deltas);

// F(X) - F(X without superpoint j) for every j, with the removal realised by
// `strategy` applied to that superpoint alone.
std::vector<double> DecisionDeltas(const DiagnosticModel& model,
                                   const PointCloud& cloud,
                                   const std::vector<Superpoint>& superpoints,
                                   PerturbationStrategy strategy,
                                   int threads = 1);

// Same for an arbitrary black box over masks of length m.
using MaskFunction = std::function<double(const PerturbationMask&)>;
std::vector<double> DecisionDeltas(const MaskFunction& black_box, size_t m);

struct InstanceFidelity {
  std::string instance_id;
  SurrogateKind kind = SurrogateKind::kLR;
  PerturbationStrategy strategy = PerturbationStrategy::kCentroid;
  double f_out = 0.0;
  double g_out = 0.0;
  double pc = 0.0;
  int ca = 0;
  std::optional<double> ac;
  double da = 0.0;
};

// All four metrics for one explained instance; g_out is G(all ones).
InstanceFidelity EvaluateFidelity(std::string instance_id,
                                  PerturbationStrategy strategy,
                                  const SurrogateModel& surrogate,
                                  std::span<const double> weights,
                                  double f_out,
                                  std::span<const double> deltas);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population
  size_t count = 0;
};

MetricSummary Summarize(std::span<const double> values);

struct FidelityRow {
  SurrogateKind kind = SurrogateKind::kLR;
  PerturbationStrategy strategy = PerturbationStrategy::kCentroid;
  size_t instances = 0;
  MetricSummary pc;
  MetricSummary ca;
  MetricSummary ac;  // over instances with a defined AC
  MetricSummary da;
  size_t undefined_ac = 0;
};

// One row per (strategy, kind) present, ordered by strategy then kind.
std::vector<FidelityRow> FidelityReport(
    const std::vector<InstanceFidelity>& instances);

// kind,strategy,instances,pc_mean,pc_std,...,undefined_ac
std::string FidelityReportCsv(const std::vector<FidelityRow>& rows);
// Aligned "mean +- std" table.
std::string FidelityReportText(const std::vector<FidelityRow>& rows);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_FIDELITY_H_
