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

// Per-instance interpretable surrogates.
//
// A cloud is split into superpoints; binary masks switch superpoints between
// their original and perturbed state. The frozen diagnostic model scores each
// perturbed cloud and a surrogate G is fitted on the (mask, score) pairs.
// Attributions are the mean marginal effect of toggling one mask bit.

#ifndef POINTEXPLAINER_SURROGATE_H_
#define POINTEXPLAINER_SURROGATE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pointexplainer/classifier.h"
#include "pointexplainer/point_cloud.h"

namespace pointexplainer {

// K masks of length m, each bit Bernoulli(0.5); an all-ones draw is redrawn.
// The first k masks of a longer run equal a shorter run with the same seed.
std::vector<PerturbationMask> GenerateMasks(size_t m, size_t k, uint64_t seed);

struct PerturbedSample {
  PerturbationMask mask;
  PointCloud cloud;
};

std::vector<PerturbedSample> GeneratePerturbationSet(
    const PointCloud& cloud, const std::vector<Superpoint>& superpoints,
    size_t k, PerturbationStrategy strategy, uint64_t seed);

struct PerturbationRecord {
  PerturbationMask mask;
  double response = 0.0;  // vote fraction of the perturbed cloud
};

// Scores every perturbed cloud with the full diagnostic model.
std::vector<PerturbationRecord> LabelPerturbations(
    const DiagnosticModel& model, const std::vector<PerturbedSample>& set,
    int threads = 1);

// Same responses as LabelPerturbations on the clouds Perturb would build,
// without materialising them. A patch only sees the superpoints it overlaps,
// so each patch is scored once per distinct state of those bits.
std::vector<PerturbationRecord> LabelMasks(
    const DiagnosticModel& model, const PointCloud& cloud,
    const std::vector<Superpoint>& superpoints,
    const std::vector<PerturbationMask>& masks, PerturbationStrategy strategy,
    int threads = 1);

enum class SurrogateKind { kLR, kRidge, kElasticNet, kDT, kRF, kXGB };

inline constexpr SurrogateKind kAllSurrogateKinds[] = {
    SurrogateKind::kLR, SurrogateKind::kRidge, SurrogateKind::kElasticNet,
    SurrogateKind::kDT, SurrogateKind::kRF,    SurrogateKind::kXGB};

std::string_view SurrogateKindName(SurrogateKind kind);
// "LR", "Ridge", "ElasticNet", "DT", "RF", "XGB" (case-insensitive).
SurrogateKind ParseSurrogateKind(std::string_view text);
bool IsLinear(SurrogateKind kind);

struct SurrogateHyper {
  double ridge_lambda = 1.0;
  double elastic_lambda = 0.01;
  double elastic_rho = 0.5;
  double elastic_tol = 1e-8;
  int elastic_max_sweeps = 10000;
  int tree_max_depth = 6;
  int tree_min_leaf = 2;
  int forest_trees = 100;
  int boost_trees = 100;
  int boost_depth = 3;
  double boost_shrinkage = 0.1;
  double boost_lambda = 1.0;
};

// Binary regression tree; a split sends bit == 0 left.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 for a leaf
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  double Predict(std::span<const uint8_t> bits) const;
  int depth() const;
};

class SurrogateModel {
 public:
  SurrogateKind kind() const { return kind_; }
  size_t features() const { return features_; }
  double intercept() const { return intercept_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  // ElasticNet objective after each coordinate-descent sweep.
  const std::vector<double>& objective_trace() const { return trace_; }

  double Predict(std::span<const uint8_t> bits) const;
  double Predict(const PerturbationMask& mask) const {
    return Predict(mask.bits());
  }
  // G(bits with j set) - G(bits with j cleared); the coefficient for linear
  // kinds.
  double Toggle(std::span<const uint8_t> bits, size_t j) const;

  static SurrogateModel Linear(SurrogateKind kind, double intercept,
                               std::vector<double> coefficients);
  static SurrogateModel Trees(SurrogateKind kind, size_t features,
                              double base, double scale,
                              std::vector<RegressionTree> trees);

 private:
  friend SurrogateModel FitSurrogate(
      const std::vector<PerturbationRecord>& records, SurrogateKind kind,
      const SurrogateHyper& hyper, uint64_t seed);

  SurrogateKind kind_ = SurrogateKind::kLR;
  size_t features_ = 0;
  double intercept_ = 0.0;
  std::vector<double> coefficients_;
  // Tree ensembles predict base + scale * sum of tree outputs.
  double base_ = 0.0;
  double scale_ = 1.0;
  std::vector<RegressionTree> trees_;
  std::vector<double> trace_;
};

// Throws a data Error with fewer than two records or mixed mask lengths and
// a numeric Error on a degenerate design where every mask is identical.
SurrogateModel FitSurrogate(const std::vector<PerturbationRecord>& records,
                            SurrogateKind kind,
                            const SurrogateHyper& hyper = {},
                            uint64_t seed = 0);

// ElasticNet objective for given parameters on the records.
double ElasticNetObjective(const std::vector<PerturbationRecord>& records,
                           double intercept,
                           std::span<const double> coefficients,
                           double lambda, double rho);

struct AttributionMap {
  std::string instance_id;
  PerturbationStrategy strategy = PerturbationStrategy::kCentroid;
  SurrogateKind kind = SurrogateKind::kLR;
  std::vector<double> weights;
  std::vector<Superpoint> superpoints;
};

// Mean marginal toggle of each bit over the record masks.
std::vector<double> MeanToggle(const SurrogateModel& surrogate,
                               const std::vector<PerturbationRecord>& records);

AttributionMap ExtractAttributions(
    const SurrogateModel& surrogate,
    const std::vector<PerturbationRecord>& records,
    const std::vector<Superpoint>& superpoints, std::string instance_id,
    PerturbationStrategy strategy);

// Shapley values of v(S) = G(mask with exactly the bits of S set), by full
// enumeration. Throws a config Error when the surrogate has more than 20
// features.
std::vector<double> ExactShapley(const SurrogateModel& surrogate);

std::string AttributionMapToJson(const AttributionMap& map);
AttributionMap AttributionMapFromJson(std::string_view text);
void SaveAttributionMap(const AttributionMap& map,
                        const std::filesystem::path& path);
AttributionMap LoadAttributionMap(const std::filesystem::path& path);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_SURROGATE_H_
