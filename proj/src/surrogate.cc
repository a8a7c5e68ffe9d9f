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

#include "pointexplainer/surrogate.h"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "pointexplainer/error.h"
#include "pointexplainer/parallel.h"
#include "pointexplainer/random.h"
#include "pointexplainer/signal.h"
#include "pointexplainer/strings.h"

namespace pointexplainer {

namespace {

// Mean that is exact when all values are equal.
class AnchoredMean {
 public:
  void Add(double v) {
    if (count_ == 0) anchor_ = v;
    offset_ += v - anchor_;
    ++count_;
  }
  double value() const {
    return count_ == 0 ? 0.0 : anchor_ + offset_ / static_cast<double>(count_);
  }

 private:
  double anchor_ = 0.0;
  double offset_ = 0.0;
  size_t count_ = 0;
};

}  // namespace

std::vector<PerturbationMask> GenerateMasks(size_t m, size_t k,
                                            uint64_t seed) {
  if (m == 0) throw ConfigError("perturbation needs at least one superpoint");
  if (k == 0) throw ConfigError("perturbation sample count must be >= 1");
  Rng rng(seed);
  std::vector<PerturbationMask> masks;
  masks.reserve(k);
  std::vector<uint8_t> bits(m);
  while (masks.size() < k) {
    bool all_ones = true;
    for (auto& b : bits) {
      b = rng.Bernoulli(0.5) ? 1 : 0;
      all_ones = all_ones && b != 0;
    }
    if (!all_ones) masks.emplace_back(bits);
  }
  return masks;
}

std::vector<PerturbedSample> GeneratePerturbationSet(
    const PointCloud& cloud, const std::vector<Superpoint>& superpoints,
    size_t k, PerturbationStrategy strategy, uint64_t seed) {
  std::vector<PerturbedSample> out;
  for (auto& mask : GenerateMasks(superpoints.size(), k, seed)) {
    PointCloud perturbed = Perturb(strategy, cloud, superpoints, mask);
    out.push_back({std::move(mask), std::move(perturbed)});
  }
  return out;
}

std::vector<PerturbationRecord> LabelPerturbations(
    const DiagnosticModel& model, const std::vector<PerturbedSample>& set,
    int threads) {
  std::vector<PerturbationRecord> records(set.size());
  ParallelFor(set.size(), threads, [&](size_t i) {
    records[i] = {set[i].mask, model.Score(set[i].cloud)};
  });
  return records;
}

std::vector<PerturbationRecord> LabelMasks(
    const DiagnosticModel& model, const PointCloud& cloud,
    const std::vector<Superpoint>& superpoints,
    const std::vector<PerturbationMask>& masks, PerturbationStrategy strategy,
    int threads) {
  const size_t m = superpoints.size();
  for (const auto& mask : masks) {
    if (mask.size() != m) {
      throw ConfigError("mask length " + std::to_string(mask.size()) +
                        " does not match " + std::to_string(m) +
                        " superpoints");
    }
  }
  const size_t patches = PatchCount(cloud.size(), model.window, model.step);
  if (model.window > cloud.size() || patches == 0) {
    throw DataError("cloud of " + std::to_string(cloud.size()) +
                    " points yields no patch of size " +
                    std::to_string(model.window));
  }
  const PointCloud collapsed =
      Perturb(strategy, cloud, superpoints, PerturbationMask::AllZeros(m));
  std::vector<size_t> owner(cloud.size());
  for (const auto& sp : superpoints) {
    for (size_t i = sp.lo; i < sp.hi; ++i) owner[i] = sp.index;
  }

  // probabilities[p][k] for patch p under mask k.
  std::vector<std::vector<double>> probabilities(patches);
  ParallelFor(patches, threads, [&](size_t p) {
    const size_t start = p * model.step;
    const size_t first = owner[start];
    const size_t last = owner[start + model.window - 1];
    std::map<std::vector<uint8_t>, double> cache;
    std::vector<double>& out = probabilities[p];
    out.resize(masks.size());
    for (size_t k = 0; k < masks.size(); ++k) {
      const auto& bits = masks[k].bits();
      std::vector<uint8_t> key(bits.begin() + first, bits.begin() + last + 1);
      auto it = cache.find(key);
      if (it == cache.end()) {
        std::vector<AttributedPoint> points(model.window);
        for (size_t i = 0; i < model.window; ++i) {
          const size_t src = start + i;
          points[i] = bits[owner[src]] ? cloud.points[src]
                                       : collapsed.points[src];
        }
        const double y = model.network.Predict(NormalizePatch(std::move(points)));
        it = cache.emplace(std::move(key), y).first;
      }
      out[k] = it->second;
    }
  });

  std::vector<PerturbationRecord> records(masks.size());
  std::vector<double> column(patches);
  for (size_t k = 0; k < masks.size(); ++k) {
    for (size_t p = 0; p < patches; ++p) column[p] = probabilities[p][k];
    records[k] = {masks[k], VoteFraction(column, model.alpha)};
  }
  return records;
}

// ---------------------------------------------------------------------------
// Surrogate kinds.

namespace {

constexpr std::pair<SurrogateKind, std::string_view> kKindNames[] = {
    {SurrogateKind::kLR, "LR"},   {SurrogateKind::kRidge, "Ridge"},
    {SurrogateKind::kElasticNet, "ElasticNet"},
    {SurrogateKind::kDT, "DT"},   {SurrogateKind::kRF, "RF"},
    {SurrogateKind::kXGB, "XGB"},
};

}  // namespace

std::string_view SurrogateKindName(SurrogateKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

SurrogateKind ParseSurrogateKind(std::string_view text) {
  const std::string lower = ToLower(Trim(text));
  for (const auto& [k, name] : kKindNames) {
    if (ToLower(name) == lower) return k;
  }
  throw ConfigError("unknown surrogate kind '" + std::string(text) +
                    "' (expected LR, Ridge, ElasticNet, DT, RF or XGB)");
}

bool IsLinear(SurrogateKind kind) {
  return kind == SurrogateKind::kLR || kind == SurrogateKind::kRidge ||
         kind == SurrogateKind::kElasticNet;
}

double RegressionTree::Predict(std::span<const uint8_t> bits) const {
  int n = 0;
  while (nodes[n].feature >= 0) {
    n = bits[nodes[n].feature] ? nodes[n].right : nodes[n].left;
  }
  return nodes[n].value;
}

int RegressionTree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[nodes[i].left] = level[i] + 1;
      level[nodes[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

double SurrogateModel::Predict(std::span<const uint8_t> bits) const {
  if (bits.size() != features_) {
    throw ConfigError("mask length " + std::to_string(bits.size()) +
                      " does not match surrogate with " +
                      std::to_string(features_) + " features");
  }
  if (IsLinear(kind_)) {
    double y = intercept_;
    for (size_t j = 0; j < features_; ++j) {
      if (bits[j]) y += coefficients_[j];
    }
    return y;
  }
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.Predict(bits);
  return base_ + scale_ * sum;
}

double SurrogateModel::Toggle(std::span<const uint8_t> bits, size_t j) const {
  if (IsLinear(kind_)) return coefficients_.at(j);
  std::vector<uint8_t> on(bits.begin(), bits.end());
  std::vector<uint8_t> off = on;
  on.at(j) = 1;
  off[j] = 0;
  return Predict(on) - Predict(off);
}

SurrogateModel SurrogateModel::Linear(SurrogateKind kind, double intercept,
                                      std::vector<double> coefficients) {
  if (!IsLinear(kind)) throw ConfigError("not a linear surrogate kind");
  SurrogateModel model;
  model.kind_ = kind;
  model.features_ = coefficients.size();
  model.intercept_ = intercept;
  model.coefficients_ = std::move(coefficients);
  return model;
}

SurrogateModel SurrogateModel::Trees(SurrogateKind kind, size_t features,
                                     double base, double scale,
                                     std::vector<RegressionTree> trees) {
  if (IsLinear(kind)) throw ConfigError("not a tree surrogate kind");
  SurrogateModel model;
  model.kind_ = kind;
  model.features_ = features;
  model.base_ = base;
  model.scale_ = scale;
  model.trees_ = std::move(trees);
  return model;
}

// ---------------------------------------------------------------------------
// Fitting.

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Design {
  size_t n = 0;
  size_t m = 0;
  std::vector<std::vector<uint8_t>> rows;
  std::vector<double> y;
};

Design MakeDesign(const std::vector<PerturbationRecord>& records) {
  if (records.size() < 2) {
    throw DataError("surrogate fitting needs at least 2 records, got " +
                    std::to_string(records.size()));
  }
  Design d;
  d.n = records.size();
  d.m = records.front().mask.size();
  if (d.m == 0) throw DataError("surrogate fitting needs non-empty masks");
  bool distinct = false;
  for (const auto& r : records) {
    if (r.mask.size() != d.m) {
      throw DataError("records have masks of different lengths");
    }
    if (!std::isfinite(r.response)) {
      throw DataError("record response is not finite");
    }
    if (!(r.mask == records.front().mask)) distinct = true;
    d.rows.push_back(r.mask.bits());
    d.y.push_back(r.response);
  }
  if (!distinct) {
    throw NumericError("degenerate design: all perturbation masks are identical");
  }
  return d;
}

// Normal equations with an intercept column; `penalty` is added to the
// diagonal of the feature block only. A singular system falls back to the
// minimum-norm coefficients of the centred least-squares problem.
std::pair<double, std::vector<double>> SolveNormal(const Design& d,
                                                   double penalty) {
  const Eigen::Index p = static_cast<Eigen::Index>(d.m) + 1;
  Matrix a = Matrix::Zero(p, p);
  Vector b = Vector::Zero(p);
  Vector x(p);
  for (size_t i = 0; i < d.n; ++i) {
    x[0] = 1.0;
    for (size_t j = 0; j < d.m; ++j) x[j + 1] = d.rows[i][j];
    a.noalias() += x * x.transpose();
    b += d.y[i] * x;
  }
  for (Eigen::Index j = 1; j < p; ++j) a(j, j) += penalty;
  Eigen::LDLT<Matrix> ldlt(a);
  const Vector pivots = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-13 &&
      pivots.minCoeff() > 1e-12 * pivots.maxCoeff()) {
    const Vector beta = ldlt.solve(b);
    if (beta.allFinite()) {
      return {beta[0], std::vector<double>(beta.data() + 1, beta.data() + p)};
    }
  }
  const Eigen::Index m = p - 1;
  const double n = static_cast<double>(d.n);
  const Vector mean_x = a.col(0).tail(m) / n;
  const double mean_y = b[0] / n;
  const Matrix centred =
      a.bottomRightCorner(m, m) - n * mean_x * mean_x.transpose();
  const Vector rhs = b.tail(m) - n * mean_y * mean_x;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(centred);
  cod.setThreshold(1e-10);
  const Vector beta = cod.solve(rhs);
  if (!beta.allFinite()) {
    throw NumericError("surrogate normal equations could not be solved");
  }
  return {mean_y - mean_x.dot(beta),
          std::vector<double>(beta.data(), beta.data() + m)};
}

SurrogateModel FitElasticNet(const Design& d, const SurrogateHyper& hyper,
                             const std::vector<PerturbationRecord>& records,
                             std::vector<double>* trace) {
  const double lambda = hyper.elastic_lambda;
  const double rho = hyper.elastic_rho;
  if (lambda < 0.0 || rho < 0.0 || rho > 1.0) {
    throw ConfigError("elastic net needs lambda >= 0 and rho in [0, 1]");
  }
  const double n = static_cast<double>(d.n);
  std::vector<double> beta(d.m, 0.0);
  double intercept = 0.0;
  std::vector<double> residual = d.y;
  std::vector<double> ones(d.m, 0.0);
  for (const auto& row : d.rows) {
    for (size_t j = 0; j < d.m; ++j) ones[j] += row[j];
  }
  for (int sweep = 0; sweep < hyper.elastic_max_sweeps; ++sweep) {
    double shift = 0.0;
    for (double r : residual) shift += r;
    shift /= n;
    intercept += shift;
    for (double& r : residual) r -= shift;
    double largest_change = std::abs(shift);
    for (size_t j = 0; j < d.m; ++j) {
      double z = ones[j] * beta[j];
      for (size_t i = 0; i < d.n; ++i) {
        if (d.rows[i][j]) z += residual[i];
      }
      z /= n;
      const double threshold = lambda * rho;
      const double soft = z > threshold    ? z - threshold
                          : z < -threshold ? z + threshold
                                           : 0.0;
      const double denom = ones[j] / n + lambda * (1.0 - rho);
      const double updated = denom > 0.0 ? soft / denom : 0.0;
      const double delta = updated - beta[j];
      if (delta != 0.0) {
        for (size_t i = 0; i < d.n; ++i) {
          if (d.rows[i][j]) residual[i] -= delta;
        }
        beta[j] = updated;
      }
      largest_change = std::max(largest_change, std::abs(delta));
    }
    trace->push_back(
        ElasticNetObjective(records, intercept, beta, lambda, rho));
    if (largest_change < hyper.elastic_tol) break;
  }
  return SurrogateModel::Linear(SurrogateKind::kElasticNet, intercept,
                                std::move(beta));
}

// CART on binary features. Targets are per-sample; `pick` returns the
// candidate features at a node.
class TreeBuilder {
 public:
  TreeBuilder(const Design& d, std::span<const double> target, int max_depth,
              int min_leaf)
      : d_(d), target_(target), max_depth_(max_depth), min_leaf_(min_leaf) {}

  template <typename Pick>
  RegressionTree Build(std::vector<size_t> samples, Pick&& pick) {
    RegressionTree tree;
    tree.nodes.emplace_back();
    Grow(tree, 0, std::move(samples), 0, pick);
    return tree;
  }

 private:
  template <typename Pick>
  void Grow(RegressionTree& tree, int node, std::vector<size_t> samples,
            int depth, Pick& pick) {
    AnchoredMean mean;
    bool pure = true;
    for (size_t i : samples) {
      mean.Add(target_[i]);
      pure = pure && target_[i] == target_[samples.front()];
    }
    tree.nodes[node].value = mean.value();
    const size_t min_leaf = static_cast<size_t>(std::max(min_leaf_, 1));
    if (depth >= max_depth_ || pure || samples.size() < 2 * min_leaf) return;

    double total = 0.0;
    for (size_t i : samples) total += target_[i];
    const double n = static_cast<double>(samples.size());
    int best_feature = -1;
    double best_gain = 0.0;
    for (int j : pick()) {
      double ones_sum = 0.0;
      size_t ones = 0;
      for (size_t i : samples) {
        if (d_.rows[i][j]) {
          ones_sum += target_[i];
          ++ones;
        }
      }
      const size_t zeros = samples.size() - ones;
      if (ones < min_leaf || zeros < min_leaf) continue;
      const double zeros_sum = total - ones_sum;
      // Reduction of the sum of squared errors.
      const double gain = ones_sum * ones_sum / static_cast<double>(ones) +
                          zeros_sum * zeros_sum / static_cast<double>(zeros) -
                          total * total / n;
      if (gain > best_gain * (1.0 + 1e-12) + 1e-15) {
        best_gain = gain;
        best_feature = j;
      }
    }
    if (best_feature < 0) return;
    std::vector<size_t> left;
    std::vector<size_t> right;
    for (size_t i : samples) {
      (d_.rows[i][best_feature] ? right : left).push_back(i);
    }
    const int l = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[node].feature = best_feature;
    tree.nodes[node].left = l;
    tree.nodes[node].right = l + 1;
    Grow(tree, l, std::move(left), depth + 1, pick);
    Grow(tree, l + 1, std::move(right), depth + 1, pick);
  }

  const Design& d_;
  std::span<const double> target_;
  int max_depth_;
  int min_leaf_;
};

std::vector<int> AllFeatures(size_t m) {
  std::vector<int> f(m);
  for (size_t j = 0; j < m; ++j) f[j] = static_cast<int>(j);
  return f;
}

std::vector<size_t> AllSamples(size_t n) {
  std::vector<size_t> s(n);
  for (size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

// Second-order boosting tree for squared loss (unit hessians).
class BoostTreeBuilder {
 public:
  BoostTreeBuilder(const Design& d, std::span<const double> gradient,
                   int max_depth, double lambda)
      : d_(d), g_(gradient), max_depth_(max_depth), lambda_(lambda) {}

  RegressionTree Build() {
    RegressionTree tree;
    tree.nodes.emplace_back();
    Grow(tree, 0, AllSamples(d_.n), 0);
    return tree;
  }

 private:
  double Score(double g, double h) const { return g * g / (h + lambda_); }

  void Grow(RegressionTree& tree, int node, std::vector<size_t> samples,
            int depth) {
    double g = 0.0;
    for (size_t i : samples) g += g_[i];
    const double h = static_cast<double>(samples.size());
    tree.nodes[node].value = -g / (h + lambda_);
    if (depth >= max_depth_ || samples.size() < 2) return;
    int best_feature = -1;
    double best_gain = 0.0;
    for (size_t j = 0; j < d_.m; ++j) {
      double g1 = 0.0;
      size_t n1 = 0;
      for (size_t i : samples) {
        if (d_.rows[i][j]) {
          g1 += g_[i];
          ++n1;
        }
      }
      if (n1 == 0 || n1 == samples.size()) continue;
      const double h1 = static_cast<double>(n1);
      const double gain =
          0.5 * (Score(g1, h1) + Score(g - g1, h - h1) - Score(g, h));
      if (gain > best_gain * (1.0 + 1e-12) + 1e-15) {
        best_gain = gain;
        best_feature = static_cast<int>(j);
      }
    }
    if (best_feature < 0) return;
    std::vector<size_t> left;
    std::vector<size_t> right;
    for (size_t i : samples) {
      (d_.rows[i][best_feature] ? right : left).push_back(i);
    }
    const int l = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[node].feature = best_feature;
    tree.nodes[node].left = l;
    tree.nodes[node].right = l + 1;
    Grow(tree, l, std::move(left), depth + 1);
    Grow(tree, l + 1, std::move(right), depth + 1);
  }

  const Design& d_;
  std::span<const double> g_;
  int max_depth_;
  double lambda_;
};

}  // namespace

double ElasticNetObjective(const std::vector<PerturbationRecord>& records,
                           double intercept,
                           std::span<const double> coefficients,
                           double lambda, double rho) {
  double loss = 0.0;
  for (const auto& r : records) {
    double fit = intercept;
    for (size_t j = 0; j < coefficients.size(); ++j) {
      if (r.mask.kept(j)) fit += coefficients[j];
    }
    loss += (r.response - fit) * (r.response - fit);
  }
  double l1 = 0.0;
  double l2 = 0.0;
  for (double b : coefficients) {
    l1 += std::abs(b);
    l2 += b * b;
  }
  return 0.5 * loss / static_cast<double>(records.size()) +
         lambda * (rho * l1 + (1.0 - rho) * l2 / 2.0);
}

SurrogateModel FitSurrogate(const std::vector<PerturbationRecord>& records,
                            SurrogateKind kind, const SurrogateHyper& hyper,
                            uint64_t seed) {
  const Design d = MakeDesign(records);
  switch (kind) {
    case SurrogateKind::kLR: {
      auto [b0, beta] = SolveNormal(d, 0.0);
      return SurrogateModel::Linear(kind, b0, std::move(beta));
    }
    case SurrogateKind::kRidge: {
      if (hyper.ridge_lambda < 0.0) throw ConfigError("ridge lambda < 0");
      auto [b0, beta] = SolveNormal(d, hyper.ridge_lambda);
      return SurrogateModel::Linear(kind, b0, std::move(beta));
    }
    case SurrogateKind::kElasticNet: {
      std::vector<double> trace;
      SurrogateModel model = FitElasticNet(d, hyper, records, &trace);
      model.trace_ = std::move(trace);
      return model;
    }
    case SurrogateKind::kDT: {
      TreeBuilder builder(d, d.y, hyper.tree_max_depth, hyper.tree_min_leaf);
      const std::vector<int> features = AllFeatures(d.m);
      std::vector<RegressionTree> trees;
      trees.push_back(
          builder.Build(AllSamples(d.n), [&] { return features; }));
      return SurrogateModel::Trees(kind, d.m, 0.0, 1.0, std::move(trees));
    }
    case SurrogateKind::kRF: {
      if (hyper.forest_trees < 1) throw ConfigError("forest needs >= 1 tree");
      TreeBuilder builder(d, d.y, hyper.tree_max_depth, hyper.tree_min_leaf);
      const size_t mtry = static_cast<size_t>(
          std::ceil(std::sqrt(static_cast<double>(d.m))));
      std::vector<RegressionTree> trees;
      for (int t = 0; t < hyper.forest_trees; ++t) {
        Rng rng(DeriveSeed(seed, static_cast<uint64_t>(t)));
        std::vector<size_t> sample(d.n);
        for (auto& s : sample) s = rng.UniformIndex(d.n);
        std::vector<int> pool = AllFeatures(d.m);
        auto pick = [&] {
          // Partial Fisher-Yates: the first mtry entries form the subset.
          for (size_t i = 0; i < mtry; ++i) {
            std::swap(pool[i], pool[i + rng.UniformIndex(d.m - i)]);
          }
          return std::vector<int>(pool.begin(), pool.begin() + mtry);
        };
        trees.push_back(builder.Build(std::move(sample), pick));
      }
      const double scale = 1.0 / static_cast<double>(trees.size());
      return SurrogateModel::Trees(kind, d.m, 0.0, scale, std::move(trees));
    }
    case SurrogateKind::kXGB: {
      if (hyper.boost_trees < 1) throw ConfigError("boosting needs >= 1 tree");
      AnchoredMean mean;
      for (double y : d.y) mean.Add(y);
      const double base = mean.value();
      std::vector<double> prediction(d.n, base);
      std::vector<double> gradient(d.n);
      std::vector<RegressionTree> trees;
      for (int t = 0; t < hyper.boost_trees; ++t) {
        for (size_t i = 0; i < d.n; ++i) gradient[i] = prediction[i] - d.y[i];
        BoostTreeBuilder builder(d, gradient, hyper.boost_depth,
                                 hyper.boost_lambda);
        RegressionTree tree = builder.Build();
        for (size_t i = 0; i < d.n; ++i) {
          prediction[i] += hyper.boost_shrinkage * tree.Predict(d.rows[i]);
        }
        trees.push_back(std::move(tree));
      }
      return SurrogateModel::Trees(kind, d.m, base, hyper.boost_shrinkage,
                                   std::move(trees));
    }
  }
  throw ConfigError("unknown surrogate kind");
}

// ---------------------------------------------------------------------------
// Attributions.

std::vector<double> MeanToggle(const SurrogateModel& surrogate,
                               const std::vector<PerturbationRecord>& records) {
  const size_t m = surrogate.features();
  std::vector<AnchoredMean> means(m);
  for (const auto& r : records) {
    for (size_t j = 0; j < m; ++j) {
      means[j].Add(surrogate.Toggle(r.mask.bits(), j));
    }
  }
  std::vector<double> out(m);
  for (size_t j = 0; j < m; ++j) out[j] = means[j].value();
  return out;
}

AttributionMap ExtractAttributions(
    const SurrogateModel& surrogate,
    const std::vector<PerturbationRecord>& records,
    const std::vector<Superpoint>& superpoints, std::string instance_id,
    PerturbationStrategy strategy) {
  if (superpoints.size() != surrogate.features()) {
    throw ConfigError("surrogate has " + std::to_string(surrogate.features()) +
                      " features for " + std::to_string(superpoints.size()) +
                      " superpoints");
  }
  AttributionMap map;
  map.instance_id = std::move(instance_id);
  map.strategy = strategy;
  map.kind = surrogate.kind();
  map.weights = MeanToggle(surrogate, records);
  map.superpoints = superpoints;
  return map;
}

std::vector<double> ExactShapley(const SurrogateModel& surrogate) {
  const size_t m = surrogate.features();
  if (m > 20) {
    throw ConfigError("exact Shapley enumeration supports at most 20 "
                      "features, got " + std::to_string(m));
  }
  const size_t coalitions = size_t{1} << m;
  const bool linear = IsLinear(surrogate.kind());
  std::vector<double> value;
  if (!linear) {
    value.resize(coalitions);
    std::vector<uint8_t> bits(m);
    for (size_t s = 0; s < coalitions; ++s) {
      for (size_t j = 0; j < m; ++j) bits[j] = (s >> j) & 1;
      value[s] = surrogate.Predict(bits);
    }
  }
  // phi_j = mean over coalition sizes of the mean marginal contribution at
  // that size, which equals the usual |S|!(m-|S|-1)!/m! weighting.
  std::vector<double> phi(m);
  std::vector<AnchoredMean> level(m);
  for (size_t j = 0; j < m; ++j) {
    std::fill(level.begin(), level.end(), AnchoredMean());
    for (size_t s = 0; s < coalitions; ++s) {
      if ((s >> j) & 1) continue;
      const double marginal = linear ? surrogate.coefficients()[j]
                                     : value[s | (size_t{1} << j)] - value[s];
      level[std::popcount(s)].Add(marginal);
    }
    AnchoredMean overall;
    for (const auto& l : level) overall.Add(l.value());
    phi[j] = overall.value();
  }
  return phi;
}

// ---------------------------------------------------------------------------
// Serialization.

std::string AttributionMapToJson(const AttributionMap& map) {
  nlohmann::ordered_json j;
  j["instance_id"] = map.instance_id;
  j["strategy"] = StrategyName(map.strategy);
  j["kind"] = SurrogateKindName(map.kind);
  j["weights"] = map.weights;
  auto ranges = nlohmann::ordered_json::array();
  for (const auto& sp : map.superpoints) ranges.push_back({sp.lo, sp.hi});
  j["superpoint_ranges"] = std::move(ranges);
  return j.dump(2) + "\n";
}

AttributionMap AttributionMapFromJson(std::string_view text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    AttributionMap map;
    map.instance_id = j.at("instance_id").get<std::string>();
    map.strategy = ParseStrategy(j.at("strategy").get<std::string>());
    map.kind = ParseSurrogateKind(j.at("kind").get<std::string>());
    map.weights = j.at("weights").get<std::vector<double>>();
    const auto& ranges = j.at("superpoint_ranges");
    for (size_t i = 0; i < ranges.size(); ++i) {
      map.superpoints.push_back({i, ranges[i].at(0).get<size_t>(),
                                 ranges[i].at(1).get<size_t>()});
    }
    if (map.superpoints.size() != map.weights.size()) {
      throw DataError("attribution map has " +
                      std::to_string(map.weights.size()) + " weights for " +
                      std::to_string(map.superpoints.size()) +
                      " superpoint ranges");
    }
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed attribution map: ") + e.what());
  }
}

void SaveAttributionMap(const AttributionMap& map,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << AttributionMapToJson(map);
}

AttributionMap LoadAttributionMap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return AttributionMapFromJson(buffer.str());
}

}  // namespace pointexplainer
