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

#include "pointexplainer/classifier.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "pointexplainer/error.h"
#include "pointexplainer/random.h"

namespace pointexplainer {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using ConstVectorMap = Eigen::Map<const Vector>;
using MatrixMap = Eigen::Map<Matrix>;
using VectorMap = Eigen::Map<Vector>;

constexpr int kNumClasses = 2;
constexpr int kCheckpointVersion = 1;

ConstMatrixMap Weight(std::span<const double> params, const DenseLayer& l) {
  return ConstMatrixMap(params.data() + l.weight_offset, l.in, l.out);
}
ConstVectorMap Bias(std::span<const double> params, const DenseLayer& l) {
  return ConstVectorMap(params.data() + l.bias_offset, l.out);
}

template <typename Derived>
void Activate(Eigen::MatrixBase<Derived>& m, Activation activation) {
  if (activation == Activation::kRelu) m = m.cwiseMax(0.0);
}

// Zeroes gradient entries whose unit was inactive in the forward pass.
template <typename Grad, typename Post>
void MaskInactive(Grad& grad, const Post& post, Activation activation) {
  if (activation == Activation::kRelu) {
    grad = (post.array() > 0.0).select(grad, 0.0);
  }
}

Matrix PointsToMatrix(std::span<const AttributedPoint> points, int channels) {
  Matrix x(static_cast<Eigen::Index>(points.size()), channels);
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].channels() != channels) {
      throw ConfigError("patch has " + std::to_string(points[i].channels()) +
                        " channels, model expects " +
                        std::to_string(channels));
    }
    for (int c = 0; c < channels; ++c) {
      x(static_cast<Eigen::Index>(i), c) = points[i].channel(c);
    }
  }
  return x;
}

double LogSumExp2(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

double CrossEntropy(const std::array<double, 2>& logits, int label) {
  return LogSumExp2(logits[0], logits[1]) - logits[label];
}

// ---------------------------------------------------------------------------
// PointSetModel

PointSetModel::PointSetModel(PointSetConfig config, uint64_t seed)
    : config_(std::move(config)) {
  Layout();
  Rng rng(seed);
  auto init = [&](const DenseLayer& l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    for (int i = 0; i < l.in * l.out; ++i) {
      params_[l.weight_offset + i] = rng.Uniform(-bound, bound);
    }
    for (int i = 0; i < l.out; ++i) {
      params_[l.bias_offset + i] = rng.Uniform(-bound, bound);
    }
  };
  for (const auto& l : point_layers_) init(l);
  for (const auto& l : head_layers_) init(l);
}

PointSetModel::PointSetModel(PointSetConfig config,
                             std::vector<double> parameters)
    : config_(std::move(config)) {
  Layout();
  if (parameters.size() != params_.size()) {
    throw DataError("checkpoint holds " + std::to_string(parameters.size()) +
                    " parameters, architecture needs " +
                    std::to_string(params_.size()));
  }
  params_ = std::move(parameters);
}

void PointSetModel::Layout() {
  if (config_.input_channels <= 0 || config_.point_widths.empty()) {
    throw ConfigError("point-set model needs input channels and point layers");
  }
  size_t offset = 0;
  auto add = [&](std::vector<DenseLayer>& layers, int in, int out) {
    if (out <= 0) throw ConfigError("layer widths must be positive");
    DenseLayer l{in, out, offset, offset + static_cast<size_t>(in) * out};
    offset = l.bias_offset + out;
    layers.push_back(l);
  };
  point_layers_.clear();
  head_layers_.clear();
  int in = config_.input_channels;
  for (int width : config_.point_widths) {
    add(point_layers_, in, width);
    in = width;
  }
  for (int width : config_.head_widths) {
    add(head_layers_, in, width);
    in = width;
  }
  add(head_layers_, in, kNumClasses);
  params_.assign(offset, 0.0);
}

std::array<double, 2> PointSetModel::Logits(
    std::span<const AttributedPoint> points) const {
  if (points.empty()) throw DataError("empty patch");
  Matrix h = PointsToMatrix(points, config_.input_channels);
  for (const auto& l : point_layers_) {
    Matrix a = h * Weight(params_, l);
    a.rowwise() += Bias(params_, l).transpose();
    Activate(a, config_.activation);
    h = std::move(a);
  }
  Vector g = h.colwise().maxCoeff().transpose();
  for (size_t k = 0; k < head_layers_.size(); ++k) {
    const auto& l = head_layers_[k];
    Vector z = Weight(params_, l).transpose() * g + Bias(params_, l);
    if (k + 1 < head_layers_.size()) Activate(z, config_.activation);
    g = std::move(z);
  }
  return {g[0], g[1]};
}

double PointSetModel::Predict(std::span<const AttributedPoint> points) const {
  const auto logits = Logits(points);
  // softmax(logits)[1] = 1 / (1 + exp(l0 - l1))
  return 1.0 / (1.0 + std::exp(logits[0] - logits[1]));
}

double PointSetModel::Loss(std::span<const AttributedPoint> points,
                           int label) const {
  return CrossEntropy(Logits(points), label);
}

double PointSetModel::LossAndGradient(
    std::span<const std::span<const AttributedPoint>> patches,
    std::span<const int> labels, std::vector<double>& gradient,
    int* correct) const {
  const size_t batch = patches.size();
  if (batch == 0 || labels.size() != batch) {
    throw ConfigError("batch and label sizes differ or are zero");
  }
  gradient.assign(params_.size(), 0.0);
  const Activation act = config_.activation;
  const size_t num_point = point_layers_.size();
  const size_t num_head = head_layers_.size();

  // Stack all points of the batch; per-point layers act row-wise.
  std::vector<Eigen::Index> offsets(batch + 1, 0);
  for (size_t b = 0; b < batch; ++b) {
    if (patches[b].empty()) throw DataError("empty patch");
    offsets[b + 1] = offsets[b] + static_cast<Eigen::Index>(patches[b].size());
  }
  std::vector<Matrix> post(num_point + 1);
  post[0].resize(offsets[batch], config_.input_channels);
  for (size_t b = 0; b < batch; ++b) {
    post[0].middleRows(offsets[b], offsets[b + 1] - offsets[b]) =
        PointsToMatrix(patches[b], config_.input_channels);
  }
  for (size_t l = 0; l < num_point; ++l) {
    const auto& layer = point_layers_[l];
    post[l + 1] = post[l] * Weight(params_, layer);
    post[l + 1].rowwise() += Bias(params_, layer).transpose();
    Activate(post[l + 1], act);
  }

  // Max-pool per patch, remembering the first arg-max row of each channel.
  const int pooled_width = point_layers_.back().out;
  Matrix pooled(batch, pooled_width);
  Eigen::MatrixXi argmax(batch, pooled_width);
  const Matrix& last = post[num_point];
  for (size_t b = 0; b < batch; ++b) {
    for (int c = 0; c < pooled_width; ++c) {
      Eigen::Index best = offsets[b];
      double value = last(best, c);
      for (Eigen::Index r = offsets[b] + 1; r < offsets[b + 1]; ++r) {
        if (last(r, c) > value) {
          value = last(r, c);
          best = r;
        }
      }
      pooled(b, c) = value;
      argmax(b, c) = static_cast<int>(best);
    }
  }

  std::vector<Matrix> head(num_head + 1);
  head[0] = pooled;
  for (size_t k = 0; k < num_head; ++k) {
    const auto& layer = head_layers_[k];
    head[k + 1] = head[k] * Weight(params_, layer);
    head[k + 1].rowwise() += Bias(params_, layer).transpose();
    if (k + 1 < num_head) Activate(head[k + 1], act);
  }

  // Softmax cross-entropy, averaged over the batch.
  const Matrix& logits = head[num_head];
  Matrix delta(batch, kNumClasses);
  double loss = 0.0;
  int hits = 0;
  const double scale = 1.0 / static_cast<double>(batch);
  for (size_t b = 0; b < batch; ++b) {
    const int y = labels[b];
    const double lse = LogSumExp2(logits(b, 0), logits(b, 1));
    loss += lse - logits(b, y);
    for (int c = 0; c < kNumClasses; ++c) {
      delta(b, c) = (std::exp(logits(b, c) - lse) - (c == y ? 1.0 : 0.0)) *
                    scale;
    }
    const int predicted = logits(b, 1) > logits(b, 0) ? 1 : 0;
    if (predicted == y) ++hits;
  }
  if (correct != nullptr) *correct = hits;

  for (size_t k = num_head; k-- > 0;) {
    const auto& layer = head_layers_[k];
    MatrixMap(gradient.data() + layer.weight_offset, layer.in, layer.out) +=
        head[k].transpose() * delta;
    VectorMap(gradient.data() + layer.bias_offset, layer.out) +=
        delta.colwise().sum().transpose();
    Matrix prev = delta * Weight(params_, layer).transpose();
    if (k > 0) MaskInactive(prev, head[k], act);
    delta = std::move(prev);
  }

  // Only arg-max rows receive gradient through the pool; restrict the
  // per-point backward pass to those rows.
  std::vector<int> rows(argmax.data(), argmax.data() + argmax.size());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  Matrix grad_rows = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                  pooled_width);
  for (size_t b = 0; b < batch; ++b) {
    for (int c = 0; c < pooled_width; ++c) {
      const auto it = std::lower_bound(rows.begin(), rows.end(), argmax(b, c));
      grad_rows(it - rows.begin(), c) += delta(b, c);
    }
  }
  for (size_t l = num_point; l-- > 0;) {
    const auto& layer = point_layers_[l];
    MaskInactive(grad_rows, post[l + 1](rows, Eigen::all), act);
    const Matrix input_rows = post[l](rows, Eigen::all);
    MatrixMap(gradient.data() + layer.weight_offset, layer.in, layer.out) +=
        input_rows.transpose() * grad_rows;
    VectorMap(gradient.data() + layer.bias_offset, layer.out) +=
        grad_rows.colwise().sum().transpose();
    if (l > 0) {
      Matrix prev = grad_rows * Weight(params_, layer).transpose();
      grad_rows = std::move(prev);
    }
  }
  return loss * scale;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check.
//
// Perturbing one parameter changes one unit of one layer. The checker caches
// a full forward pass and propagates only the change from the first affected
// unit onward, so the loss difference does not suffer the cancellation of
// subtracting two nearly equal losses. Every evaluation also reports whether
// any ReLU state or max-pool winner differs from the cached pass; a central
// difference across such a kink does not estimate the derivative.

namespace {

// Loss changes for a +step and a -step shift of one parameter.
struct Probe {
  double plus = 0.0;
  double minus = 0.0;
  bool kink = false;
};

// True when before + change or before - change has a different sign
// pattern than before.
template <typename A, typename B>
bool PatternChanged(const A& change, const B& before) {
  const auto b = before.array();
  const auto c = change.array();
  return (((b + c) > 0.0) != (b > 0.0)).any() ||
         (((b - c) > 0.0) != (b > 0.0)).any();
}

// First arg-max row of every column.
Eigen::VectorXi ColumnArgmax(const Matrix& m) {
  Eigen::VectorXi idx(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < m.rows(); ++r) {
      if (m(r, c) > m(best, c)) best = r;
    }
    idx[c] = static_cast<int>(best);
  }
  return idx;
}

}  // namespace

class GradientChecker {
 public:
  GradientChecker(const PointSetModel& model,
                  std::span<const AttributedPoint> points, int label)
      : model_(model),
        label_(label),
        relu_(model.config().activation == Activation::kRelu) {
    const auto& params = model_.params_;
    post_.push_back(PointsToMatrix(points, model_.config().input_channels));
    for (const auto& layer : model_.point_layers_) {
      Matrix a = post_.back() * Weight(params, layer);
      a.rowwise() += Bias(params, layer).transpose();
      pre_.push_back(a);
      if (relu_) a = a.cwiseMax(0.0);
      post_.push_back(std::move(a));
    }
    argmax_ = ColumnArgmax(post_.back());
    pooled_ = post_.back().colwise().maxCoeff().transpose();
    runner_up_.resize(argmax_.size());
    for (Eigen::Index j = 0; j < argmax_.size(); ++j) {
      double second = -std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < post_.back().rows(); ++r) {
        if (r != argmax_[j]) second = std::max(second, post_.back()(r, j));
      }
      runner_up_[j] = second;
    }
    if (model_.point_layers_.size() >= 2) {
      // pool_gain_(c * rows + r, :) is the first head pre-activation change
      // per unit change of row r in input column c of the last point layer.
      const size_t last = model_.point_layers_.size() - 1;
      const auto w = Weight(params, model_.point_layers_[last]);
      const Matrix head =
          Weight(params, model_.head_layers_.front()).transpose();
      const Eigen::Index rows = pre_[last].rows();
      pool_gain_.setZero(w.rows() * rows, head.rows());
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const Eigen::Index r = argmax_[j];
        if (relu_ && !(pre_[last](r, j) > 0.0)) continue;
        for (Eigen::Index c = 0; c < w.rows(); ++c) {
          pool_gain_.row(c * rows + r) += w(c, j) * head.col(j).transpose();
        }
      }
      min_abs_pre_ = pre_[last].cwiseAbs().colwise().minCoeff().transpose();
    }
    Vector h = pooled_;
    const auto& hl = model_.head_layers_;
    for (size_t k = 0; k < hl.size(); ++k) {
      Vector z = Weight(params, hl[k]).transpose() * h + Bias(params, hl[k]);
      head_pre_.push_back(z);
      if (relu_ && k + 1 < hl.size()) z = z.cwiseMax(0.0);
      head_input_.push_back(std::move(h));
      h = std::move(z);
    }
    const double top = std::max(h[0], h[1]);
    const double e0 = std::exp(h[0] - top);
    const double e1 = std::exp(h[1] - top);
    softmax_ = {e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  // Loss changes when parameter `index` is shifted by +-delta. Between
  // kinks the network is piecewise linear, so the logit change for -delta
  // is the exact negation of the one for +delta.
  Probe Shifted(size_t index, double delta) const {
    const auto& pl = model_.point_layers_;
    const auto& hl = model_.head_layers_;
    int row = -1;
    int col = 0;
    for (size_t l = 0; l < pl.size(); ++l) {
      if (Locate(pl[l], index, &row, &col)) {
        return PointUnit(l, row, col, delta);
      }
    }
    for (size_t k = 0; k < hl.size(); ++k) {
      if (Locate(hl[k], index, &row, &col)) {
        const double input = row < 0 ? 1.0 : head_input_[k][row];
        Vector dz = Vector::Zero(head_pre_[k].size());
        dz[col] = delta * input;
        Probe probe;
        FromHeadChange(k, std::move(dz), &probe);
        return probe;
      }
    }
    throw ConfigError("parameter index out of range");
  }

 private:
  // Maps a flat index to (row, col) of a layer; row = -1 for a bias.
  static bool Locate(const DenseLayer& l, size_t index, int* row, int* col) {
    if (index >= l.weight_offset && index < l.bias_offset) {
      const size_t local = index - l.weight_offset;
      *row = static_cast<int>(local % l.in);
      *col = static_cast<int>(local / l.in);
      return true;
    }
    if (index >= l.bias_offset && index < l.bias_offset + l.out) {
      *row = -1;
      *col = static_cast<int>(index - l.bias_offset);
      return true;
    }
    return false;
  }

  // Change of an activation given the change of its pre-activation, valid
  // while no unit crosses zero.
  template <typename D, typename P>
  typename D::PlainObject Gate(const D& change, const P& pre) const {
    if (!relu_) return change;
    return (pre.array() > 0.0).select(change, 0.0);
  }

  Probe PointUnit(size_t l, int row, int col, double delta) const {
    const auto& params = model_.params_;
    const auto& pl = model_.point_layers_;
    Probe probe;
    Vector dcol(pre_[l].rows());
    if (row < 0) {
      dcol.setConstant(delta);
    } else {
      dcol = delta * post_[l].col(row);
    }
    if (relu_) {
      probe.kink = PatternChanged(dcol, pre_[l].col(col));
    }
    const Vector change = Gate(dcol, pre_[l].col(col));
    if (l + 1 == pl.size()) {
      for (const double sign : {1.0, -1.0}) {
        const Vector column = post_[l + 1].col(col) + sign * change;
        Eigen::Index best = 0;
        for (Eigen::Index r = 1; r < column.size(); ++r) {
          if (column[r] > column[best]) best = r;
        }
        probe.kink = probe.kink || best != argmax_[col];
      }
      const auto w = Weight(params, model_.head_layers_.front());
      FromHeadChange(0, change[argmax_[col]] * w.row(col).transpose(), &probe);
      return probe;
    }
    if ((change.array() == 0.0).all()) return probe;
    if (l + 2 == pl.size()) return LastLayerRankOne(change, col, probe.kink);
    // Rank-one change of the next layer's pre-activations.
    Matrix dh = change * Weight(params, pl[l + 1]).row(col);
    for (size_t m = l + 1;; ++m) {
      if (relu_) {
        probe.kink = probe.kink || PatternChanged(dh, pre_[m]);
      }
      Matrix gated = Gate(dh, pre_[m]);
      if (m + 1 == pl.size()) {
        probe.kink = probe.kink ||
                     ColumnArgmax(post_[m + 1] + gated) != argmax_ ||
                     ColumnArgmax(post_[m + 1] - gated) != argmax_;
        dh = std::move(gated);
        break;
      }
      dh = gated * Weight(params, pl[m + 1]);
    }
    Vector dpooled(dh.cols());
    for (Eigen::Index j = 0; j < dh.cols(); ++j) dpooled[j] = dh(argmax_[j], j);
    const auto w = Weight(params, model_.head_layers_.front());
    FromHeadChange(0, w.transpose() * dpooled, &probe);
    return probe;
  }

  // Fused rank-one change, activation and max-pool of the final point layer
  // when only column `col` of its input changed.
  Probe LastLayerRankOne(const Vector& change, int col, bool kink) const {
    const size_t last = model_.point_layers_.size() - 1;
    const auto w = Weight(model_.params_, model_.point_layers_[last]);
    const Eigen::Index rows = pre_[last].rows();
    std::vector<Eigen::Index> touched;
    double largest = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (change[r] != 0.0) {
        touched.push_back(r);
        largest = std::max(largest, std::abs(change[r]));
      }
    }
    for (Eigen::Index j = 0; j < w.cols() && !kink; ++j) {
      // No value of channel j moves by more than `bound`.
      const double bound = largest * std::abs(w(col, j));
      if (pooled_[j] - runner_up_[j] > 2.0 * bound &&
          (!relu_ || min_abs_pre_[j] > bound)) {
        continue;
      }
      kink = ChannelKink(change, w(col, j), j, touched);
    }
    Probe probe;
    probe.kink = kink;
    if (kink) return probe;
    // Without a kink every pooled channel moves with its winning row only.
    Vector dz = Vector::Zero(pool_gain_.cols());
    for (Eigen::Index r : touched) {
      dz += change[r] * pool_gain_.row(col * rows + r).transpose();
    }
    FromHeadChange(0, std::move(dz), &probe);
    return probe;
  }

  // Exact test of channel j of the last point layer under a +-`weight` *
  // `change` shift of its pre-activations.
  bool ChannelKink(const Vector& change, double weight, Eigen::Index j,
                   const std::vector<Eigen::Index>& touched) const {
    const size_t last = model_.point_layers_.size() - 1;
    const Matrix& pre = pre_[last];
    const Matrix& post = post_[last + 1];
    const Eigen::Index winner = argmax_[j];
    for (const double sign : {1.0, -1.0}) {
      double best = pooled_[j];
      double challenger = -std::numeric_limits<double>::infinity();
      bool winner_touched = false;
      for (Eigen::Index r : touched) {
        const double before = pre(r, j);
        double v = before + sign * change[r] * weight;
        if (relu_) {
          if ((v > 0.0) != (before > 0.0)) return true;
          v = std::max(v, 0.0);
        }
        if (r == winner) {
          best = v;
          winner_touched = true;
        } else {
          challenger = std::max(challenger, v);
        }
      }
      if (challenger > best) return true;
      if (winner_touched && runner_up_[j] > best) {
        for (Eigen::Index r = 0; r < pre.rows(); ++r) {
          if (r != winner && change[r] == 0.0 && post(r, j) > best) {
            return true;
          }
        }
      }
    }
    return false;
  }

  // Loss changes given the change +-dz of head layer k's pre-activations.
  void FromHeadChange(size_t k, Vector dz, Probe* probe) const {
    bool* kink = &probe->kink;
    const auto& params = model_.params_;
    const auto& hl = model_.head_layers_;
    for (size_t m = k; m + 1 < hl.size(); ++m) {
      if (m + 2 == hl.size()) {
        // Last hidden layer straight into the logits.
        const auto w = Weight(params, hl[m + 1]);
        double d0 = 0.0;
        double d1 = 0.0;
        for (Eigen::Index i = 0; i < dz.size(); ++i) {
          if (dz[i] == 0.0) continue;
          const double before = head_pre_[m][i];
          if (relu_) {
            if ((before + dz[i] > 0.0) != (before > 0.0) ||
                (before - dz[i] > 0.0) != (before > 0.0)) {
              *kink = true;
            }
            if (!(before > 0.0)) continue;
          }
          d0 += dz[i] * w(i, 0);
          d1 += dz[i] * w(i, 1);
        }
        dz.resize(2);
        dz << d0, d1;
        break;
      }
      if (relu_) {
        *kink = *kink || PatternChanged(dz, head_pre_[m]);
      }
      const Vector gated = Gate(dz, head_pre_[m]);
      dz = Weight(params, hl[m + 1]).transpose() * gated;
    }
    probe->plus = LossChange(dz[0], dz[1]);
    probe->minus = LossChange(-dz[0], -dz[1]);
  }

  // CE(l + d) - CE(l) = log(sum_i p_i exp(d_i)) - d_label.
  double LossChange(double d0, double d1) const {
    const double mixed =
        softmax_[0] * std::expm1(d0) + softmax_[1] * std::expm1(d1);
    return std::log1p(mixed) - (label_ == 1 ? d1 : d0);
  }

  const PointSetModel& model_;
  int label_;
  bool relu_;
  std::vector<Matrix> pre_;   // per point layer
  std::vector<Matrix> post_;  // input followed by each point layer
  Eigen::VectorXi argmax_;
  Vector runner_up_;  // largest non-winning value of each pooled channel
  using RowMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix pool_gain_;
  Vector min_abs_pre_;  // per channel of the last point layer
  Vector pooled_;
  std::vector<Vector> head_pre_;
  std::vector<Vector> head_input_;
  std::array<double, 2> softmax_{};
};

GradientCheckReport CheckGradient(const PointSetModel& model,
                                  std::span<const AttributedPoint> points,
                                  Label label, double step) {
  if (label == Label::kUnknown) {
    throw ConfigError("gradient check needs a label");
  }
  const int y = label == Label::kPD ? 1 : 0;
  std::vector<double> analytic;
  const std::span<const AttributedPoint> patch = points;
  const int labels[] = {y};
  model.LossAndGradient(std::span(&patch, 1), labels, analytic);

  const GradientChecker checker(model, points, y);
  GradientCheckReport report;
  for (size_t i = 0; i < model.parameter_count(); ++i) {
    const Probe probe = checker.Shifted(i, step);
    if (probe.kink) {
      ++report.skipped_kinks;
      continue;
    }
    ++report.checked;
    const double numeric = (probe.plus - probe.minus) / (2.0 * step);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    const double err = std::abs(analytic[i] - numeric) / denom;
    if (!(err <= report.max_relative_error)) {
      report.max_relative_error = err;  // also propagates NaN
    }
  }
  return report;
}

double BackwardCheck(const PointSetModel& model,
                     std::span<const AttributedPoint> points, Label label,
                     double step) {
  return CheckGradient(model, points, label, step).max_relative_error;
}

// ---------------------------------------------------------------------------
// Training

double CosineLearningRate(double base, int epoch, int total) {
  if (total <= 0) return base;
  return base * 0.5 *
         (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch) /
                         static_cast<double>(total)));
}

namespace {

double Accuracy(const PointSetModel& model,
                const std::vector<LabeledPatch>& patches) {
  if (patches.empty()) return std::numeric_limits<double>::quiet_NaN();
  size_t hits = 0;
  for (const auto& p : patches) {
    const bool pd = model.Predict(p.points) >= 0.5;
    if (pd == (p.label == Label::kPD)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patches.size());
}

}  // namespace

TrainResult Train(PointSetModel model, const std::vector<LabeledPatch>& train,
                  const TrainConfig& config,
                  const std::vector<LabeledPatch>* validation) {
  if (config.epochs < 1 || config.batch_size < 1 ||
      !(config.learning_rate > 0.0) || config.weight_decay < 0.0) {
    throw ConfigError("invalid training configuration");
  }
  bool has_pd = false;
  bool has_hc = false;
  for (const auto& p : train) {
    if (p.label == Label::kPD) has_pd = true;
    if (p.label == Label::kHC) has_hc = true;
    if (p.label == Label::kUnknown) {
      throw DataError("training patch without label");
    }
  }
  if (!has_pd || !has_hc) {
    throw DataError("training data must contain both PD and HC patches");
  }

  const size_t n_params = model.parameter_count();
  std::vector<double> first_moment(n_params, 0.0);
  std::vector<double> second_moment(n_params, 0.0);
  std::vector<double> gradient;
  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);
  long long step = 0;

  TrainResult result{std::move(model), {}};
  PointSetModel& net = result.model;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr =
        CosineLearningRate(config.learning_rate, epoch, config.epochs);
    rng.Shuffle(order);
    double loss_sum = 0.0;
    size_t hits = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      std::vector<std::span<const AttributedPoint>> batch;
      std::vector<int> labels;
      for (size_t i = start; i < end; ++i) {
        batch.emplace_back(train[order[i]].points);
        labels.push_back(train[order[i]].label == Label::kPD ? 1 : 0);
      }
      int correct = 0;
      const double loss =
          net.LossAndGradient(batch, labels, gradient, &correct);
      loss_sum += loss * static_cast<double>(end - start);
      hits += static_cast<size_t>(correct);

      ++step;
      const double bias1 = 1.0 - std::pow(config.beta1, step);
      const double bias2 = 1.0 - std::pow(config.beta2, step);
      auto params = net.parameters();
      for (size_t i = 0; i < n_params; ++i) {
        params[i] *= 1.0 - lr * config.weight_decay;
        first_moment[i] =
            config.beta1 * first_moment[i] + (1.0 - config.beta1) * gradient[i];
        second_moment[i] = config.beta2 * second_moment[i] +
                           (1.0 - config.beta2) * gradient[i] * gradient[i];
        const double m_hat = first_moment[i] / bias1;
        const double v_hat = second_moment[i] / bias2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
      }
    }
    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.train_loss = loss_sum / static_cast<double>(train.size());
    stats.train_accuracy =
        static_cast<double>(hits) / static_cast<double>(train.size());
    stats.validation_accuracy =
        validation != nullptr ? Accuracy(net, *validation)
                              : std::numeric_limits<double>::quiet_NaN();
    result.curve.push_back(stats);
    if (!std::isfinite(stats.train_loss)) {
      throw NumericError("training diverged at epoch " +
                         std::to_string(epoch + 1));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Voting diagnosis

double VoteFraction(std::span<const double> probabilities, double alpha) {
  if (probabilities.empty()) throw DataError("no patch probabilities");
  size_t votes = 0;
  for (double p : probabilities) {
    if (p >= alpha) ++votes;
  }
  return static_cast<double>(votes) /
         static_cast<double>(probabilities.size());
}

Label VoteLabel(double final_score) {
  return final_score >= 0.5 ? Label::kPD : Label::kHC;
}

std::vector<std::vector<AttributedPoint>> NormalizedPatches(
    const PointCloud& cloud, size_t window, size_t step) {
  std::vector<Patch> patches = SegmentPatches(cloud, window, step);
  std::vector<std::vector<AttributedPoint>> out;
  out.reserve(patches.size());
  for (auto& p : patches) out.push_back(NormalizePatch(std::move(p.points)));
  return out;
}

DiagnosisResult Diagnose(const PointSetModel& model, const PointCloud& cloud,
                         size_t window, size_t step, double alpha) {
  DiagnosisResult result;
  result.threshold = alpha;
  for (const auto& patch : NormalizedPatches(cloud, window, step)) {
    result.patch_probabilities.push_back(model.Predict(patch));
  }
  result.final_score = VoteFraction(result.patch_probabilities, alpha);
  result.label = VoteLabel(result.final_score);
  return result;
}

DiagnosisResult DiagnosticModel::Diagnose(const PointCloud& cloud) const {
  return pointexplainer::Diagnose(network, cloud, window, step, alpha);
}

// ---------------------------------------------------------------------------
// Checkpoints

void SaveCheckpoint(const PointSetModel& model,
                    const std::filesystem::path& path) {
  const PointSetConfig& c = model.config();
  nlohmann::ordered_json j;
  j["format"] = "pointexplainer-checkpoint";
  j["version"] = kCheckpointVersion;
  j["architecture"] = {
      {"input_channels", c.input_channels},
      {"point_widths", c.point_widths},
      {"head_widths", c.head_widths},
      {"activation", c.activation == Activation::kRelu ? "relu" : "identity"},
  };
  const auto params = model.parameters();
  j["parameters"] = std::vector<double>(params.begin(), params.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

PointSetModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "pointexplainer-checkpoint") {
      throw DataError("not a checkpoint: " + path.string());
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version in " + path.string());
    }
    const auto& a = j.at("architecture");
    PointSetConfig config;
    config.input_channels = a.at("input_channels").get<int>();
    config.point_widths = a.at("point_widths").get<std::vector<int>>();
    config.head_widths = a.at("head_widths").get<std::vector<int>>();
    config.activation = a.at("activation").get<std::string>() == "identity"
                            ? Activation::kIdentity
                            : Activation::kRelu;
    return PointSetModel(config,
                         j.at("parameters").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace pointexplainer
