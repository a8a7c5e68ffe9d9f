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

// The black-box diagnostic model.
//
// A vanilla point-set network: a shared per-point MLP, a symmetric max-pool
// over the points of a patch and a small fully connected head producing two
// logits (index 0 = HC, index 1 = PD). Gradients are written by hand and gated
// by a central finite-difference check. A cloud-level decision is obtained by
// threshold voting over the sliding-window patches of the cloud.

#ifndef POINTEXPLAINER_CLASSIFIER_H_
#define POINTEXPLAINER_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pointexplainer/point.h"
#include "pointexplainer/point_cloud.h"
#include "pointexplainer/signal.h"

namespace pointexplainer {

enum class Activation { kRelu, kIdentity };

struct PointSetConfig {
  int input_channels = 3;
  std::vector<int> point_widths = {64, 128, 256};
  std::vector<int> head_widths = {128};
  // Applied on every hidden layer. kIdentity gives a linear-softmax model
  // (apart from the max-pool), used to validate the gradient code.
  Activation activation = Activation::kRelu;

  friend bool operator==(const PointSetConfig&,
                         const PointSetConfig&) = default;
};

// Dense layer stored inside the flat parameter vector: an in x out
// column-major weight block followed by `out` biases.
struct DenseLayer {
  int in = 0;
  int out = 0;
  size_t weight_offset = 0;
  size_t bias_offset = 0;
};

class PointSetModel {
 public:
  // Uniform fan-in initialisation U(-1/sqrt(in), 1/sqrt(in)) for weights and
  // biases, drawn in layer order from `seed`.
  PointSetModel(PointSetConfig config, uint64_t seed);
  // Wraps existing parameters (checkpoint loading). Throws on size mismatch.
  PointSetModel(PointSetConfig config, std::vector<double> parameters);

  const PointSetConfig& config() const { return config_; }
  const std::vector<DenseLayer>& point_layers() const { return point_layers_; }
  // Hidden head layers followed by the 2-way output layer.
  const std::vector<DenseLayer>& head_layers() const { return head_layers_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  size_t parameter_count() const { return params_.size(); }

  // Logits (HC, PD) for one normalised patch. Throws when the point channel
  // count differs from the configured input channels.
  std::array<double, 2> Logits(std::span<const AttributedPoint> points) const;

  // softmax(logits)[PD].
  double Predict(std::span<const AttributedPoint> points) const;

  // Mean cross-entropy over the batch; accumulates d(loss)/d(params) into
  // `gradient` (resized and zeroed first). `labels` holds 1 for PD, 0 for HC.
  // When `correct` is non-null it receives the number of patches whose
  // argmax matched the label.
  double LossAndGradient(
      std::span<const std::span<const AttributedPoint>> patches,
      std::span<const int> labels, std::vector<double>& gradient,
      int* correct = nullptr) const;

  // Cross-entropy of a single patch without gradients.
  double Loss(std::span<const AttributedPoint> points, int label) const;

 private:
  friend class GradientChecker;

  void Layout();

  PointSetConfig config_;
  std::vector<DenseLayer> point_layers_;
  std::vector<DenseLayer> head_layers_;
  std::vector<double> params_;
};

// Cross-entropy for a logit pair; numerically stable log-sum-exp.
double CrossEntropy(const std::array<double, 2>& logits, int label);

struct GradientCheckReport {
  double max_relative_error = 0.0;
  size_t checked = 0;
  // Parameters whose +-step evaluation flips a ReLU state or a max-pool
  // winner; the central difference there straddles a kink and is skipped.
  size_t skipped_kinks = 0;
};

// Central finite-difference check of every parameter's gradient for one
// patch, relative error |analytic - fd| / max(|analytic|, |fd|, 1e-8).
GradientCheckReport CheckGradient(const PointSetModel& model,
                                  std::span<const AttributedPoint> points,
                                  Label label, double step = 1e-4);

// Max relative error of CheckGradient.
double BackwardCheck(const PointSetModel& model,
                     std::span<const AttributedPoint> points, Label label,
                     double step = 1e-4);

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  int batch_size = 16;
  int epochs = 300;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t seed = 0;  // batch shuffling
};

// Cosine decay from `base` at epoch 0 to 0 at epoch `total`.
double CosineLearningRate(double base, int epoch, int total);

struct LabeledPatch {
  std::vector<AttributedPoint> points;  // normalised
  Label label = Label::kUnknown;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;  // NaN without validation patches
};

struct TrainResult {
  PointSetModel model;
  std::vector<EpochStats> curve;
};

// Mini-batch AdamW (decoupled weight decay) with cosine decay, one learning
// rate per epoch. Bit-reproducible for a given model seed and config seed.
// Throws a data Error unless both classes are present.
TrainResult Train(PointSetModel model, const std::vector<LabeledPatch>& train,
                  const TrainConfig& config,
                  const std::vector<LabeledPatch>* validation = nullptr);

// Fraction of probabilities >= alpha.
double VoteFraction(std::span<const double> probabilities, double alpha);

// PD iff the vote fraction is >= 0.5.
Label VoteLabel(double final_score);

struct DiagnosisResult {
  std::vector<double> patch_probabilities;
  double final_score = 0.0;
  Label label = Label::kHC;
  double threshold = 0.5;
};

// The cloud-level model F: patch segmentation, per-patch normalisation,
// per-patch prediction and threshold voting.
struct DiagnosticModel {
  PointSetModel network;
  size_t window = 256;
  size_t step = 64;
  double alpha = 0.5;

  DiagnosisResult Diagnose(const PointCloud& cloud) const;
  double Score(const PointCloud& cloud) const {
    return Diagnose(cloud).final_score;
  }
};

DiagnosisResult Diagnose(const PointSetModel& model, const PointCloud& cloud,
                         size_t window, size_t step, double alpha);

// Normalised patches of a cloud, ready for the network.
std::vector<std::vector<AttributedPoint>> NormalizedPatches(
    const PointCloud& cloud, size_t window, size_t step);

// Structured-text checkpoint: architecture plus the flat parameter array.
void SaveCheckpoint(const PointSetModel& model,
                    const std::filesystem::path& path);
PointSetModel LoadCheckpoint(const std::filesystem::path& path);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_CLASSIFIER_H_
