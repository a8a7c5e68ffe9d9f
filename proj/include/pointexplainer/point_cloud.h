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

// Point-cloud view of a drawing: construction from a signal, sliding-window
// patches, contiguous superpoints and the two superpoint perturbations.

#ifndef POINTEXPLAINER_POINT_CLOUD_H_
#define POINTEXPLAINER_POINT_CLOUD_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pointexplainer/point.h"
#include "pointexplainer/signal.h"

namespace pointexplainer {

enum class HeightFeature {
  kAzimuth,
  kAltitude,
  kPressure,
  kRadius,
  kVelocity,
  kAcceleration,
  kNone,  // z = 1 everywhere
};

std::string_view HeightFeatureName(HeightFeature feature);
// Throws a config Error for an unknown name.
HeightFeature ParseHeightFeature(std::string_view name);

enum class ColorMode {
  kNone,      // (x, y, z) only
  kDerived,   // (r, g, b) = (radius, velocity, acceleration)
  kConstant,  // (r, g, b) = (1, 1, 1); the six-channel ablation baseline
};

std::string_view ColorModeName(ColorMode mode);
ColorMode ParseColorMode(std::string_view name);

struct PointCloud {
  std::vector<AttributedPoint> points;  // drawing order
  HeightFeature height_feature = HeightFeature::kRadius;

  size_t size() const { return points.size(); }
  int channels() const { return points.empty() ? 3 : points[0].channels(); }
};

PointCloud BuildPointCloud(const HandDrawnSignal& signal,
                           HeightFeature height_feature,
                           ColorMode color = ColorMode::kNone);

struct Patch {
  size_t start_index = 0;
  std::vector<AttributedPoint> points;
};

// floor((n - w) / s) + 1, or 0 when w > n.
size_t PatchCount(size_t n, size_t window, size_t step);

// Windows of `window` consecutive points at offsets 0, step, 2*step, ...;
// points after the last full window are dropped. Throws when window > N or
// either argument is zero.
std::vector<Patch> SegmentPatches(const PointCloud& cloud, size_t window,
                                  size_t step);

struct Superpoint {
  size_t index = 0;
  size_t lo = 0;  // first point
  size_t hi = 0;  // one past the last point

  size_t size() const { return hi - lo; }
  friend bool operator==(const Superpoint&, const Superpoint&) = default;
};

// `count` contiguous ranges covering [0, n); the first n % count ranges hold
// one extra point.
std::vector<Superpoint> SegmentSuperpoints(size_t n, size_t count);
inline std::vector<Superpoint> SegmentSuperpoints(const PointCloud& cloud,
                                                  size_t count) {
  return SegmentSuperpoints(cloud.size(), count);
}

// Binary state per superpoint: 1 keeps the superpoint, 0 perturbs it.
class PerturbationMask {
 public:
  PerturbationMask() = default;
  explicit PerturbationMask(std::vector<uint8_t> bits)
      : bits_(std::move(bits)) {}

  static PerturbationMask AllOnes(size_t size) {
    return PerturbationMask(std::vector<uint8_t>(size, 1));
  }
  static PerturbationMask AllZeros(size_t size) {
    return PerturbationMask(std::vector<uint8_t>(size, 0));
  }
  // All ones except `index`.
  static PerturbationMask Without(size_t size, size_t index) {
    PerturbationMask mask = AllOnes(size);
    mask.bits_[index] = 0;
    return mask;
  }

  size_t size() const { return bits_.size(); }
  bool kept(size_t j) const { return bits_[j] != 0; }
  void set(size_t j, bool keep) { bits_[j] = keep ? 1 : 0; }
  bool all_ones() const;
  const std::vector<uint8_t>& bits() const { return bits_; }
  std::string ToString() const;

  friend bool operator==(const PerturbationMask&,
                         const PerturbationMask&) = default;

 private:
  std::vector<uint8_t> bits_;
};

enum class PerturbationStrategy {
  kCentroid,       // collapse (x, y, z) to the superpoint mean
  kHeightFlatten,  // keep (x, y), set z to the superpoint mean height
};

std::string_view StrategyName(PerturbationStrategy strategy);
PerturbationStrategy ParseStrategy(std::string_view name);

PointCloud PerturbCentroid(const PointCloud& cloud,
                           const std::vector<Superpoint>& superpoints,
                           const PerturbationMask& mask);
PointCloud PerturbHeightFlatten(const PointCloud& cloud,
                                const std::vector<Superpoint>& superpoints,
                                const PerturbationMask& mask);
PointCloud Perturb(PerturbationStrategy strategy, const PointCloud& cloud,
                   const std::vector<Superpoint>& superpoints,
                   const PerturbationMask& mask);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_POINT_CLOUD_H_
