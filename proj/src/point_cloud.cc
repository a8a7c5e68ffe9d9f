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

#include "pointexplainer/point_cloud.h"

#include <array>

#include "pointexplainer/error.h"
#include "pointexplainer/strings.h"

namespace pointexplainer {

namespace {

constexpr std::array<std::pair<HeightFeature, std::string_view>, 7>
    kHeightFeatureNames = {{
        {HeightFeature::kAzimuth, "azimuth"},
        {HeightFeature::kAltitude, "altitude"},
        {HeightFeature::kPressure, "pressure"},
        {HeightFeature::kRadius, "radius"},
        {HeightFeature::kVelocity, "velocity"},
        {HeightFeature::kAcceleration, "acceleration"},
        {HeightFeature::kNone, "none"},
    }};

double FeatureValue(const HandDrawnSignal& signal, size_t i,
                    HeightFeature feature) {
  const RawSample& s = signal.samples[i];
  switch (feature) {
    case HeightFeature::kAzimuth:
      return s.azimuth;
    case HeightFeature::kAltitude:
      return s.altitude;
    case HeightFeature::kPressure:
      return s.pressure;
    case HeightFeature::kRadius:
      return signal.radius[i];
    case HeightFeature::kVelocity:
      return signal.velocity[i];
    case HeightFeature::kAcceleration:
      return signal.acceleration[i];
    case HeightFeature::kNone:
      break;
  }
  return 1.0;
}

void CheckMask(const std::vector<Superpoint>& superpoints,
               const PerturbationMask& mask) {
  if (mask.size() != superpoints.size()) {
    throw ConfigError("mask length " + std::to_string(mask.size()) +
                      " does not match " + std::to_string(superpoints.size()) +
                      " superpoints");
  }
}

// Mean accumulated as an offset from the first value, so a constant segment
// returns that constant bit-exactly and re-collapsing is a no-op.
double SegmentMean(const PointCloud& cloud, const Superpoint& sp,
                   double AttributedPoint::*field) {
  const double anchor = cloud.points[sp.lo].*field;
  double offset = 0.0;
  for (size_t i = sp.lo; i < sp.hi; ++i) {
    offset += cloud.points[i].*field - anchor;
  }
  return anchor + offset / static_cast<double>(sp.size());
}

}  // namespace

std::string_view HeightFeatureName(HeightFeature feature) {
  for (const auto& [f, name] : kHeightFeatureNames) {
    if (f == feature) return name;
  }
  return "none";
}

HeightFeature ParseHeightFeature(std::string_view name) {
  const std::string lower = ToLower(Trim(name));
  for (const auto& [f, n] : kHeightFeatureNames) {
    if (n == lower) return f;
  }
  throw ConfigError("unknown height feature '" + std::string(name) + "'");
}

std::string_view ColorModeName(ColorMode mode) {
  switch (mode) {
    case ColorMode::kNone:
      return "none";
    case ColorMode::kDerived:
      return "derived";
    case ColorMode::kConstant:
      return "constant";
  }
  return "none";
}

ColorMode ParseColorMode(std::string_view name) {
  const std::string lower = ToLower(Trim(name));
  if (lower == "none" || lower == "off") return ColorMode::kNone;
  if (lower == "derived" || lower == "on") return ColorMode::kDerived;
  if (lower == "constant") return ColorMode::kConstant;
  throw ConfigError("unknown color mode '" + std::string(name) + "'");
}

PointCloud BuildPointCloud(const HandDrawnSignal& signal,
                           HeightFeature height_feature, ColorMode color) {
  const size_t n = signal.size();
  if (signal.radius.size() != n || signal.velocity.size() != n ||
      signal.acceleration.size() != n) {
    throw DataError("signal '" + signal.subject_id +
                    "' lacks derived kinematics");
  }
  PointCloud cloud;
  cloud.height_feature = height_feature;
  cloud.points.resize(n);
  for (size_t i = 0; i < n; ++i) {
    AttributedPoint& p = cloud.points[i];
    p.x = signal.samples[i].x;
    p.y = signal.samples[i].y;
    p.z = FeatureValue(signal, i, height_feature);
    switch (color) {
      case ColorMode::kNone:
        break;
      case ColorMode::kDerived:
        p.has_color = true;
        p.color = {signal.radius[i], signal.velocity[i],
                   signal.acceleration[i]};
        break;
      case ColorMode::kConstant:
        p.has_color = true;
        p.color = {1.0, 1.0, 1.0};
        break;
    }
  }
  return cloud;
}

size_t PatchCount(size_t n, size_t window, size_t step) {
  if (window == 0 || step == 0 || window > n) return 0;
  return (n - window) / step + 1;
}

std::vector<Patch> SegmentPatches(const PointCloud& cloud, size_t window,
                                  size_t step) {
  if (window == 0 || step == 0) {
    throw ConfigError("window and step sizes must be positive");
  }
  if (window > cloud.size()) {
    throw DataError("window size " + std::to_string(window) +
                    " exceeds point count " + std::to_string(cloud.size()));
  }
  const size_t count = PatchCount(cloud.size(), window, step);
  std::vector<Patch> patches(count);
  for (size_t j = 0; j < count; ++j) {
    patches[j].start_index = j * step;
    const auto first = cloud.points.begin() + j * step;
    patches[j].points.assign(first, first + window);
  }
  return patches;
}

std::vector<Superpoint> SegmentSuperpoints(size_t n, size_t count) {
  if (count == 0) throw ConfigError("superpoint count must be positive");
  if (count > n) {
    throw DataError("superpoint count " + std::to_string(count) +
                    " exceeds point count " + std::to_string(n));
  }
  const size_t base = n / count;
  const size_t extra = n % count;
  std::vector<Superpoint> superpoints(count);
  size_t lo = 0;
  for (size_t j = 0; j < count; ++j) {
    const size_t len = base + (j < extra ? 1 : 0);
    superpoints[j] = {j, lo, lo + len};
    lo += len;
  }
  return superpoints;
}

bool PerturbationMask::all_ones() const {
  for (uint8_t b : bits_) {
    if (b == 0) return false;
  }
  return true;
}

std::string PerturbationMask::ToString() const {
  std::string out;
  out.reserve(bits_.size());
  for (uint8_t b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

std::string_view StrategyName(PerturbationStrategy strategy) {
  return strategy == PerturbationStrategy::kCentroid ? "centroid"
                                                     : "height_flatten";
}

PerturbationStrategy ParseStrategy(std::string_view name) {
  const std::string lower = ToLower(Trim(name));
  if (lower == "centroid") return PerturbationStrategy::kCentroid;
  if (lower == "height_flatten" || lower == "heightflatten") {
    return PerturbationStrategy::kHeightFlatten;
  }
  throw ConfigError("unknown perturbation strategy '" + std::string(name) +
                    "'");
}

PointCloud PerturbCentroid(const PointCloud& cloud,
                           const std::vector<Superpoint>& superpoints,
                           const PerturbationMask& mask) {
  CheckMask(superpoints, mask);
  PointCloud out = cloud;
  for (const Superpoint& sp : superpoints) {
    if (mask.kept(sp.index) || sp.size() == 0) continue;
    const double mx = SegmentMean(cloud, sp, &AttributedPoint::x);
    const double my = SegmentMean(cloud, sp, &AttributedPoint::y);
    const double mz = SegmentMean(cloud, sp, &AttributedPoint::z);
    for (size_t i = sp.lo; i < sp.hi; ++i) {
      out.points[i].x = mx;
      out.points[i].y = my;
      out.points[i].z = mz;
    }
  }
  return out;
}

PointCloud PerturbHeightFlatten(const PointCloud& cloud,
                                const std::vector<Superpoint>& superpoints,
                                const PerturbationMask& mask) {
  CheckMask(superpoints, mask);
  PointCloud out = cloud;
  for (const Superpoint& sp : superpoints) {
    if (mask.kept(sp.index) || sp.size() == 0) continue;
    const double mz = SegmentMean(cloud, sp, &AttributedPoint::z);
    for (size_t i = sp.lo; i < sp.hi; ++i) out.points[i].z = mz;
  }
  return out;
}

PointCloud Perturb(PerturbationStrategy strategy, const PointCloud& cloud,
                   const std::vector<Superpoint>& superpoints,
                   const PerturbationMask& mask) {
  return strategy == PerturbationStrategy::kCentroid
             ? PerturbCentroid(cloud, superpoints, mask)
             : PerturbHeightFlatten(cloud, superpoints, mask);
}

}  // namespace pointexplainer
