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


// SVG rendering of attribution maps over the drawn trajectory.

#ifndef POINTEXPLAINER_RENDER_H_
#define POINTEXPLAINER_RENDER_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pointexplainer/point_cloud.h"
#include "pointexplainer/surrogate.h"

namespace pointexplainer {

// Each of the n points takes its superpoint's weight; a centred moving
// average over `window` points (shrunk at both ends) then smooths the
// boundaries. Throws a config Error for window < 1.
std::vector<double> PointAttributions(size_t n,
                                      const std::vector<Superpoint>& superpoints,
                                      std::span<const double> weights,
                                      int window);

// Diverging blue-white-red map; t is clamped to [-1, 1], 0 is the midpoint.
std::array<uint8_t, 3> DivergingColor(double t);

struct SvgOptions {
  int size = 640;  // square canvas, pixels
  int margin = 32;
  double stroke_width = 2.5;
  int smoothing_window = 15;
};

// The (x, y) trajectory as polylines coloured by smoothed per-point
// attribution on the symmetric range +-max|w|. Runs of equal colour share one
// polyline. Throws a data Error when the map does not cover the trajectory.
std::string RenderAttributionSvg(std::span<const std::array<double, 2>> xy,
                                 const AttributionMap& map,
                                 const SvgOptions& options = {});

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_RENDER_H_
