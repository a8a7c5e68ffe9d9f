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

#ifndef POINTEXPLAINER_POINT_H_
#define POINTEXPLAINER_POINT_H_

#include <array>

namespace pointexplainer {

// One point of a drawing cloud: planar position, a height attribute and an
// optional colour triple carrying extra per-point features.
struct AttributedPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool has_color = false;
  std::array<double, 3> color{};

  int channels() const { return has_color ? 6 : 3; }

  // Channel c in (x, y, z, r, g, b) order.
  double channel(int c) const {
    switch (c) {
      case 0:
        return x;
      case 1:
        return y;
      case 2:
        return z;
      default:
        return color[c - 3];
    }
  }

  friend bool operator==(const AttributedPoint&,
                         const AttributedPoint&) = default;
};

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_POINT_H_
