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


#include "pointexplainer/render.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pointexplainer/error.h"

namespace pointexplainer {
namespace {

constexpr std::array<double, 3> kBlue = {59, 76, 192};
constexpr std::array<double, 3> kMid = {242, 242, 242};
constexpr std::array<double, 3> kRed = {180, 4, 38};

std::string Hex(const std::array<uint8_t, 3>& c) {
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", c[0], c[1], c[2]);
  return buffer;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<double> PointAttributions(size_t n,
                                      const std::vector<Superpoint>& superpoints,
                                      std::span<const double> weights,
                                      int window) {
  if (window < 1) throw ConfigError("smoothing window must be >= 1");
  if (weights.size() != superpoints.size()) {
    throw DataError("attribution has " + std::to_string(weights.size()) +
                    " weights for " + std::to_string(superpoints.size()) +
                    " superpoints");
  }
  std::vector<double> raw(n, 0.0);
  std::vector<bool> covered(n, false);
  for (size_t j = 0; j < superpoints.size(); ++j) {
    if (superpoints[j].hi > n || superpoints[j].lo > superpoints[j].hi) {
      throw DataError("superpoint range exceeds the trajectory");
    }
    for (size_t i = superpoints[j].lo; i < superpoints[j].hi; ++i) {
      raw[i] = weights[j];
      covered[i] = true;
    }
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    throw DataError("superpoints do not cover the trajectory");
  }
  const size_t half = static_cast<size_t>(window) / 2;
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i >= half ? i - half : 0;
    const size_t hi = std::min(n, i + half + 1);
    // Weights are piecewise constant; anchoring on raw[i] keeps a constant
    // window exact.
    double offset = 0.0;
    for (size_t k = lo; k < hi; ++k) offset += raw[k] - raw[i];
    out[i] = raw[i] + offset / static_cast<double>(hi - lo);
  }
  return out;
}

std::array<uint8_t, 3> DivergingColor(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, -1.0, 1.0);
  const auto& end = t < 0.0 ? kBlue : kRed;
  const double a = std::abs(t);
  std::array<uint8_t, 3> out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<uint8_t>(std::lround(kMid[c] + a * (end[c] - kMid[c])));
  }
  return out;
}

std::string RenderAttributionSvg(std::span<const std::array<double, 2>> xy,
                                 const AttributionMap& map,
                                 const SvgOptions& options) {
  const size_t n = xy.size();
  if (n < 2) throw DataError("trajectory needs at least two points");
  const std::vector<double> value = PointAttributions(
      n, map.superpoints, map.weights, options.smoothing_window);
  double range = 0.0;
  for (double w : map.weights) range = std::max(range, std::abs(w));

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x, max_x = -min_x, max_y = -min_x;
  for (const auto& p : xy) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  const double inner = options.size - 2.0 * options.margin;
  const double extent = std::max({max_x - min_x, max_y - min_y, 1e-12});
  const double scale = inner / extent;
  const double ox = options.margin + (inner - (max_x - min_x) * scale) / 2.0;
  const double oy = options.margin + (inner - (max_y - min_y) * scale) / 2.0;
  auto point = [&](size_t i) {
    char buffer[48];
    // SVG y grows downwards.
    std::snprintf(buffer, sizeof(buffer), "%.2f,%.2f",
                  ox + (xy[i][0] - min_x) * scale,
                  oy + (max_y - xy[i][1]) * scale);
    return std::string(buffer);
  };
  auto color = [&](size_t i) {
    return Hex(DivergingColor(range > 0.0 ? value[i] / range : 0.0));
  };

  std::string svg;
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                options.size, options.size, options.size, options.size);
  svg += buffer;
  svg += "<title>" + Escape(map.instance_id) + " " +
         std::string(SurrogateKindName(map.kind)) + " " +
         std::string(StrategyName(map.strategy)) + "</title>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  std::snprintf(buffer, sizeof(buffer),
                "<g fill=\"none\" stroke-width=\"%.2f\" "
                "stroke-linecap=\"round\" stroke-linejoin=\"round\">\n",
                options.stroke_width);
  svg += buffer;
  // Segment i joins points i and i + 1 and takes the colour of point i.
  size_t start = 0;
  while (start + 1 < n) {
    const std::string c = color(start);
    size_t end = start + 1;
    while (end + 1 < n && color(end) == c) ++end;
    svg += "<polyline stroke=\"" + c + "\" points=\"";
    for (size_t i = start; i <= end; ++i) {
      if (i > start) svg += ' ';
      svg += point(i);
    }
    svg += "\"/>\n";
    start = end;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace pointexplainer
