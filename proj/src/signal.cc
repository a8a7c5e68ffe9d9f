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

#include "pointexplainer/signal.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pointexplainer/error.h"
#include "pointexplainer/strings.h"

namespace pointexplainer {

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kPD:
      return "PD";
    case Label::kHC:
      return "HC";
    case Label::kUnknown:
      break;
  }
  return "Unknown";
}

Label ParseLabel(std::string_view text) {
  const std::string lower = ToLower(Trim(text));
  if (lower == "pd") return Label::kPD;
  if (lower == "hc") return Label::kHC;
  if (lower == "unknown" || lower.empty()) return Label::kUnknown;
  throw DataError("unknown label '" + std::string(text) + "'");
}

namespace {

std::string RowError(size_t row, const std::string& what) {
  return what + " at row " + std::to_string(row);
}

std::vector<double> ParseFields(std::string_view line, char delimiter,
                                size_t expected, size_t row) {
  const auto parts = Split(line, delimiter);
  if (parts.size() != expected) {
    throw DataError(RowError(row, "malformed row: expected " +
                                      std::to_string(expected) +
                                      " columns, got " +
                                      std::to_string(parts.size())));
  }
  std::vector<double> values;
  values.reserve(expected);
  for (const auto part : parts) {
    const auto value = ParseDouble(part);
    if (!value || !std::isfinite(*value)) {
      throw DataError(RowError(row, "malformed row: bad number '" +
                                        std::string(Trim(part)) + "'"));
    }
    values.push_back(*value);
  }
  return values;
}

}  // namespace

HandDrawnSignal ParseSignal(std::istream& in, CsvSchema schema) {
  HandDrawnSignal signal;
  std::string line;
  size_t row = 0;
  bool first_line = true;
  while (std::getline(in, line)) {
    const std::string_view text = Trim(line);
    if (text.empty()) continue;
    if (first_line) {
      first_line = false;
      if (schema == CsvSchema::kCanonical && ToLower(text) == kCanonicalHeader) {
        continue;
      }
      // Legacy files occasionally carry a textual header; skip it when the
      // first field is not numeric.
      if (schema == CsvSchema::kSemicolonLegacy &&
          !ParseDouble(Split(text, ';').front())) {
        continue;
      }
    }
    ++row;
    RawSample sample;
    if (schema == CsvSchema::kCanonical) {
      const auto v = ParseFields(text, ',', 6, row);
      sample = {v[0], v[1], v[2], v[3], v[4], v[5]};
    } else {
      const auto v = ParseFields(text, ';', 7, row);
      // x;y;z;pressure;grip;timestamp;test_id
      sample.x = v[0];
      sample.y = v[1];
      sample.pressure = v[3];
      sample.altitude = v[4];
      sample.timestamp = v[5];
    }
    if (!signal.samples.empty() &&
        sample.timestamp < signal.samples.back().timestamp) {
      throw DataError(RowError(row, "decreasing timestamp"));
    }
    signal.samples.push_back(sample);
  }
  if (signal.samples.empty()) throw DataError("empty stream");
  return DeriveKinematics(std::move(signal));
}

SidecarMetadata ParseSidecar(std::istream& in) {
  SidecarMetadata meta;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("sidecar line without '=': " + std::string(text));
    }
    const std::string key = ToLower(Trim(text.substr(0, eq)));
    const std::string_view value = Trim(text.substr(eq + 1));
    if (key == "subject_id") {
      meta.subject_id = std::string(value);
    } else if (key == "label") {
      meta.label = ParseLabel(value);
    }
  }
  return meta;
}

HandDrawnSignal LoadSignal(const std::filesystem::path& path,
                           CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  HandDrawnSignal signal;
  try {
    signal = ParseSignal(in, schema);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  signal.subject_id = path.stem().string();
  std::filesystem::path meta_path = path;
  meta_path.replace_extension(".meta");
  if (std::ifstream meta_in(meta_path); meta_in) {
    const SidecarMetadata meta = ParseSidecar(meta_in);
    if (!meta.subject_id.empty()) signal.subject_id = meta.subject_id;
    signal.label = meta.label;
  }
  return signal;
}

void WriteSignal(const HandDrawnSignal& signal,
                 const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + csv_path.string());
  out << kCanonicalHeader << '\n';
  for (const RawSample& s : signal.samples) {
    out << FormatDouble(s.x) << ',' << FormatDouble(s.y) << ','
        << FormatDouble(s.azimuth) << ',' << FormatDouble(s.altitude) << ','
        << FormatDouble(s.pressure) << ',' << FormatDouble(s.timestamp)
        << '\n';
  }
  if (!out) throw DataError("write failed: " + csv_path.string());

  std::filesystem::path meta_path = csv_path;
  meta_path.replace_extension(".meta");
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) throw DataError("cannot write " + meta_path.string());
  meta << "subject_id=" << signal.subject_id << '\n'
       << "label=" << LabelName(signal.label) << '\n';
}

HandDrawnSignal DeriveKinematics(HandDrawnSignal signal) {
  const size_t n = signal.samples.size();
  signal.radius.assign(n, 0.0);
  signal.velocity.assign(n, 0.0);
  signal.acceleration.assign(n, 0.0);
  if (n == 0) return signal;
  const RawSample& origin = signal.samples.front();
  for (size_t i = 1; i < n; ++i) {
    const RawSample& cur = signal.samples[i];
    const RawSample& prev = signal.samples[i - 1];
    signal.radius[i] = std::hypot(cur.x - origin.x, cur.y - origin.y);
    const double dt = cur.timestamp - prev.timestamp;
    if (dt > 0.0) {
      signal.velocity[i] = std::hypot(cur.x - prev.x, cur.y - prev.y) / dt;
      // velocity[0] is a pinned convention, not a measurement, so the first
      // measurable acceleration is at i = 2.
      signal.acceleration[i] =
          i >= 2 ? (signal.velocity[i] - signal.velocity[i - 1]) / dt : 0.0;
    } else {
      signal.velocity[i] = signal.velocity[i - 1];
      signal.acceleration[i] = signal.acceleration[i - 1];
    }
  }
  return signal;
}

std::vector<AttributedPoint> NormalizePatch(
    std::vector<AttributedPoint> points) {
  const size_t n = points.size();
  if (n == 0) return points;
  const double inv_n = 1.0 / static_cast<double>(n);

  double cx = 0.0;
  double cy = 0.0;
  for (const auto& p : points) {
    cx += p.x;
    cy += p.y;
  }
  cx *= inv_n;
  cy *= inv_n;
  double max_dist = 0.0;
  for (auto& p : points) {
    p.x -= cx;
    p.y -= cy;
    max_dist = std::max(max_dist, std::hypot(p.x, p.y));
  }
  for (auto& p : points) {
    if (max_dist > 0.0) {
      p.x /= max_dist;
      p.y /= max_dist;
    } else {
      p.x = 0.0;
      p.y = 0.0;
    }
  }

  auto standardize = [&](auto&& get) {
    double mean = 0.0;
    for (auto& p : points) mean += get(p);
    mean *= inv_n;
    double var = 0.0;
    for (auto& p : points) {
      const double d = get(p) - mean;
      var += d * d;
    }
    var *= inv_n;
    const double sd = std::sqrt(var);
    for (auto& p : points) {
      double& v = get(p);
      v = sd > 0.0 ? (v - mean) / sd : 0.0;
    }
  };
  standardize([](AttributedPoint& p) -> double& { return p.z; });
  if (points.front().has_color) {
    for (int c = 0; c < 3; ++c) {
      standardize([c](AttributedPoint& p) -> double& { return p.color[c]; });
    }
  }
  return points;
}

}  // namespace pointexplainer
