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

// Ingestion of digitised hand-drawing recordings: CSV parsing, kinematic
// feature derivation and per-patch normalisation.

#ifndef POINTEXPLAINER_SIGNAL_H_
#define POINTEXPLAINER_SIGNAL_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pointexplainer/point.h"

namespace pointexplainer {

enum class Label { kPD, kHC, kUnknown };

std::string_view LabelName(Label label);
// Accepts "PD", "HC", "Unknown" (case-insensitive).
Label ParseLabel(std::string_view text);

// One tablet sample. Timestamps are milliseconds.
struct RawSample {
  double x = 0.0;
  double y = 0.0;
  double azimuth = 0.0;
  double altitude = 0.0;
  double pressure = 0.0;
  double timestamp = 0.0;
};

struct HandDrawnSignal {
  std::vector<RawSample> samples;
  // Derived kinematics, one entry per sample.
  std::vector<double> radius;
  std::vector<double> velocity;
  std::vector<double> acceleration;
  std::string subject_id;
  Label label = Label::kUnknown;

  size_t size() const { return samples.size(); }
};

enum class CsvSchema {
  // x,y,azimuth,altitude,pressure,timestamp; the header line is optional.
  kCanonical,
  // x;y;z;pressure;grip;timestamp;test_id as distributed with public spiral
  // corpora. z and test_id are dropped, grip angle becomes altitude.
  kSemicolonLegacy,
};

inline constexpr std::string_view kCanonicalHeader =
    "x,y,azimuth,altitude,pressure,timestamp";

// Parses one recording and derives its kinematics. Throws a data Error on an
// empty stream, a malformed row or a decreasing timestamp; row numbers in
// messages are 1-based and count data rows only.
HandDrawnSignal ParseSignal(std::istream& in, CsvSchema schema);

struct SidecarMetadata {
  std::string subject_id;
  Label label = Label::kUnknown;
};

// `key=value` lines; recognised keys are subject_id and label.
SidecarMetadata ParseSidecar(std::istream& in);

// Reads `path` and, when present, the sidecar next to it (same stem, ".meta"
// extension). Without a sidecar the subject id is the file stem.
HandDrawnSignal LoadSignal(const std::filesystem::path& path,
                           CsvSchema schema = CsvSchema::kCanonical);

// Writes the canonical CSV (with header) and the sidecar.
void WriteSignal(const HandDrawnSignal& signal,
                 const std::filesystem::path& csv_path);

// Fills radius (distance to the first sample), velocity and acceleration.
// velocity[0] = acceleration[0] = acceleration[1] = 0. A zero time step
// carries the previous velocity and acceleration forward.
HandDrawnSignal DeriveKinematics(HandDrawnSignal signal);

// Moves (x, y) to the centroid and scales to the unit circle; standardises
// every other channel to zero mean and unit variance. Degenerate inputs
// (coincident points, constant channel) map to zeros.
std::vector<AttributedPoint> NormalizePatch(
    std::vector<AttributedPoint> points);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_SIGNAL_H_
