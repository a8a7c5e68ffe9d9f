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


#include "pointexplainer/fidelity.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

#include "pointexplainer/error.h"
#include "pointexplainer/strings.h"

namespace pointexplainer {
namespace {

// Mean computed relative to the first value, so a constant input has an
// exactly constant mean and zero spread.
double ShiftedMean(std::span<const double> v) {
  double offset = 0.0;
  for (double x : v) offset += x - v[0];
  return v[0] + offset / static_cast<double>(v.size());
}

void CheckLengths(std::span<const double> a, std::span<const double> b,
                  size_t minimum) {
  if (a.size() != b.size()) {
    throw DataError("length mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  if (a.size() < minimum) {
    throw DataError("need at least " + std::to_string(minimum) + " entries");
  }
}

std::string MeanStd(const MetricSummary& s) {
  if (s.count == 0) return "n/a";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f +- %.4f", s.mean, s.std);
  return buffer;
}

}  // namespace

int Sign(double v) { return (v > 0.0) - (v < 0.0); }

double ProbabilityConsistency(double f_out, double g_out) {
  return std::abs(f_out - g_out);
}

int CategoryAlignment(double f_out, double g_out) {
  return Sign(f_out - 0.5) == Sign(g_out - 0.5) ? 1 : 0;
}

std::optional<double> Pearson(std::span<const double> x,
                              std::span<const double> y) {
  CheckLengths(x, y, 2);
  const double mx = ShiftedMean(x);
  const double my = ShiftedMean(y);
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (vx == 0.0 || vy == 0.0) return std::nullopt;
  return std::clamp(cov / std::sqrt(vx * vy), -1.0, 1.0);
}

std::optional<double> AttributionConsistency(std::span<const double> weights,
                                             std::span<const double> deltas) {
  CheckLengths(weights, deltas, 2);
  std::vector<double> a(weights.size());
  std::vector<double> b(deltas.size());
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = std::abs(weights[i]);
    b[i] = std::abs(deltas[i]);
  }
  return Pearson(a, b);
}

double DirectionAlignment(std::span<const double> weights,
                          std::span<const double> deltas) {
  CheckLengths(weights, deltas, 1);
  size_t agree = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (Sign(weights[i]) == Sign(deltas[i])) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(weights.size());
}

std::vector<double> DecisionDeltas(const DiagnosticModel& model,
                                   const PointCloud& cloud,
                                   const std::vector<Superpoint>& superpoints,
                                   PerturbationStrategy strategy,
                                   int threads) {
  const size_t m = superpoints.size();
  std::vector<PerturbationMask> masks;
  masks.reserve(m + 1);
  masks.push_back(PerturbationMask::AllOnes(m));
  for (size_t j = 0; j < m; ++j) masks.push_back(PerturbationMask::Without(m, j));
  const auto scored =
      LabelMasks(model, cloud, superpoints, masks, strategy, threads);
  std::vector<double> deltas(m);
  for (size_t j = 0; j < m; ++j) {
    deltas[j] = scored[0].response - scored[j + 1].response;
  }
  return deltas;
}

std::vector<double> DecisionDeltas(const MaskFunction& black_box, size_t m) {
  const double full = black_box(PerturbationMask::AllOnes(m));
  std::vector<double> deltas(m);
  for (size_t j = 0; j < m; ++j) {
    deltas[j] = full - black_box(PerturbationMask::Without(m, j));
  }
  return deltas;
}

InstanceFidelity EvaluateFidelity(std::string instance_id,
                                  PerturbationStrategy strategy,
                                  const SurrogateModel& surrogate,
                                  std::span<const double> weights,
                                  double f_out,
                                  std::span<const double> deltas) {
  InstanceFidelity out;
  out.instance_id = std::move(instance_id);
  out.kind = surrogate.kind();
  out.strategy = strategy;
  out.f_out = f_out;
  out.g_out = surrogate.Predict(PerturbationMask::AllOnes(surrogate.features()));
  out.pc = ProbabilityConsistency(out.f_out, out.g_out);
  out.ca = CategoryAlignment(out.f_out, out.g_out);
  out.ac = weights.size() >= 2 ? AttributionConsistency(weights, deltas)
                               : std::nullopt;
  out.da = DirectionAlignment(weights, deltas);
  return out;
}

MetricSummary Summarize(std::span<const double> values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = ShiftedMean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

std::vector<FidelityRow> FidelityReport(
    const std::vector<InstanceFidelity>& instances) {
  std::map<std::pair<PerturbationStrategy, SurrogateKind>,
           std::vector<const InstanceFidelity*>>
      groups;
  for (const auto& f : instances) groups[{f.strategy, f.kind}].push_back(&f);
  std::vector<FidelityRow> rows;
  for (const auto& [key, members] : groups) {
    FidelityRow row;
    row.strategy = key.first;
    row.kind = key.second;
    row.instances = members.size();
    std::vector<double> pc, ca, ac, da;
    for (const InstanceFidelity* f : members) {
      pc.push_back(f->pc);
      ca.push_back(f->ca);
      da.push_back(f->da);
      if (f->ac) {
        ac.push_back(*f->ac);
      } else {
        ++row.undefined_ac;
      }
    }
    row.pc = Summarize(pc);
    row.ca = Summarize(ca);
    row.ac = Summarize(ac);
    row.da = Summarize(da);
    rows.push_back(row);
  }
  return rows;
}

std::string FidelityReportCsv(const std::vector<FidelityRow>& rows) {
  std::ostringstream out;
  out << "kind,strategy,instances,pc_mean,pc_std,ca_mean,ca_std,ac_mean,"
         "ac_std,da_mean,da_std,undefined_ac\n";
  for (const auto& r : rows) {
    out << SurrogateKindName(r.kind) << ',' << StrategyName(r.strategy) << ','
        << r.instances;
    for (const MetricSummary* s : {&r.pc, &r.ca, &r.ac, &r.da}) {
      if (s->count == 0) {
        out << ",,";
      } else {
        out << ',' << FormatDouble(s->mean) << ',' << FormatDouble(s->std);
      }
    }
    out << ',' << r.undefined_ac << '\n';
  }
  return out.str();
}

std::string FidelityReportText(const std::vector<FidelityRow>& rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-11s %-14s %-18s %-18s %-18s %-18s\n",
                "kind", "strategy", "PC", "CA", "AC", "DA");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-11s %-14s %-18s %-18s %-18s %-18s\n",
                  std::string(SurrogateKindName(r.kind)).c_str(),
                  std::string(StrategyName(r.strategy)).c_str(),
                  MeanStd(r.pc).c_str(), MeanStd(r.ca).c_str(),
                  MeanStd(r.ac).c_str(), MeanStd(r.da).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace pointexplainer
