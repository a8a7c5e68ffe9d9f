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


#include "pointexplainer/clinical.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pointexplainer/error.h"
#include "pointexplainer/parallel.h"
#include "pointexplainer/random.h"

namespace pointexplainer {
namespace {

std::optional<double> Ratio(size_t num, size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

bool IsPd(const ScoredSubject& s) {
  if (s.label == Label::kUnknown) {
    throw DataError("subject '" + s.subject_id + "' has no label");
  }
  return s.label == Label::kPD;
}

}  // namespace

ConfusionCounts Confusion(std::span<const ScoredSubject> scored,
                          double alpha) {
  ConfusionCounts c;
  for (const auto& s : scored) {
    const bool predicted = s.score >= alpha;
    if (IsPd(s)) {
      ++(predicted ? c.tp : c.fn);
    } else {
      ++(predicted ? c.fp : c.tn);
    }
  }
  return c;
}

MetricSet MetricsFromCounts(const ConfusionCounts& c) {
  MetricSet m;
  m.counts = c;
  m.accuracy = Ratio(c.tp + c.tn, c.total());
  m.sensitivity = Ratio(c.tp, c.tp + c.fn);
  m.specificity = Ratio(c.tn, c.tn + c.fp);
  m.precision = Ratio(c.tp, c.tp + c.fp);
  if (m.precision && m.sensitivity && *m.precision + *m.sensitivity > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.sensitivity /
           (*m.precision + *m.sensitivity);
  }
  return m;
}

MetricSet ClassificationMetrics(std::span<const ScoredSubject> scored,
                                double alpha) {
  if (scored.empty()) throw DataError("no scored subjects");
  return MetricsFromCounts(Confusion(scored, alpha));
}

std::vector<std::vector<std::string>> StratifiedKFold(
    const std::vector<SubjectLabel>& subjects, int k, uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");
  std::vector<std::vector<std::string>> folds(static_cast<size_t>(k));
  Rng rng(seed);
  size_t next = 0;
  for (Label label : {Label::kPD, Label::kHC}) {
    std::vector<std::string> ids;
    for (const auto& s : subjects) {
      if (s.label == label) ids.push_back(s.subject_id);
    }
    if (ids.size() < static_cast<size_t>(k)) {
      throw DataError("class " + std::string(LabelName(label)) + " has " +
                      std::to_string(ids.size()) + " subjects, fewer than " +
                      std::to_string(k) + " folds");
    }
    rng.Shuffle(ids);
    for (auto& id : ids) {
      folds[next].push_back(std::move(id));
      next = (next + 1) % folds.size();
    }
  }
  for (const auto& s : subjects) {
    if (s.label == Label::kUnknown) {
      throw DataError("subject '" + s.subject_id + "' has no label");
    }
  }
  return folds;
}

RocResult RocAuc(std::span<const ScoredSubject> scored) {
  std::vector<std::pair<double, bool>> items;
  size_t positives = 0;
  for (const auto& s : scored) {
    const bool pd = IsPd(s);
    positives += pd;
    items.emplace_back(s.score, pd);
  }
  const size_t negatives = items.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("ROC analysis needs both PD and HC subjects");
  }
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  RocResult roc;
  roc.curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  size_t tp = 0;
  size_t fp = 0;
  double area = 0.0;  // in units of positive x negative pairs
  for (size_t i = 0; i < items.size();) {
    const double threshold = items[i].first;
    size_t dtp = 0;
    size_t dfp = 0;
    for (; i < items.size() && items[i].first == threshold; ++i) {
      ++(items[i].second ? dtp : dfp);
    }
    area += static_cast<double>(dfp) * (static_cast<double>(tp) +
                                        0.5 * static_cast<double>(dtp));
    tp += dtp;
    fp += dfp;
    roc.curve.push_back({threshold,
                         static_cast<double>(fp) / static_cast<double>(negatives),
                         static_cast<double>(tp) / static_cast<double>(positives)});
  }
  roc.auc = area / (static_cast<double>(positives) *
                    static_cast<double>(negatives));
  return roc;
}

double TprAt(const RocResult& roc, double fpr) {
  double best = 0.0;
  const auto& c = roc.curve;
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i].fpr == fpr) best = std::max(best, c[i].tpr);
    if (i + 1 < c.size() && c[i].fpr < fpr && fpr < c[i + 1].fpr) {
      const double t = (fpr - c[i].fpr) / (c[i + 1].fpr - c[i].fpr);
      best = std::max(best, c[i].tpr + t * (c[i + 1].tpr - c[i].tpr));
    }
  }
  return best;
}

CalibrationResult Calibration(std::span<const ScoredSubject> scored,
                              int bins) {
  if (scored.empty()) throw DataError("no scored subjects");
  if (bins < 1) throw ConfigError("calibration needs at least one bin");
  std::vector<double> score_sum(static_cast<size_t>(bins), 0.0);
  std::vector<size_t> pd(static_cast<size_t>(bins), 0);
  std::vector<size_t> count(static_cast<size_t>(bins), 0);
  double brier = 0.0;
  for (const auto& s : scored) {
    const double y = IsPd(s) ? 1.0 : 0.0;
    brier += (s.score - y) * (s.score - y);
    const int b = std::clamp(static_cast<int>(std::floor(s.score * bins)), 0,
                             bins - 1);
    score_sum[b] += s.score;
    pd[b] += y > 0.0;
    ++count[b];
  }
  CalibrationResult out;
  out.brier = brier / static_cast<double>(scored.size());
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const double n = static_cast<double>(count[b]);
    out.curve.push_back(
        {b, score_sum[b] / n, static_cast<double>(pd[b]) / n, count[b]});
  }
  return out;
}

std::vector<NetBenefitPoint> DecisionCurve(
    std::span<const ScoredSubject> scored, std::span<const double> thresholds) {
  if (scored.empty()) throw DataError("no scored subjects");
  size_t positives = 0;
  for (const auto& s : scored) positives += IsPd(s);
  const double n = static_cast<double>(scored.size());
  const double prevalence = static_cast<double>(positives) / n;
  std::vector<NetBenefitPoint> out;
  for (double alpha : thresholds) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("decision-curve threshold must lie in (0, 1)");
    }
    const double odds = alpha / (1.0 - alpha);
    const ConfusionCounts c = Confusion(scored, alpha);
    out.push_back({alpha,
                   static_cast<double>(c.tp) / n -
                       static_cast<double>(c.fp) / n * odds,
                   prevalence - (1.0 - prevalence) * odds, 0.0});
  }
  return out;
}

std::vector<double> Grid(double lo, double hi, int count) {
  if (count < 2) throw ConfigError("grid needs at least two points");
  std::vector<double> out(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * i / (count - 1);
  }
  return out;
}

double Percentile(std::vector<double> values, double q) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double t = pos - static_cast<double>(lo);
  if (t == 0.0) return values[lo];
  return values[lo] + t * (values[hi] - values[lo]);
}

BootstrapBand BootstrapCi(const CurveStatistic& statistic,
                          const std::vector<ScoredSubject>& scored,
                          int resamples, double level, uint64_t seed,
                          int threads) {
  if (scored.size() < 2) throw DataError("bootstrap needs at least 2 subjects");
  if (resamples < 1) throw ConfigError("bootstrap needs at least 1 resample");
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("confidence level must lie in (0, 1)");
  }
  const auto full = statistic(scored);
  if (!full) throw NumericError("statistic undefined on the full sample");
  const size_t width = full->size();
  std::vector<std::vector<double>> draws(static_cast<size_t>(resamples));
  ParallelFor(draws.size(), threads, [&](size_t b) {
    Rng rng(DeriveSeed(seed, b));
    std::vector<ScoredSubject> sample(scored.size());
    for (int attempt = 0; attempt <= 10; ++attempt) {
      for (auto& s : sample) s = scored[rng.UniformIndex(scored.size())];
      auto value = statistic(sample);
      if (!value) continue;
      if (value->size() != width) {
        throw NumericError("statistic changed length across resamples");
      }
      draws[b] = std::move(*value);
      return;
    }
    throw NumericError("statistic undefined on bootstrap resample " +
                       std::to_string(b) + " after 10 redraws");
  });
  BootstrapBand band;
  band.estimate = *full;
  band.resamples = draws.size();
  const double tail = (1.0 - level) / 2.0;
  std::vector<double> column(draws.size());
  for (size_t j = 0; j < width; ++j) {
    double sum = 0.0;
    size_t finite = 0;
    for (size_t b = 0; b < draws.size(); ++b) {
      column[b] = draws[b][j];
      if (std::isfinite(column[b])) {
        sum += column[b];
        ++finite;
      }
    }
    band.mean.push_back(finite ? sum / static_cast<double>(finite)
                               : std::numeric_limits<double>::quiet_NaN());
    band.lo.push_back(Percentile(column, tail));
    band.hi.push_back(Percentile(column, 1.0 - tail));
  }
  return band;
}

}  // namespace pointexplainer
