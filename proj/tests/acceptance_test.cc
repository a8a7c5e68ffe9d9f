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


// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "pointexplainer/classifier.h"
#include "pointexplainer/clinical.h"
#include "pointexplainer/config.h"
#include "pointexplainer/error.h"
#include "pointexplainer/fidelity.h"
#include "pointexplainer/pipeline.h"
#include "pointexplainer/point_cloud.h"
#include "pointexplainer/random.h"
#include "pointexplainer/strings.h"
#include "pointexplainer/surrogate.h"

namespace pe = pointexplainer;
namespace oracle = pointexplainer::testing_oracles;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kGradientTolerance = 1e-4;
constexpr int kGradientDraws = 100;
constexpr size_t kGradientPatchPoints = 32;
constexpr double kGradientBudgetSeconds = 30;

constexpr double kMinAccuracy = 0.90;
constexpr double kMinSensitivity = 0.85;
constexpr double kMinSpecificity = 0.85;
constexpr double kTrainBudgetSeconds = 600;

constexpr int kDesigns = 50;
constexpr double kRidgeTolerance = 1e-8;
constexpr double kElasticOlsTolerance = 1e-6;
constexpr double kTraceRelativeSlack = 1e-14;

constexpr int kShapleyFits = 20;
constexpr double kEfficiencyTolerance = 1e-9;

constexpr double kMetricTolerance = 1e-12;

constexpr double kClosedLoopPc = 1e-9;
constexpr double kClosedLoopAc = 1e-12;

constexpr double kMaxXgbPc = 0.10;
constexpr double kMinXgbCa = 0.95;
constexpr double kVerifyBudgetSeconds = 900;

constexpr size_t kMaxInvariantPoints = 64;

constexpr int kVoteVectors = 1000;

constexpr size_t kSweepInstances = 10;
constexpr size_t kSweepSizes[] = {25, 50, 100, 200};
constexpr size_t kSweepReference = 400;
constexpr double kSweepInversion = 0.005;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(Slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    rows.emplace_back();
    for (auto field : pe::Split(line, ',')) rows.back().emplace_back(field);
  }
  return rows;
}

// Column by header name.
std::map<std::string, size_t> Header(const std::vector<std::string>& row) {
  std::map<std::string, size_t> out;
  for (size_t i = 0; i < row.size(); ++i) out[row[i]] = i;
  return out;
}

std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[e.path().lexically_relative(root).generic_string()] = Slurp(e.path());
    }
  }
  return out;
}

fs::path Scratch(const std::string& name) {
  return fs::temp_directory_path() / ("pointexplainer_acceptance_" + name);
}

// Default configuration on a scratch run directory; trained once and shared
// by the criteria that need a fitted model.
class DefaultRun {
 public:
  const pe::RunConfig& config() {
    if (!ready_) {
      config_.run_dir = Scratch("default");
      fs::remove_all(config_.run_dir);
      const auto start = std::chrono::steady_clock::now();
      pe::CmdSynth(config_);
      pe::CmdTrain(config_);
      train_seconds_ = Seconds(start);
      ready_ = true;
    }
    return config_;
  }
  double train_seconds() {
    config();
    return train_seconds_;
  }

 private:
  pe::RunConfig config_;
  bool ready_ = false;
  double train_seconds_ = 0;
};

DefaultRun& Shared() {
  static DefaultRun run;
  return run;
}

std::vector<pe::AttributedPoint> RandomPatch(pe::Rng& rng, size_t n) {
  std::vector<pe::AttributedPoint> pts(n);
  for (auto& p : pts) p = {rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Normal()};
  return pts;
}

Outcome GradientCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  pe::Rng rng(101);
  const pe::PointSetModel model(pe::RunConfig{}.network(), 102);
  double worst = 0;
  for (int d = 0; d < kGradientDraws; ++d) {
    const auto patch = RandomPatch(rng, kGradientPatchPoints);
    const pe::Label label = rng.Bernoulli(0.5) ? pe::Label::kPD : pe::Label::kHC;
    worst = std::max(worst, pe::BackwardCheck(model, patch, label));
  }
  const double t = Seconds(start);
  return {worst < kGradientTolerance && t < kGradientBudgetSeconds,
          Fmt("max relative error %.3g over %d draws (< %.0e), %.1f s (< %.0f s)",
              worst, kGradientDraws, kGradientTolerance, t,
              kGradientBudgetSeconds)};
}

Outcome SyntheticDiagnosis() {
  const auto& config = Shared().config();
  const double t = Shared().train_seconds();
  const auto rows = ReadCsv(config.run_dir / "train/cv_metrics.csv");
  const auto col = Header(rows.front());
  std::optional<double> acc, sens, spec;
  for (const auto& r : rows) {
    if (r[0] != "mean") continue;
    acc = pe::ParseDouble(r[col.at("accuracy")]);
    sens = pe::ParseDouble(r[col.at("sensitivity")]);
    spec = pe::ParseDouble(r[col.at("specificity")]);
  }
  const bool pass = acc && sens && spec && *acc >= kMinAccuracy &&
                    *sens >= kMinSensitivity && *spec >= kMinSpecificity &&
                    t < kTrainBudgetSeconds;
  return {pass,
          Fmt("%d-fold CV on %d+%d subjects: accuracy %.4f, sensitivity %.4f, "
              "specificity %.4f; synth+train %.0f s (< %.0f s)",
              config.folds, config.cohort.n_pd, config.cohort.n_hc,
              acc.value_or(NAN), sens.value_or(NAN), spec.value_or(NAN), t,
              kTrainBudgetSeconds)};
}

Outcome RegressorOracles() {
  pe::Rng rng(301);
  double ridge_err = 0, en_err = 0;
  int trace_violations = 0;
  for (int d = 0; d < kDesigns; ++d) {
    const size_t m = 3 + rng.UniformIndex(14);
    const auto records = oracle::RandomRecords(rng, m, 40 + rng.UniformIndex(200));
    pe::SurrogateHyper hyper;
    hyper.ridge_lambda = rng.Uniform(0.05, 5.0);
    const auto ridge = pe::FitSurrogate(records, pe::SurrogateKind::kRidge, hyper);
    const auto ridge_ref = oracle::DenseRidgeSolve(records, hyper.ridge_lambda);
    ridge_err = std::max(ridge_err, std::abs(ridge.intercept() - ridge_ref[0]));
    for (size_t j = 0; j < m; ++j) {
      ridge_err = std::max(ridge_err,
                           std::abs(ridge.coefficients()[j] - ridge_ref[j + 1]));
    }

    pe::SurrogateHyper ols = hyper;
    ols.elastic_lambda = 0.0;
    const auto en0 = pe::FitSurrogate(records, pe::SurrogateKind::kElasticNet, ols);
    const auto ols_ref = oracle::DenseRidgeSolve(records, 0.0);
    en_err = std::max(en_err, std::abs(en0.intercept() - ols_ref[0]));
    for (size_t j = 0; j < m; ++j) {
      en_err = std::max(en_err, std::abs(en0.coefficients()[j] - ols_ref[j + 1]));
    }

    pe::SurrogateHyper penalised = hyper;
    penalised.elastic_lambda = rng.Uniform(0.001, 0.1);
    penalised.elastic_rho = rng.Uniform(0.0, 1.0);
    for (const auto* h : {&ols, &penalised}) {
      const auto en = pe::FitSurrogate(records, pe::SurrogateKind::kElasticNet, *h);
      const auto& trace = en.objective_trace();
      for (size_t s = 1; s < trace.size(); ++s) {
        if (trace[s] > trace[s - 1] * (1.0 + kTraceRelativeSlack)) {
          ++trace_violations;
        }
      }
    }
  }
  return {ridge_err <= kRidgeTolerance && en_err <= kElasticOlsTolerance &&
              trace_violations == 0,
          Fmt("%d designs: ridge vs dense solve %.2g (<= %.0e), ElasticNet(0) "
              "vs OLS %.2g (<= %.0e), objective increases %d",
              kDesigns, ridge_err, kRidgeTolerance, en_err,
              kElasticOlsTolerance, trace_violations)};
}

Outcome AttributionCorrectness() {
  pe::Rng rng(401);
  int linear_mismatches = 0;
  double efficiency_err = 0;
  for (int f = 0; f < kShapleyFits; ++f) {
    const size_t m = 3 + rng.UniformIndex(10);
    const auto records = oracle::RandomRecords(rng, m, 60 + rng.UniformIndex(200));
    const auto superpoints = pe::SegmentSuperpoints(m * 10, m);
    const std::vector<uint8_t> ones(m, 1), zeros(m, 0);
    for (pe::SurrogateKind kind : pe::kAllSurrogateKinds) {
      const auto g = pe::FitSurrogate(records, kind, {}, 400 + f);
      const auto phi = pe::ExactShapley(g);
      if (pe::IsLinear(kind)) {
        const auto map = pe::ExtractAttributions(g, records, superpoints, "x",
                                                 pe::PerturbationStrategy::kCentroid);
        if (map.weights != g.coefficients() || phi != g.coefficients()) {
          ++linear_mismatches;
        }
      }
      const double sum = std::accumulate(phi.begin(), phi.end(), 0.0);
      efficiency_err = std::max(
          efficiency_err, std::abs(sum - (g.Predict(ones) - g.Predict(zeros))));
    }
  }
  return {linear_mismatches == 0 && efficiency_err <= kEfficiencyTolerance,
          Fmt("%d fits: linear attribution/coefficient/Shapley mismatches %d "
              "(exact), max |sum phi - (G(1)-G(0))| %.2g (<= %.0e) over 6 kinds",
              kShapleyFits, linear_mismatches, efficiency_err,
              kEfficiencyTolerance)};
}

Outcome MetricOracles() {
  pe::Rng rng(501);
  double pearson_err = 0;
  for (int v = 0; v < 1000; ++v) {
    const size_t n = 2 + rng.UniformIndex(100);
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = rng.Normal(0, 3);
      y[i] = 0.5 * x[i] + rng.Normal();
    }
    const auto r = pe::Pearson(x, y);
    pearson_err = std::max(
        pearson_err, r ? std::abs(*r - oracle::DirectPearson(x, y)) : INFINITY);
  }
  double auc_err = 0, brier_err = 0;
  for (int s = 0; s < 100; ++s) {
    const size_t n = 2 + rng.UniformIndex(80);
    std::vector<pe::ScoredSubject> scored;
    std::vector<double> scores;
    std::vector<bool> positive;
    for (size_t i = 0; i < n; ++i) {
      const bool pd = i == 0 || (i != 1 && rng.Bernoulli(0.5));
      // Coarse grid so ties occur.
      const double score =
          std::round(rng.Uniform() * 20.0 + (pd ? 3.0 : 0.0)) / 23.0;
      scored.push_back({std::to_string(i), score, pd ? pe::Label::kPD : pe::Label::kHC});
      scores.push_back(score);
      positive.push_back(pd);
    }
    auc_err = std::max(auc_err, std::abs(pe::RocAuc(scored).auc -
                                         oracle::PairCountAuc(scores, positive)));
    long double sum = 0;
    for (size_t i = 0; i < n; ++i) {
      const long double d = scores[i] - (positive[i] ? 1.0L : 0.0L);
      sum += d * d;
    }
    brier_err = std::max(brier_err,
                         std::abs(pe::Calibration(scored).brier -
                                  static_cast<double>(sum / n)));
  }
  return {pearson_err <= kMetricTolerance && auc_err <= kMetricTolerance &&
              brier_err <= kMetricTolerance,
          Fmt("Pearson %.2g (1000 vectors), AUC vs pair count %.2g (100 sets), "
              "Brier vs resummation %.2g; all <= %.0e",
              pearson_err, auc_err, brier_err, kMetricTolerance)};
}

Outcome ClosedLoop() {
  pe::Rng rng(601);
  double worst_pc = 0, worst_ac = 0;
  int ca_failures = 0, da_failures = 0, defined_ac = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const size_t m = 2 + rng.UniformIndex(10);
    std::vector<double> beta(m);
    for (double& b : beta) b = rng.Uniform(-0.1, 0.1);
    const double b0 = rng.Uniform(0.2, 0.8);
    const pe::MaskFunction black_box = [&](const pe::PerturbationMask& mask) {
      double y = b0;
      for (size_t j = 0; j < m; ++j) {
        if (mask.kept(j)) y += beta[j];
      }
      return y;
    };
    std::vector<pe::PerturbationRecord> records;
    for (uint64_t code = 0; code < (uint64_t{1} << m); ++code) {
      std::vector<uint8_t> bits(m);
      for (size_t j = 0; j < m; ++j) bits[j] = (code >> j) & 1;
      pe::PerturbationMask mask(bits);
      records.push_back({mask, black_box(mask)});
    }
    const auto g = pe::FitSurrogate(records, pe::SurrogateKind::kLR);
    const auto fid = pe::EvaluateFidelity(
        "linear", pe::PerturbationStrategy::kCentroid, g,
        pe::MeanToggle(g, records), black_box(pe::PerturbationMask::AllOnes(m)),
        pe::DecisionDeltas(black_box, m));
    worst_pc = std::max(worst_pc, fid.pc);
    if (fid.ca != 1) ++ca_failures;
    if (fid.da != 1.0) ++da_failures;
    if (fid.ac) {
      ++defined_ac;
      worst_ac = std::max(worst_ac, std::abs(*fid.ac - 1.0));
    }
  }
  return {worst_pc < kClosedLoopPc && ca_failures == 0 && da_failures == 0 &&
              worst_ac <= kClosedLoopAc,
          Fmt("%d linear black boxes, exhaustive masks: max PC %.2g (< %.0e), "
              "CA failures %d, DA failures %d, max |AC-1| %.2g over %d defined",
              trials, worst_pc, kClosedLoopPc, ca_failures, da_failures,
              worst_ac, defined_ac)};
}

Outcome CohortFidelity() {
  pe::RunConfig config = Shared().config();
  config.verify_strategies = {pe::PerturbationStrategy::kCentroid};
  config.verify_instances = 0;
  const auto start = std::chrono::steady_clock::now();
  pe::CmdVerify(config);
  const double t = Seconds(start);
  const auto rows = ReadCsv(config.run_dir / "verify/fidelity.csv");
  const auto col = Header(rows.front());
  std::map<std::string, std::pair<double, double>> by_kind;
  int instances = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    by_kind[r[col.at("kind")]] = {*pe::ParseDouble(r[col.at("pc_mean")]),
                                  *pe::ParseDouble(r[col.at("ca_mean")])};
    instances = static_cast<int>(*pe::ParseInt(r[col.at("instances")]));
  }
  const auto [xgb_pc, xgb_ca] = by_kind.at("XGB");
  const double lr_pc = by_kind.at("LR").first;
  return {xgb_pc <= kMaxXgbPc && xgb_ca >= kMinXgbCa && xgb_pc <= lr_pc &&
              t < kVerifyBudgetSeconds,
          Fmt("K=%zu, M=%zu, %d instances: XGB PC %.4f (<= %.2f), XGB CA %.4f "
              "(>= %.2f), LR PC %.4f (XGB <= LR); %.0f s (< %.0f s)",
              config.perturbations, config.superpoints, instances, xgb_pc,
              kMaxXgbPc, xgb_ca, kMinXgbCa, lr_pc, t, kVerifyBudgetSeconds)};
}

Outcome PerturbationInvariants() {
  pe::Rng rng(801);
  int failures = 0, checked = 0;
  for (size_t n = 1; n <= kMaxInvariantPoints; ++n) {
    for (size_t m = 1; m <= n; ++m) {
      const auto sps = pe::SegmentSuperpoints(n, m);
      std::vector<int> cover(n, 0);
      for (const auto& sp : sps) {
        for (size_t i = sp.lo; i < sp.hi; ++i) ++cover[i];
      }
      if (std::any_of(cover.begin(), cover.end(), [](int c) { return c != 1; })) {
        ++failures;
      }
      pe::PointCloud cloud;
      for (size_t i = 0; i < n; ++i) {
        cloud.points.push_back({rng.Normal(), rng.Normal(), rng.Uniform()});
      }
      std::vector<uint8_t> bits(m);
      for (auto& b : bits) b = rng.Bernoulli(0.5);
      const pe::PerturbationMask mask(bits);
      for (auto strategy : {pe::PerturbationStrategy::kCentroid,
                            pe::PerturbationStrategy::kHeightFlatten}) {
        ++checked;
        if (pe::Perturb(strategy, cloud, sps, pe::PerturbationMask::AllOnes(m))
                .points != cloud.points) {
          ++failures;
        }
        const auto once = pe::Perturb(strategy, cloud, sps, mask);
        if (pe::Perturb(strategy, once, sps, mask).points != once.points) {
          ++failures;
        }
        const auto collapsed =
            pe::Perturb(strategy, cloud, sps, pe::PerturbationMask::AllZeros(m));
        for (const auto& sp : sps) {
          for (size_t i = sp.lo + 1; i < sp.hi; ++i) {
            const auto& a = collapsed.points[sp.lo];
            const auto& b = collapsed.points[i];
            const bool flat = strategy == pe::PerturbationStrategy::kCentroid
                                  ? a.x == b.x && a.y == b.y && a.z == b.z
                                  : a.z == b.z;
            if (!flat) ++failures;
          }
        }
      }
    }
  }
  return {failures == 0,
          Fmt("%d (N, M, strategy) cases with N <= %zu: identity, idempotence, "
              "collapse and partition failures %d",
              checked, kMaxInvariantPoints, failures)};
}

Outcome VotingMonotonicity() {
  pe::Rng rng(901);
  int violations = 0;
  for (int v = 0; v < kVoteVectors; ++v) {
    std::vector<double> probs(1 + rng.UniformIndex(64));
    for (auto& p : probs) p = rng.Uniform();
    // Probabilities themselves as thresholds hit every step exactly.
    std::vector<double> alphas = probs;
    for (int k = 0; k <= 100; ++k) alphas.push_back(k / 100.0);
    std::sort(alphas.begin(), alphas.end());
    double previous = 2.0;
    for (double a : alphas) {
      const double y = pe::VoteFraction(probs, a);
      if (y > previous) ++violations;
      previous = y;
    }
  }

  // Threshold sweep written by the train command.
  pe::RunConfig config;
  config.run_dir = Scratch("sweep");
  fs::remove_all(config.run_dir);
  for (const char* o : {"synth.n_pd=6", "synth.n_hc=6", "synth.points=1200",
                        "epochs=2", "point_widths=16,32", "head_widths=16",
                        "learning_rate=1e-3"}) {
    pe::ApplyOverride(config, o);
  }
  pe::CmdSynth(config);
  pe::CmdTrain(config);
  const auto rows = ReadCsv(config.run_dir / "train/threshold_sweep.csv");
  const auto col = Header(rows.front());
  bool sweep_ok = rows.size() == static_cast<size_t>(config.sweep_points) + 1;
  double prev_alpha = -1, prev_sens = 2, prev_spec = -1;
  for (size_t i = 1; sweep_ok && i < rows.size(); ++i) {
    const auto alpha = pe::ParseDouble(rows[i][col.at("alpha")]);
    const auto sens = pe::ParseDouble(rows[i][col.at("sensitivity_mean")]);
    const auto spec = pe::ParseDouble(rows[i][col.at("specificity_mean")]);
    sweep_ok = alpha && sens && spec && *alpha > prev_alpha &&
               *sens <= prev_sens && *spec >= prev_spec;
    if (sweep_ok) {
      prev_alpha = *alpha;
      prev_sens = *sens;
      prev_spec = *spec;
    }
  }
  fs::remove_all(config.run_dir);
  return {violations == 0 && sweep_ok,
          Fmt("%d vectors: increases %d (exact); threshold_sweep.csv %zu "
              "rows over alpha in [0, 1], sensitivity non-increasing and "
              "specificity non-decreasing: %s",
              kVoteVectors, violations, rows.size() - 1,
              sweep_ok ? "yes" : "no")};
}

Outcome SampleSizeSaturation() {
  const auto& config = Shared().config();
  const auto subjects = pe::LoadCohort(config);
  const pe::DiagnosticModel model = pe::MakeDiagnosticModel(
      config, pe::LoadCheckpoint(config.run_dir / "model/final.ckpt"));
  const auto instances = pe::VerificationInstances(subjects, kSweepInstances);
  std::vector<double> gap(std::size(kSweepSizes), 0.0);
  for (const pe::Subject* s : instances) {
    const auto superpoints = pe::SegmentSuperpoints(s->cloud, config.superpoints);
    const auto masks = pe::GenerateMasks(config.superpoints, kSweepReference,
                                         pe::InstanceMaskSeed(config, s->id));
    const auto records =
        pe::LabelMasks(model, s->cloud, superpoints, masks,
                       pe::PerturbationStrategy::kCentroid, config.threads);
    const double f_out = model.Score(s->cloud);
    const auto ones = pe::PerturbationMask::AllOnes(config.superpoints);
    auto pc = [&](size_t k) {
      const std::vector<pe::PerturbationRecord> head(records.begin(),
                                                     records.begin() + k);
      return pe::ProbabilityConsistency(
          f_out, pe::FitSurrogate(head, pe::SurrogateKind::kLR).Predict(ones));
    };
    const double reference = pc(kSweepReference);
    for (size_t i = 0; i < std::size(kSweepSizes); ++i) {
      gap[i] += std::abs(pc(kSweepSizes[i]) - reference) / instances.size();
    }
  }
  int inversions = 0;
  bool within = true;
  for (size_t i = 1; i < gap.size(); ++i) {
    if (gap[i] > gap[i - 1]) {
      ++inversions;
      within = within && gap[i] - gap[i - 1] <= kSweepInversion;
    }
  }
  std::string series;
  for (size_t i = 0; i < gap.size(); ++i) {
    series += Fmt("%sK=%zu %.4f", i ? ", " : "", kSweepSizes[i], gap[i]);
  }
  return {inversions <= 1 && within,
          Fmt("%zu instances, LR, mean |PC(K) - PC(%zu)|: %s; inversions %d "
              "(<= 1, each <= %.3f)",
              instances.size(), kSweepReference, series.c_str(), inversions,
              kSweepInversion)};
}

#ifndef POINTEXPLAINER_CLI
#error "POINTEXPLAINER_CLI must name the command-line binary"
#endif

Outcome Determinism() {
  const fs::path root = Scratch("determinism");
  const std::string base =
      std::string("\"") + POINTEXPLAINER_CLI + "\" --run-dir \"" +
      root.string() +
      "\" --seed 7 -s synth.n_pd=6 -s synth.n_hc=6 -s synth.points=1500 "
      "-s epochs=2 -s point_widths=16,32 -s head_widths=16 "
      "-s learning_rate=1e-3 -s perturbations=80 -s bootstrap=200 "
      "-s verify_instances=4";
  const std::vector<std::string> commands = {"synth", "train", "explain PD_003",
                                             "explain HC_002", "verify",
                                             "report"};
  std::vector<std::map<std::string, std::string>> runs;
  int failed_commands = 0;
  for (int run = 0; run < 2; ++run) {
    fs::remove_all(root);
    for (const auto& c : commands) {
      if (std::system((base + " " + c + " > /dev/null 2>&1").c_str()) != 0) {
        ++failed_commands;
      }
    }
    runs.push_back(Snapshot(root));
  }
  // Each command again on top of the finished run.
  for (const auto& c : commands) {
    if (std::system((base + " " + c + " > /dev/null 2>&1").c_str()) != 0) {
      ++failed_commands;
    }
  }
  runs.push_back(Snapshot(root));
  int differing = 0;
  for (size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].size() != runs[0].size()) ++differing;
    for (const auto& [rel, bytes] : runs[0]) {
      auto it = runs[r].find(rel);
      if (it == runs[r].end() || it->second != bytes) {
        ++differing;
        std::printf("  differs: %s\n", rel.c_str());
      }
    }
  }
  fs::remove_all(root);
  return {failed_commands == 0 && differing == 0 && !runs[0].empty(),
          Fmt("%zu commands run twice fresh and once in place: %zu files, "
              "non-zero exits %d, differing files %d",
              commands.size(), runs[0].size(), failed_commands, differing)};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", GradientCorrectness},
      {2, "synthetic diagnosis", SyntheticDiagnosis},
      {3, "regressor oracles", RegressorOracles},
      {4, "attribution correctness", AttributionCorrectness},
      {5, "fidelity metric oracles", MetricOracles},
      {6, "closed-loop faithfulness", ClosedLoop},
      {7, "surrogate fidelity on the synthetic cohort", CohortFidelity},
      {8, "perturbation invariants", PerturbationInvariants},
      {9, "voting monotonicity", VotingMonotonicity},
      {10, "perturbation sample-size saturation", SampleSizeSaturation},
      {11, "determinism", Determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL",
                c.number, c.name, outcome.detail.c_str(), Seconds(start));
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
