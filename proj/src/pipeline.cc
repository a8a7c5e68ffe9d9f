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


#include "pointexplainer/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pointexplainer/error.h"
#include "pointexplainer/render.h"
#include "pointexplainer/random.h"
#include "pointexplainer/strings.h"
#include "pointexplainer/synth.h"

namespace pointexplainer {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Num(double v) { return std::isfinite(v) ? FormatDouble(v) : ""; }
std::string Num(const std::optional<double>& v) { return v ? Num(*v) : ""; }

std::string Hex64(uint64_t v) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(v));
  return buffer;
}

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Collects the files a command writes and records them in the manifest.
class RunOutputs {
 public:
  RunOutputs(const RunConfig& config, std::string command)
      : root_(config.run_dir), command_(std::move(command)) {}

  fs::path Path(const fs::path& relative) const { return root_ / relative; }

  void Write(const fs::path& relative, std::string_view content) {
    const fs::path path = Prepare(relative);
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw DataError("cannot write " + path.string());
    Record(path);
  }

  // For files produced by other writers.
  fs::path Prepare(const fs::path& target) {
    const fs::path path = target.is_absolute() ? target : root_ / target;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw DataError("cannot create directory " +
                      path.parent_path().string() + ": " + ec.message());
    }
    return path;
  }

  void Record(const fs::path& path) {
    files_.push_back(path.lexically_proximate(root_).generic_string());
  }

  std::vector<std::string> Finish() {
    const fs::path manifest_path = root_ / "manifest.json";
    nlohmann::json manifest;
    if (fs::exists(manifest_path)) {
      try {
        manifest = nlohmann::json::parse(ReadBytes(manifest_path));
      } catch (const nlohmann::json::exception&) {
        manifest = nlohmann::json::object();
      }
    }
    if (!manifest.is_object()) manifest = nlohmann::json::object();
    manifest["version"] = std::string(kVersion);
    auto& commands = manifest["commands"];
    std::vector<std::string> sorted = files_;
    std::sort(sorted.begin(), sorted.end());
    commands[command_] = sorted;
    for (const auto& rel : files_) {
      const std::string bytes = ReadBytes(root_ / rel);
      manifest["files"][rel] = {{"bytes", bytes.size()},
                                {"fnv1a64", Hex64(Fnv1a64(bytes))}};
    }
    std::ofstream out(manifest_path, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw DataError("cannot write " + manifest_path.string());
    return files_;
  }

 private:
  fs::path root_;
  std::string command_;
  std::vector<std::string> files_;
};

std::string ReportHeader(const RunConfig& config, std::string_view command) {
  return "# " + std::string(kVersion) + "\n# command: " + std::string(command) +
         "\n\n[config]\n" + RunConfigToText(config) + "\n";
}

std::vector<SubjectLabel> Labels(const std::vector<Subject>& subjects) {
  std::vector<SubjectLabel> out;
  for (const auto& s : subjects) out.push_back({s.id, s.label});
  return out;
}

std::vector<LabeledPatch> PatchesOf(const std::vector<Subject>& subjects,
                                    const std::set<std::string>& ids,
                                    const RunConfig& config) {
  std::vector<LabeledPatch> out;
  for (const auto& s : subjects) {
    if (!ids.contains(s.id)) continue;
    for (auto& p : SubjectPatches(s, config)) out.push_back(std::move(p));
  }
  return out;
}

const Subject& FindSubject(const std::vector<Subject>& subjects,
                           std::string_view id) {
  for (const auto& s : subjects) {
    if (s.id == id) return s;
  }
  throw DataError("unknown subject '" + std::string(id) + "'");
}

fs::path FoldCheckpoint(int fold) {
  return fs::path("model") / ("fold_" + std::to_string(fold) + ".ckpt");
}

PointSetModel LoadModel(const RunConfig& config, const fs::path& relative) {
  const fs::path path = config.run_dir / relative;
  if (!fs::exists(path)) {
    throw DataError("missing checkpoint " + path.string() +
                    " (run the train command first)");
  }
  PointSetModel model = LoadCheckpoint(path);
  if (model.config().input_channels != config.network().input_channels) {
    throw ConfigError("checkpoint channel count does not match the color "
                      "setting");
  }
  return model;
}

// Summary over the defined entries.
MetricSummary SummarizeDefined(const std::vector<std::optional<double>>& v) {
  std::vector<double> defined;
  for (const auto& x : v) {
    if (x) defined.push_back(*x);
  }
  return Summarize(defined);
}

uint64_t SurrogateSeed(const RunConfig& config, std::string_view id,
                       SurrogateKind kind) {
  return DeriveSeed(StreamSeed(config.seed, SeedStream::kSurrogate,
                               Fnv1a64(id)),
                    static_cast<uint64_t>(kind));
}

}  // namespace

uint64_t StreamSeed(uint64_t master, SeedStream stream, uint64_t index) {
  return DeriveSeed(DeriveSeed(master, static_cast<uint64_t>(stream)), index);
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Subject MakeSubject(HandDrawnSignal signal, const RunConfig& config) {
  Subject s;
  s.id = signal.subject_id;
  s.label = signal.label;
  s.cloud = BuildPointCloud(signal, config.height_feature, config.color);
  s.signal = std::move(signal);
  return s;
}

std::vector<Subject> LoadCohort(const RunConfig& config) {
  const fs::path dir = config.resolved_cohort_dir();
  if (!fs::is_directory(dir)) {
    throw DataError("cohort directory " + dir.string() +
                    " does not exist (run the synth command or set "
                    "cohort_dir)");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw DataError("no recordings in " + dir.string());
  std::vector<Subject> subjects;
  for (const auto& f : files) {
    HandDrawnSignal signal = LoadSignal(f, config.csv_schema);
    if (signal.label == Label::kUnknown) {
      throw DataError(f.string() + ": missing PD/HC label in the sidecar");
    }
    subjects.push_back(MakeSubject(std::move(signal), config));
  }
  std::sort(subjects.begin(), subjects.end(),
            [](const Subject& a, const Subject& b) { return a.id < b.id; });
  for (size_t i = 1; i < subjects.size(); ++i) {
    if (subjects[i].id == subjects[i - 1].id) {
      throw DataError("duplicate subject id '" + subjects[i].id + "'");
    }
  }
  return subjects;
}

std::vector<LabeledPatch> SubjectPatches(const Subject& subject,
                                         const RunConfig& config) {
  std::vector<LabeledPatch> out;
  for (auto& p : NormalizedPatches(subject.cloud, config.window, config.step)) {
    out.push_back({std::move(p), subject.label});
  }
  return out;
}

DiagnosticModel MakeDiagnosticModel(const RunConfig& config,
                                    PointSetModel network) {
  return DiagnosticModel{std::move(network), config.window, config.step,
                         config.alpha};
}

std::vector<FoldResult> CrossValidate(const RunConfig& config,
                                      const std::vector<Subject>& subjects) {
  const auto folds = StratifiedKFold(
      Labels(subjects), config.folds, StreamSeed(config.seed, SeedStream::kFolds));
  std::vector<FoldResult> results;
  for (size_t f = 0; f < folds.size(); ++f) {
    const std::set<std::string> test(folds[f].begin(), folds[f].end());
    std::set<std::string> train;
    for (const auto& s : subjects) {
      if (!test.contains(s.id)) train.insert(s.id);
    }
    const auto train_patches = PatchesOf(subjects, train, config);
    const auto test_patches = PatchesOf(subjects, test, config);
    const uint64_t index = f + 1;
    TrainResult trained = Train(
        PointSetModel(config.network(),
                      StreamSeed(config.seed, SeedStream::kInit, index)),
        train_patches,
        config.training(StreamSeed(config.seed, SeedStream::kShuffle, index)),
        &test_patches);
    FoldResult r{static_cast<int>(index), {}, std::move(trained.model),
                 std::move(trained.curve), {}, {}, {}};
    const DiagnosticModel model = MakeDiagnosticModel(config, r.model);
    for (const auto& s : subjects) {
      if (!test.contains(s.id)) continue;
      const DiagnosisResult d = model.Diagnose(s.cloud);
      r.test_ids.push_back(s.id);
      r.scores.push_back({s.id, d.final_score, s.label});
      r.patch_probabilities.push_back(d.patch_probabilities);
    }
    r.metrics = ClassificationMetrics(r.scores, 0.5);
    results.push_back(std::move(r));
  }
  return results;
}

PointSetModel TrainFinalModel(const RunConfig& config,
                              const std::vector<Subject>& subjects) {
  std::set<std::string> all;
  for (const auto& s : subjects) all.insert(s.id);
  return Train(PointSetModel(config.network(),
                             StreamSeed(config.seed, SeedStream::kInit, 0)),
               PatchesOf(subjects, all, config),
               config.training(StreamSeed(config.seed, SeedStream::kShuffle, 0)))
      .model;
}

std::string ThresholdSweepCsv(const std::vector<FoldResult>& folds,
                              int points) {
  std::ostringstream out;
  out << "alpha";
  for (const char* m : {"accuracy", "sensitivity", "specificity", "f1"}) {
    out << ',' << m << "_mean," << m << "_min," << m << "_max";
  }
  out << '\n';
  for (double alpha : Grid(0.0, 1.0, points)) {
    std::vector<std::optional<double>> metric[4];
    for (const auto& f : folds) {
      std::vector<ScoredSubject> scored = f.scores;
      for (size_t i = 0; i < scored.size(); ++i) {
        scored[i].score = VoteFraction(f.patch_probabilities[i], alpha);
      }
      const MetricSet m = ClassificationMetrics(scored, 0.5);
      metric[0].push_back(m.accuracy);
      metric[1].push_back(m.sensitivity);
      metric[2].push_back(m.specificity);
      metric[3].push_back(m.f1);
    }
    out << FormatDouble(alpha);
    for (const auto& values : metric) {
      double lo = kNaN, hi = kNaN;
      for (const auto& v : values) {
        if (!v) continue;
        lo = std::isnan(lo) ? *v : std::min(lo, *v);
        hi = std::isnan(hi) ? *v : std::max(hi, *v);
      }
      const MetricSummary s = SummarizeDefined(values);
      out << ',' << (s.count ? Num(s.mean) : "") << ',' << Num(lo) << ','
          << Num(hi);
    }
    out << '\n';
  }
  return out.str();
}

uint64_t InstanceMaskSeed(const RunConfig& config, std::string_view id) {
  return StreamSeed(config.seed, SeedStream::kMasks, Fnv1a64(id));
}

InstanceExplanation PerturbInstance(const DiagnosticModel& model,
                                    const Subject& subject,
                                    const RunConfig& config,
                                    PerturbationStrategy strategy) {
  InstanceExplanation e;
  e.superpoints = SegmentSuperpoints(subject.cloud, config.superpoints);
  const auto masks = GenerateMasks(config.superpoints, config.perturbations,
                                   InstanceMaskSeed(config, subject.id));
  e.records = LabelMasks(model, subject.cloud, e.superpoints, masks, strategy,
                         config.threads);
  e.f_out = model.Score(subject.cloud);
  e.deltas = DecisionDeltas(model, subject.cloud, e.superpoints, strategy,
                            config.threads);
  return e;
}

std::vector<const Subject*> VerificationInstances(
    const std::vector<Subject>& subjects, int count) {
  std::vector<const Subject*> pd, hc, out;
  for (const auto& s : subjects) (s.label == Label::kPD ? pd : hc).push_back(&s);
  for (size_t i = 0; i < std::max(pd.size(), hc.size()); ++i) {
    if (i < pd.size()) out.push_back(pd[i]);
    if (i < hc.size()) out.push_back(hc[i]);
  }
  if (count > 0 && out.size() > static_cast<size_t>(count)) out.resize(count);
  return out;
}

CommandResult CmdSynth(const RunConfig& config) {
  ValidateRunConfig(config);
  CohortParams params = config.cohort;
  params.seed = StreamSeed(config.seed, SeedStream::kSynth);
  const auto cohort = GenerateCohort(params);
  RunOutputs outputs(config, "synth");
  const fs::path dir = config.resolved_cohort_dir();
  for (const auto& signal : cohort) {
    const fs::path csv = outputs.Prepare(dir / (signal.subject_id + ".csv"));
    WriteSignal(signal, csv);
    outputs.Record(csv);
    outputs.Record(fs::path(csv).replace_extension(".meta"));
  }
  CommandResult result;
  result.outputs = outputs.Finish();
  result.summary = "wrote " + std::to_string(cohort.size()) + " recordings (" +
                   std::to_string(params.n_pd) + " PD, " +
                   std::to_string(params.n_hc) + " HC) to " + dir.string();
  return result;
}

CommandResult CmdTrain(const RunConfig& config) {
  ValidateRunConfig(config);
  const auto subjects = LoadCohort(config);
  const auto folds = CrossValidate(config, subjects);
  const PointSetModel final_model = TrainFinalModel(config, subjects);

  RunOutputs outputs(config, "train");
  for (const auto& f : folds) {
    const fs::path p = outputs.Prepare(FoldCheckpoint(f.fold));
    SaveCheckpoint(f.model, p);
    outputs.Record(p);
  }
  const fs::path final_path = outputs.Prepare("model/final.ckpt");
  SaveCheckpoint(final_model, final_path);
  outputs.Record(final_path);

  std::ostringstream curves;
  curves << "fold,epoch,train_loss,train_accuracy,validation_accuracy\n";
  for (const auto& f : folds) {
    for (const auto& e : f.curve) {
      curves << f.fold << ',' << e.epoch << ',' << Num(e.train_loss) << ','
             << Num(e.train_accuracy) << ',' << Num(e.validation_accuracy)
             << '\n';
    }
  }
  outputs.Write("train/curves.csv", curves.str());

  std::ostringstream metrics;
  metrics << "fold,subjects,tp,fn,tn,fp,accuracy,sensitivity,specificity,f1\n";
  std::vector<std::optional<double>> acc, sens, spec, f1;
  for (const auto& f : folds) {
    const auto& m = f.metrics;
    metrics << f.fold << ',' << m.counts.total() << ',' << m.counts.tp << ','
            << m.counts.fn << ',' << m.counts.tn << ',' << m.counts.fp << ','
            << Num(m.accuracy) << ',' << Num(m.sensitivity) << ','
            << Num(m.specificity) << ',' << Num(m.f1) << '\n';
    acc.push_back(m.accuracy);
    sens.push_back(m.sensitivity);
    spec.push_back(m.specificity);
    f1.push_back(m.f1);
  }
  const MetricSummary s_acc = SummarizeDefined(acc);
  const MetricSummary s_sens = SummarizeDefined(sens);
  const MetricSummary s_spec = SummarizeDefined(spec);
  const MetricSummary s_f1 = SummarizeDefined(f1);
  metrics << "mean,,,,,," << Num(s_acc.mean) << ',' << Num(s_sens.mean) << ','
          << Num(s_spec.mean) << ',' << Num(s_f1.mean) << '\n';
  metrics << "std,,,,,," << Num(s_acc.std) << ',' << Num(s_sens.std) << ','
          << Num(s_spec.std) << ',' << Num(s_f1.std) << '\n';
  outputs.Write("train/cv_metrics.csv", metrics.str());

  std::ostringstream scores;
  scores << "subject_id,label,fold,score,predicted\n";
  for (const auto& f : folds) {
    for (const auto& s : f.scores) {
      scores << s.subject_id << ',' << LabelName(s.label) << ',' << f.fold
             << ',' << Num(s.score) << ','
             << LabelName(VoteLabel(s.score)) << '\n';
    }
  }
  outputs.Write("train/cv_scores.csv", scores.str());
  outputs.Write("train/threshold_sweep.csv",
                ThresholdSweepCsv(folds, config.sweep_points));

  char line[256];
  std::string report = ReportHeader(config, "train");
  report += "[cross-validation]\n";
  std::snprintf(line, sizeof(line),
                "subjects %zu, folds %zu\n"
                "accuracy    %.4f +- %.4f\nsensitivity %.4f +- %.4f\n"
                "specificity %.4f +- %.4f\nf1          %.4f +- %.4f\n",
                subjects.size(), folds.size(), s_acc.mean, s_acc.std,
                s_sens.mean, s_sens.std, s_spec.mean, s_spec.std, s_f1.mean,
                s_f1.std);
  report += line;
  outputs.Write("train/report.txt", report);

  CommandResult result;
  result.outputs = outputs.Finish();
  std::snprintf(line, sizeof(line),
                "%zu-fold CV on %zu subjects: accuracy %.4f, sensitivity "
                "%.4f, specificity %.4f",
                folds.size(), subjects.size(), s_acc.mean, s_sens.mean,
                s_spec.mean);
  result.summary = line;
  return result;
}

CommandResult CmdExplain(const RunConfig& config,
                         const std::string& subject_id) {
  ValidateRunConfig(config);
  const auto subjects = LoadCohort(config);
  const Subject& subject = FindSubject(subjects, subject_id);
  const DiagnosticModel model =
      MakeDiagnosticModel(config, LoadModel(config, "model/final.ckpt"));
  const InstanceExplanation e =
      PerturbInstance(model, subject, config, config.strategy);
  const SurrogateModel g =
      FitSurrogate(e.records, config.explain_surrogate, config.hyper,
                   SurrogateSeed(config, subject.id, config.explain_surrogate));
  AttributionMap map = ExtractAttributions(g, e.records, e.superpoints,
                                           subject.id, config.strategy);

  RunOutputs outputs(config, "explain " + subject.id);
  const fs::path base = fs::path("explain") / subject.id;
  outputs.Write(base.string() + ".json", AttributionMapToJson(map) + "\n");

  std::vector<std::array<double, 2>> xy;
  for (const auto& s : subject.signal.samples) xy.push_back({s.x, s.y});
  SvgOptions svg;
  svg.smoothing_window = config.smoothing_window;
  outputs.Write(base.string() + ".svg", RenderAttributionSvg(xy, map, svg));

  std::ostringstream table;
  table << "superpoint,lo,hi,weight,delta,relative_change\n";
  for (size_t j = 0; j < map.weights.size(); ++j) {
    table << j << ',' << e.superpoints[j].lo << ',' << e.superpoints[j].hi
          << ',' << Num(map.weights[j]) << ',' << Num(e.deltas[j]) << ','
          << (e.f_out != 0.0 ? Num(e.deltas[j] / e.f_out) : "") << '\n';
  }
  outputs.Write(base.string() + ".csv", table.str());

  CommandResult result;
  result.outputs = outputs.Finish();
  char line[256];
  std::snprintf(line, sizeof(line),
                "%s (%s): F = %.4f, G(1) = %.4f with %s over %zu superpoints",
                subject.id.c_str(), std::string(LabelName(subject.label)).c_str(),
                e.f_out,
                g.Predict(PerturbationMask::AllOnes(config.superpoints)),
                std::string(SurrogateKindName(config.explain_surrogate)).c_str(),
                config.superpoints);
  result.summary = line;
  return result;
}

CommandResult CmdVerify(const RunConfig& config) {
  ValidateRunConfig(config);
  const auto subjects = LoadCohort(config);
  const DiagnosticModel model =
      MakeDiagnosticModel(config, LoadModel(config, "model/final.ckpt"));
  const auto instances =
      VerificationInstances(subjects, config.verify_instances);
  std::vector<InstanceFidelity> all;
  for (PerturbationStrategy strategy : config.verify_strategies) {
    for (const Subject* s : instances) {
      const InstanceExplanation e = PerturbInstance(model, *s, config, strategy);
      for (SurrogateKind kind : config.surrogates) {
        const SurrogateModel g = FitSurrogate(e.records, kind, config.hyper,
                                              SurrogateSeed(config, s->id, kind));
        const auto weights = MeanToggle(g, e.records);
        all.push_back(
            EvaluateFidelity(s->id, strategy, g, weights, e.f_out, e.deltas));
      }
    }
  }
  const auto rows = FidelityReport(all);

  RunOutputs outputs(config, "verify");
  outputs.Write("verify/fidelity.csv", FidelityReportCsv(rows));
  std::string text = ReportHeader(config, "verify");
  for (PerturbationStrategy strategy : config.verify_strategies) {
    std::vector<FidelityRow> subset;
    for (const auto& r : rows) {
      if (r.strategy == strategy) subset.push_back(r);
    }
    text += "[fidelity " + std::string(StrategyName(strategy)) + ", " +
            std::to_string(instances.size()) + " instances]\n" +
            FidelityReportText(subset) + "\n";
  }
  outputs.Write("verify/fidelity.txt", text);
  std::ostringstream per;
  per << "instance,strategy,kind,f_out,g_out,pc,ca,ac,da\n";
  for (const auto& f : all) {
    per << f.instance_id << ',' << StrategyName(f.strategy) << ','
        << SurrogateKindName(f.kind) << ',' << Num(f.f_out) << ','
        << Num(f.g_out) << ',' << Num(f.pc) << ',' << f.ca << ',' << Num(f.ac)
        << ',' << Num(f.da) << '\n';
  }
  outputs.Write("verify/instances.csv", per.str());

  CommandResult result;
  result.outputs = outputs.Finish();
  result.summary = FidelityReportText(rows);
  return result;
}

CommandResult CmdReport(const RunConfig& config) {
  ValidateRunConfig(config);
  const auto subjects = LoadCohort(config);
  const auto folds = StratifiedKFold(
      Labels(subjects), config.folds, StreamSeed(config.seed, SeedStream::kFolds));
  std::vector<ScoredSubject> scored;
  for (size_t f = 0; f < folds.size(); ++f) {
    const DiagnosticModel model = MakeDiagnosticModel(
        config, LoadModel(config, FoldCheckpoint(static_cast<int>(f) + 1)));
    for (const auto& id : folds[f]) {
      const Subject& s = FindSubject(subjects, id);
      scored.push_back({s.id, model.Score(s.cloud), s.label});
    }
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.subject_id < b.subject_id; });

  const uint64_t seed = StreamSeed(config.seed, SeedStream::kBootstrap);
  auto both_classes = [](const std::vector<ScoredSubject>& s) {
    bool pd = false, hc = false;
    for (const auto& x : s) {
      pd = pd || x.label == Label::kPD;
      hc = hc || x.label == Label::kHC;
    }
    return pd && hc;
  };
  auto band = [&](const CurveStatistic& statistic) {
    return BootstrapCi(statistic, scored, config.bootstrap, config.confidence,
                       seed, config.threads);
  };

  const RocResult roc = RocAuc(scored);
  const auto fpr_grid = Grid(0.0, 1.0, 101);
  const auto roc_band = band([&](const std::vector<ScoredSubject>& s)
                                 -> std::optional<std::vector<double>> {
    if (!both_classes(s)) return std::nullopt;
    const RocResult r = RocAuc(s);
    std::vector<double> tpr;
    for (double x : fpr_grid) tpr.push_back(TprAt(r, x));
    return tpr;
  });
  const auto auc_band = band([&](const std::vector<ScoredSubject>& s)
                                 -> std::optional<std::vector<double>> {
    if (!both_classes(s)) return std::nullopt;
    return std::vector<double>{RocAuc(s).auc};
  });

  const int bins = config.calibration_bins;
  const CalibrationResult calibration = Calibration(scored, bins);
  auto observed_by_bin = [bins](const std::vector<ScoredSubject>& s) {
    std::vector<double> out(static_cast<size_t>(bins), kNaN);
    for (const auto& p : Calibration(s, bins).curve) out[p.bin] = p.observed;
    return std::optional<std::vector<double>>(out);
  };
  const auto calibration_band = band(observed_by_bin);
  const auto brier_band = band([&](const std::vector<ScoredSubject>& s) {
    return std::optional<std::vector<double>>(
        std::vector<double>{Calibration(s, bins).brier});
  });

  const auto dca_grid = Grid(0.01, 0.99, 99);
  const auto dca = DecisionCurve(scored, dca_grid);
  const auto dca_band = band([&](const std::vector<ScoredSubject>& s) {
    std::vector<double> nb;
    for (const auto& p : DecisionCurve(s, dca_grid)) nb.push_back(p.model);
    return std::optional<std::vector<double>>(nb);
  });

  RunOutputs outputs(config, "report");
  std::ostringstream scores_csv;
  scores_csv << "subject_id,label,score\n";
  for (const auto& s : scored) {
    scores_csv << s.subject_id << ',' << LabelName(s.label) << ','
               << Num(s.score) << '\n';
  }
  outputs.Write("report/scores.csv", scores_csv.str());

  std::ostringstream roc_csv;
  roc_csv << "fpr,tpr,tpr_mean,tpr_lo,tpr_hi\n";
  for (size_t i = 0; i < fpr_grid.size(); ++i) {
    roc_csv << Num(fpr_grid[i]) << ',' << Num(roc_band.estimate[i]) << ','
            << Num(roc_band.mean[i]) << ',' << Num(roc_band.lo[i]) << ','
            << Num(roc_band.hi[i]) << '\n';
  }
  outputs.Write("report/roc.csv", roc_csv.str());
  std::ostringstream roc_points;
  roc_points << "threshold,fpr,tpr\n";
  for (const auto& p : roc.curve) {
    roc_points << (std::isinf(p.threshold) ? "inf" : Num(p.threshold)) << ','
               << Num(p.fpr) << ',' << Num(p.tpr) << '\n';
  }
  outputs.Write("report/roc_points.csv", roc_points.str());

  std::ostringstream cal_csv;
  cal_csv << "bin,bin_lo,bin_hi,count,mean_score,observed,observed_mean,"
             "observed_lo,observed_hi\n";
  for (int b = 0; b < bins; ++b) {
    const CalibrationPoint* point = nullptr;
    for (const auto& p : calibration.curve) {
      if (p.bin == b) point = &p;
    }
    cal_csv << b << ',' << Num(static_cast<double>(b) / bins) << ','
            << Num(static_cast<double>(b + 1) / bins) << ','
            << (point ? point->count : 0) << ','
            << (point ? Num(point->mean_score) : "") << ','
            << (point ? Num(point->observed) : "") << ','
            << Num(calibration_band.mean[b]) << ','
            << Num(calibration_band.lo[b]) << ','
            << Num(calibration_band.hi[b]) << '\n';
  }
  outputs.Write("report/calibration.csv", cal_csv.str());

  std::ostringstream dca_csv;
  dca_csv << "threshold,model,model_mean,model_lo,model_hi,treat_all,"
             "treat_none\n";
  for (size_t i = 0; i < dca.size(); ++i) {
    dca_csv << Num(dca[i].threshold) << ',' << Num(dca[i].model) << ','
            << Num(dca_band.mean[i]) << ',' << Num(dca_band.lo[i]) << ','
            << Num(dca_band.hi[i]) << ',' << Num(dca[i].treat_all) << ','
            << Num(dca[i].treat_none) << '\n';
  }
  outputs.Write("report/dca.csv", dca_csv.str());

  const MetricSet at_default = ClassificationMetrics(scored, 0.5);
  std::string summary = ReportHeader(config, "report");
  summary += "[summary]\n";
  summary += "subjects = " + std::to_string(scored.size()) + "\n";
  summary += "bootstrap_resamples = " + std::to_string(auc_band.resamples) + "\n";
  summary += "auc = " + Num(roc.auc) + "\n";
  summary += "auc_lo = " + Num(auc_band.lo[0]) + "\n";
  summary += "auc_hi = " + Num(auc_band.hi[0]) + "\n";
  summary += "brier = " + Num(calibration.brier) + "\n";
  summary += "brier_lo = " + Num(brier_band.lo[0]) + "\n";
  summary += "brier_hi = " + Num(brier_band.hi[0]) + "\n";
  summary += "accuracy = " + Num(at_default.accuracy) + "\n";
  summary += "sensitivity = " + Num(at_default.sensitivity) + "\n";
  summary += "specificity = " + Num(at_default.specificity) + "\n";
  outputs.Write("report/summary.txt", summary);

  CommandResult result;
  result.outputs = outputs.Finish();
  char line[256];
  std::snprintf(line, sizeof(line),
                "out-of-fold AUC %.4f [%.4f, %.4f], Brier %.4f [%.4f, %.4f]",
                roc.auc, auc_band.lo[0], auc_band.hi[0], calibration.brier,
                brier_band.lo[0], brier_band.hi[0]);
  result.summary = line;
  return result;
}

}  // namespace pointexplainer
