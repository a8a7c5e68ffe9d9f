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


// End-to-end commands over a run directory, and the building blocks they are
// made of.
//
// Layout of a run directory:
//   cohort/            recordings (cmd_synth)
//   model/             fold_<k>.ckpt and final.ckpt (cmd_train)
//   train/             curves, per-fold metrics, out-of-fold scores,
//                      threshold sweep, report
//   explain/           <subject>.json, <subject>.svg, <subject>.csv
//   verify/            fidelity tables and per-instance metrics
//   report/            ROC, calibration and decision curves with bands
//   manifest.json      size and FNV-1a hash of every output

#ifndef POINTEXPLAINER_PIPELINE_H_
#define POINTEXPLAINER_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pointexplainer/classifier.h"
#include "pointexplainer/clinical.h"
#include "pointexplainer/config.h"
#include "pointexplainer/fidelity.h"
#include "pointexplainer/signal.h"
#include "pointexplainer/surrogate.h"

namespace pointexplainer {

// Independent random streams drawn from the master seed.
enum class SeedStream : uint64_t {
  kSynth = 1,
  kFolds,
  kInit,
  kShuffle,
  kMasks,
  kSurrogate,
  kBootstrap,
};
uint64_t StreamSeed(uint64_t master, SeedStream stream, uint64_t index = 0);

uint64_t Fnv1a64(std::string_view bytes);

struct Subject {
  std::string id;
  Label label = Label::kUnknown;
  HandDrawnSignal signal;
  PointCloud cloud;
};

Subject MakeSubject(HandDrawnSignal signal, const RunConfig& config);

// Every *.csv under the cohort directory, sorted by subject id. Throws a data
// Error when the directory is missing or empty, a label is missing or an id
// repeats.
std::vector<Subject> LoadCohort(const RunConfig& config);

std::vector<LabeledPatch> SubjectPatches(const Subject& subject,
                                         const RunConfig& config);

DiagnosticModel MakeDiagnosticModel(const RunConfig& config,
                                    PointSetModel network);

struct FoldResult {
  int fold = 0;  // 1-based
  std::vector<std::string> test_ids;
  PointSetModel model;
  std::vector<EpochStats> curve;
  std::vector<ScoredSubject> scores;  // held-out subjects
  std::vector<std::vector<double>> patch_probabilities;  // per held-out subject
  MetricSet metrics;                  // subject level, PD iff score >= 0.5
};

// Stratified k-fold training and held-out scoring.
std::vector<FoldResult> CrossValidate(const RunConfig& config,
                                      const std::vector<Subject>& subjects);

// Trains on every subject.
PointSetModel TrainFinalModel(const RunConfig& config,
                              const std::vector<Subject>& subjects);

// Per threshold alpha: mean, min and max over folds of accuracy,
// sensitivity, specificity and F1 when patches vote at alpha.
std::string ThresholdSweepCsv(const std::vector<FoldResult>& folds,
                              int points);

struct InstanceExplanation {
  std::vector<Superpoint> superpoints;
  std::vector<PerturbationRecord> records;
  double f_out = 0.0;
  std::vector<double> deltas;
};

// Perturbation set labelled by the black box plus single-superpoint deltas.
// The masks depend only on the seed and the subject id.
InstanceExplanation PerturbInstance(const DiagnosticModel& model,
                                    const Subject& subject,
                                    const RunConfig& config,
                                    PerturbationStrategy strategy);

uint64_t InstanceMaskSeed(const RunConfig& config, std::string_view id);

// PD and HC subjects interleaved in id order, truncated to `count` when it is
// positive.
std::vector<const Subject*> VerificationInstances(
    const std::vector<Subject>& subjects, int count);

// Paths written by a command, relative to the run directory.
struct CommandResult {
  std::vector<std::string> outputs;
  std::string summary;
};

CommandResult CmdSynth(const RunConfig& config);
CommandResult CmdTrain(const RunConfig& config);
CommandResult CmdExplain(const RunConfig& config,
                         const std::string& subject_id);
CommandResult CmdVerify(const RunConfig& config);
CommandResult CmdReport(const RunConfig& config);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_PIPELINE_H_
