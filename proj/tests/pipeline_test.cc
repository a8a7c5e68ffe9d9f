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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"
#include "pointexplainer/error.h"
#include "pointexplainer/strings.h"

namespace pointexplainer {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
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

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(Slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    rows.emplace_back();
    for (auto field : Split(line, ',')) rows.back().emplace_back(field);
  }
  return rows;
}

RunConfig TinyConfig(const std::string& name) {
  RunConfig c;
  c.run_dir = fs::temp_directory_path() / ("pointexplainer_" + name);
  fs::remove_all(c.run_dir);
  for (const char* o :
       {"synth.n_pd=4", "synth.n_hc=4", "synth.points=900", "folds=2",
        "epochs=1", "point_widths=8,16", "head_widths=8",
        "learning_rate=1e-3", "perturbations=40", "bootstrap=50",
        "verify_instances=2", "surrogates=LR,DT,XGB", "sweep_points=11"}) {
    ApplyOverride(c, o);
  }
  return c;
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kNumeric;
}

void RunAll(const RunConfig& c) {
  CmdSynth(c);
  CmdTrain(c);
  CmdExplain(c, "PD_002");
  CmdVerify(c);
  CmdReport(c);
}

TEST(Fnv1a64, KnownVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(StreamSeed, StreamsAndIndicesDiffer) {
  EXPECT_NE(StreamSeed(0, SeedStream::kInit), StreamSeed(0, SeedStream::kShuffle));
  EXPECT_NE(StreamSeed(0, SeedStream::kInit, 1), StreamSeed(0, SeedStream::kInit, 2));
  EXPECT_NE(StreamSeed(0, SeedStream::kInit), StreamSeed(1, SeedStream::kInit));
  EXPECT_EQ(StreamSeed(5, SeedStream::kMasks, 3), StreamSeed(5, SeedStream::kMasks, 3));
}

TEST(VerificationInstances, InterleavesClassesAndTruncates) {
  RunConfig c;
  std::vector<Subject> subjects(5);
  const char* ids[] = {"HC_1", "HC_2", "PD_1", "PD_2", "PD_3"};
  for (int i = 0; i < 5; ++i) {
    subjects[i].id = ids[i];
    subjects[i].label = i < 2 ? Label::kHC : Label::kPD;
  }
  auto all = VerificationInstances(subjects, 0);
  ASSERT_EQ(all.size(), 5u);
  EXPECT_EQ(all[0]->id, "PD_1");
  EXPECT_EQ(all[1]->id, "HC_1");
  EXPECT_EQ(all[4]->id, "PD_3");
  EXPECT_EQ(VerificationInstances(subjects, 3).size(), 3u);
}

TEST(Pipeline, MissingInputsAreDataErrors) {
  const RunConfig c = TinyConfig("missing");
  EXPECT_EQ(KindOf([&] { CmdTrain(c); }), ErrorKind::kData);
  CmdSynth(c);
  EXPECT_EQ(KindOf([&] { CmdVerify(c); }), ErrorKind::kData);
  EXPECT_EQ(KindOf([&] { CmdReport(c); }), ErrorKind::kData);
  CmdTrain(c);
  EXPECT_EQ(KindOf([&] { CmdExplain(c, "PD_999"); }), ErrorKind::kData);
  fs::remove_all(c.run_dir);
}

TEST(Pipeline, ChannelMismatchIsConfigError) {
  RunConfig c = TinyConfig("channels");
  CmdSynth(c);
  CmdTrain(c);
  c.color = ColorMode::kDerived;
  EXPECT_EQ(KindOf([&] { CmdExplain(c, "PD_001"); }), ErrorKind::kConfig);
  fs::remove_all(c.run_dir);
}

TEST(Pipeline, EndToEndOutputsAndManifest) {
  const RunConfig c = TinyConfig("e2e");
  RunAll(c);
  const fs::path root = c.run_dir;
  for (const char* f :
       {"cohort/PD_001.csv", "cohort/HC_004.meta", "model/fold_1.ckpt",
        "model/fold_2.ckpt", "model/final.ckpt", "train/curves.csv",
        "train/cv_metrics.csv", "train/cv_scores.csv",
        "train/threshold_sweep.csv", "train/report.txt", "explain/PD_002.json",
        "explain/PD_002.svg", "explain/PD_002.csv", "verify/fidelity.csv",
        "verify/fidelity.txt", "verify/instances.csv", "report/roc.csv",
        "report/calibration.csv", "report/dca.csv", "report/summary.txt"}) {
    EXPECT_TRUE(fs::exists(root / f)) << f;
  }

  const auto manifest = nlohmann::json::parse(Slurp(root / "manifest.json"));
  ASSERT_TRUE(manifest.contains("files"));
  for (const auto& [rel, entry] : manifest["files"].items()) {
    const std::string bytes = Slurp(root / rel);
    EXPECT_EQ(entry["bytes"].get<size_t>(), bytes.size()) << rel;
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(Fnv1a64(bytes)));
    EXPECT_EQ(entry["fnv1a64"].get<std::string>(), hex) << rel;
  }
  EXPECT_EQ(manifest["files"].size(), Snapshot(root).size() - 1);

  // two strategies x three surrogates
  EXPECT_EQ(ReadCsv(root / "verify/fidelity.csv").size(), 7u);
  EXPECT_EQ(ReadCsv(root / "verify/instances.csv").size(), 1u + 2 * 2 * 3);
  EXPECT_EQ(ReadCsv(root / "train/threshold_sweep.csv").size(), 12u);
  EXPECT_EQ(ReadCsv(root / "explain/PD_002.csv").size(), 12u);
  EXPECT_EQ(ReadCsv(root / "train/cv_scores.csv").size(), 9u);
  fs::remove_all(root);
}

TEST(Pipeline, ReportAucMatchesItsScores) {
  const RunConfig c = TinyConfig("auc");
  CmdSynth(c);
  CmdTrain(c);
  CmdReport(c);
  std::vector<ScoredSubject> scored;
  const auto rows = ReadCsv(c.run_dir / "report/scores.csv");
  for (size_t i = 1; i < rows.size(); ++i) {
    scored.push_back({rows[i][0], *ParseDouble(rows[i][2]),
                      ParseLabel(rows[i][1])});
  }
  ASSERT_EQ(scored.size(), 8u);
  const std::string summary = Slurp(c.run_dir / "report/summary.txt");
  EXPECT_NE(summary.find("\nauc = " + FormatDouble(RocAuc(scored).auc) + "\n"),
            std::string::npos);
  EXPECT_NE(summary.find("\nbrier = " +
                         FormatDouble(Calibration(scored, 10).brier) + "\n"),
            std::string::npos);
  fs::remove_all(c.run_dir);
}

TEST(Pipeline, RerunIsByteIdentical) {
  const RunConfig c = TinyConfig("rerun");
  RunAll(c);
  const auto first = Snapshot(c.run_dir);
  RunAll(c);
  const auto second = Snapshot(c.run_dir);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [rel, bytes] : first) {
    EXPECT_TRUE(second.at(rel) == bytes) << rel;
  }
  fs::remove_all(c.run_dir);
}

TEST(Pipeline, ThreadCountDoesNotChangeOutputs) {
  RunConfig c = TinyConfig("threads");
  CmdSynth(c);
  CmdTrain(c);
  CmdVerify(c);
  const std::string one = Slurp(c.run_dir / "verify/fidelity.csv");
  c.threads = 3;
  CmdVerify(c);
  EXPECT_EQ(Slurp(c.run_dir / "verify/fidelity.csv"), one);
  fs::remove_all(c.run_dir);
}

}  // namespace
}  // namespace pointexplainer
