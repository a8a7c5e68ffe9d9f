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


#include "pointexplainer/config.h"

#include <algorithm>
#include <functional>
#include <sstream>

#include "gtest/gtest.h"
#include "pointexplainer/error.h"

namespace pointexplainer {
namespace {

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kNumeric;
}

TEST(RunConfig, DefaultsValidate) {
  RunConfig c;
  EXPECT_NO_THROW(ValidateRunConfig(c));
  EXPECT_EQ(c.network().input_channels, 3);
  c.color = ColorMode::kDerived;
  EXPECT_EQ(c.network().input_channels, 6);
  EXPECT_EQ(c.resolved_cohort_dir(), std::filesystem::path("run") / "cohort");
}

TEST(RunConfig, TextRoundTrip) {
  RunConfig c;
  ApplyOverride(c, "seed=42");
  ApplyOverride(c, "strategy=height_flatten");
  ApplyOverride(c, "surrogates=LR,XGB");
  ApplyOverride(c, "point_widths=8,16");
  ApplyOverride(c, "synth.tremor_amplitude=0.125");
  ApplyOverride(c, "ridge_lambda=0.3");
  const std::string text = RunConfigToText(c);
  std::istringstream in(text);
  const RunConfig back = ParseRunConfig(in);
  EXPECT_EQ(RunConfigToText(back), text);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.strategy, PerturbationStrategy::kHeightFlatten);
  ASSERT_EQ(back.surrogates.size(), 2u);
  EXPECT_EQ(back.surrogates[1], SurrogateKind::kXGB);
  EXPECT_EQ(back.point_widths, (std::vector<int>{8, 16}));
  EXPECT_EQ(back.cohort.tremor_amplitude, 0.125);
  EXPECT_EQ(back.hyper.ridge_lambda, 0.3);
}

TEST(RunConfig, TextListsEveryKeyOnce) {
  const std::string text = "\n" + RunConfigToText(RunConfig{});
  for (const auto& key : RunConfigKeys()) {
    EXPECT_NE(text.find("\n" + key + " = "), std::string::npos) << key;
  }
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'),
            static_cast<long>(RunConfigKeys().size()) + 1);
}

TEST(RunConfig, CommentsAndBlankLines) {
  std::istringstream in("# comment\n\n  epochs = 3  \nalpha=0.25\n");
  const RunConfig c = ParseRunConfig(in);
  EXPECT_EQ(c.epochs, 3);
  EXPECT_EQ(c.alpha, 0.25);
}

TEST(RunConfig, ErrorsAreConfigErrors) {
  RunConfig c;
  EXPECT_EQ(KindOf([&] { ApplyOverride(c, "no_such_key=1"); }),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { ApplyOverride(c, "epochs"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { ApplyOverride(c, "epochs=three"); }),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { ApplyOverride(c, "strategy=blur"); }),
            ErrorKind::kConfig);
}

TEST(RunConfig, ParseErrorNamesTheLine) {
  std::istringstream in("epochs = 3\nalpha = 0.5\nbogus = 1\n");
  try {
    ParseRunConfig(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, ValidationRejectsOutOfRange) {
  auto invalid = [](const std::string& assignment) {
    RunConfig c;
    return KindOf([&] {
             ApplyOverride(c, assignment);
             ValidateRunConfig(c);
           }) == ErrorKind::kConfig;
  };
  EXPECT_TRUE(invalid("alpha=1.5"));
  EXPECT_TRUE(invalid("folds=1"));
  EXPECT_TRUE(invalid("superpoints=0"));
  EXPECT_TRUE(invalid("confidence=1"));
}

TEST(RunConfig, MissingFileIsConfigError) {
  EXPECT_EQ(KindOf([] { LoadRunConfig("/nonexistent/config.txt"); }),
            ErrorKind::kConfig);
}

}  // namespace
}  // namespace pointexplainer
