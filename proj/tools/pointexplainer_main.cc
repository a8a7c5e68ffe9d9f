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


// Command-line front end: synth, train, explain, verify, report.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pointexplainer/config.h"
#include "pointexplainer/error.h"
#include "pointexplainer/pipeline.h"

namespace pe = pointexplainer;

namespace {

int ExitCode(pe::ErrorKind kind) {
  switch (kind) {
    case pe::ErrorKind::kConfig:
      return 2;
    case pe::ErrorKind::kData:
      return 3;
    case pe::ErrorKind::kNumeric:
      return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-cloud diagnosis and explanation of hand-drawn signals",
               "pointexplainer"};
  app.set_version_flag("--version", std::string(pe::kVersion));
  app.require_subcommand(0, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string run_dir;
  long long seed = -1;
  int threads = 0;
  app.add_option("-c,--config", config_path, "Configuration file (key = value)");
  app.add_option("-s,--set", overrides, "Override a setting, key=value")
      ->allow_extra_args(false);
  app.add_option("--run-dir", run_dir, "Run directory");
  app.add_option("--seed", seed, "Master seed")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "Print configuration keys and exit");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
  auto* train = app.add_subcommand("train", "Cross-validate and train");
  auto* explain =
      app.add_subcommand("explain", "Explain the diagnosis of one subject");
  std::string subject;
  explain->add_option("subject", subject, "Subject id")->required();
  auto* verify = app.add_subcommand("verify", "Surrogate fidelity metrics");
  auto* report = app.add_subcommand("report", "ROC, calibration and DCA");
  auto* show = app.add_subcommand("config", "Print the resolved configuration");
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list_keys) {
      for (const auto& key : pe::RunConfigKeys()) std::cout << key << '\n';
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << "error: a command is required (see --help)\n";
      return 2;
    }
    pe::RunConfig config =
        config_path.empty() ? pe::RunConfig{} : pe::LoadRunConfig(config_path);
    for (const auto& o : overrides) pe::ApplyOverride(config, o);
    if (!run_dir.empty()) config.run_dir = run_dir;
    if (seed >= 0) config.seed = static_cast<uint64_t>(seed);
    if (threads > 0) config.threads = threads;
    pe::ValidateRunConfig(config);

    pe::CommandResult result;
    if (*show) {
      std::cout << pe::RunConfigToText(config);
      return 0;
    } else if (*synth) {
      result = pe::CmdSynth(config);
    } else if (*train) {
      result = pe::CmdTrain(config);
    } else if (*explain) {
      result = pe::CmdExplain(config, subject);
    } else if (*verify) {
      result = pe::CmdVerify(config);
    } else if (*report) {
      result = pe::CmdReport(config);
    }
    std::cout << result.summary << '\n';
    for (const auto& path : result.outputs) std::cerr << "wrote " << path << '\n';
    return 0;
  } catch (const pe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
