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

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "pointexplainer/error.h"
#include "pointexplainer/strings.h"

namespace pointexplainer {
namespace {

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void Bad(std::string_view key, std::string_view value,
                      std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " +
                    std::string(key) + ": expected " + std::string(expected));
}

double ToDouble(std::string_view key, std::string_view value) {
  const auto v = ParseDouble(value);
  if (!v || !std::isfinite(*v)) Bad(key, value, "a number");
  return *v;
}

long long ToInt(std::string_view key, std::string_view value, long long lo,
                long long hi) {
  const auto v = ParseInt(value);
  if (!v || *v < lo || *v > hi) {
    Bad(key, value,
        "an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
            "]");
  }
  return *v;
}

uint64_t ToU64(std::string_view key, std::string_view value) {
  uint64_t out = 0;
  const std::string_view t = Trim(value);
  if (t.empty()) Bad(key, value, "an unsigned integer");
  for (char c : t) {
    if (c < '0' || c > '9') Bad(key, value, "an unsigned integer");
    const uint64_t digit = static_cast<uint64_t>(c - '0');
    if (out > (std::numeric_limits<uint64_t>::max() - digit) / 10) {
      Bad(key, value, "an unsigned 64-bit integer");
    }
    out = out * 10 + digit;
  }
  return out;
}

std::vector<int> ToIntList(std::string_view key, std::string_view value) {
  std::vector<int> out;
  for (auto part : Split(value, ',')) {
    out.push_back(static_cast<int>(ToInt(key, Trim(part), 1, 1 << 16)));
  }
  return out;
}

template <typename T, typename Name>
std::string JoinNames(const std::vector<T>& items, Name name) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += name(items[i]);
  }
  return out;
}

std::string JoinInts(const std::vector<int>& v) {
  return JoinNames(v, [](int x) { return std::to_string(x); });
}

std::string_view SchemaName(CsvSchema schema) {
  return schema == CsvSchema::kCanonical ? "canonical" : "semicolon_legacy";
}

CsvSchema ParseSchema(std::string_view key, std::string_view value) {
  const std::string lower = ToLower(Trim(value));
  if (lower == "canonical") return CsvSchema::kCanonical;
  if (lower == "semicolon_legacy") return CsvSchema::kSemicolonLegacy;
  Bad(key, value, "canonical or semicolon_legacy");
}

using Table = std::map<std::string, Field, std::less<>>;

template <typename T>
Field Int(T RunConfig::*member, long long lo, long long hi,
          std::string key) {
  return {[=](RunConfig& c, std::string_view v) {
            c.*member = static_cast<T>(ToInt(key, v, lo, hi));
          },
          [=](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field Real(double RunConfig::*member, std::string key) {
  return {[=](RunConfig& c, std::string_view v) { c.*member = ToDouble(key, v); },
          [=](const RunConfig& c) { return FormatDouble(c.*member); }};
}

Field CohortInt(int CohortParams::*member, std::string key) {
  return {[=](RunConfig& c, std::string_view v) {
            c.cohort.*member = static_cast<int>(ToInt(key, v, 0, 1 << 24));
          },
          [=](const RunConfig& c) { return std::to_string(c.cohort.*member); }};
}

Field CohortReal(double CohortParams::*member, std::string key) {
  return {[=](RunConfig& c, std::string_view v) {
            c.cohort.*member = ToDouble(key, v);
          },
          [=](const RunConfig& c) { return FormatDouble(c.cohort.*member); }};
}

template <typename T>
Field HyperInt(T SurrogateHyper::*member, std::string key) {
  return {[=](RunConfig& c, std::string_view v) {
            c.hyper.*member = static_cast<T>(ToInt(key, v, 0, 1 << 20));
          },
          [=](const RunConfig& c) { return std::to_string(c.hyper.*member); }};
}

Field HyperReal(double SurrogateHyper::*member, std::string key) {
  return {[=](RunConfig& c, std::string_view v) {
            c.hyper.*member = ToDouble(key, v);
          },
          [=](const RunConfig& c) { return FormatDouble(c.hyper.*member); }};
}

const Table& Fields() {
  static const Table table = [] {
    Table t;
    t["run_dir"] = {[](RunConfig& c, std::string_view v) {
                      c.run_dir = std::string(Trim(v));
                    },
                    [](const RunConfig& c) { return c.run_dir.string(); }};
    t["cohort_dir"] = {[](RunConfig& c, std::string_view v) {
                         c.cohort_dir = std::string(Trim(v));
                       },
                       [](const RunConfig& c) { return c.cohort_dir.string(); }};
    t["csv_schema"] = {[](RunConfig& c, std::string_view v) {
                         c.csv_schema = ParseSchema("csv_schema", v);
                       },
                       [](const RunConfig& c) {
                         return std::string(SchemaName(c.csv_schema));
                       }};
    t["synth.n_pd"] = CohortInt(&CohortParams::n_pd, "synth.n_pd");
    t["synth.n_hc"] = CohortInt(&CohortParams::n_hc, "synth.n_hc");
    t["synth.points"] = CohortInt(&CohortParams::points_per_subject, "synth.points");
    t["synth.pitch"] = CohortReal(&CohortParams::pitch, "synth.pitch");
    t["synth.turns"] = CohortReal(&CohortParams::turns, "synth.turns");
    t["synth.sample_rate"] = CohortReal(&CohortParams::sample_rate, "synth.sample_rate");
    t["synth.tremor_amplitude"] = CohortReal(&CohortParams::tremor_amplitude, "synth.tremor_amplitude");
    t["synth.tremor_frequency"] = CohortReal(&CohortParams::tremor_frequency, "synth.tremor_frequency");
    t["synth.tremor_phase_jitter"] = CohortReal(&CohortParams::tremor_phase_jitter, "synth.tremor_phase_jitter");
    t["synth.micrographia_rate"] = CohortReal(&CohortParams::micrographia_rate, "synth.micrographia_rate");
    t["synth.pressure_drift"] = CohortReal(&CohortParams::pressure_drift, "synth.pressure_drift");
    t["synth.noise"] = CohortReal(&CohortParams::noise, "synth.noise");
    t["height_feature"] = {[](RunConfig& c, std::string_view v) {
                             c.height_feature = ParseHeightFeature(Trim(v));
                           },
                           [](const RunConfig& c) {
                             return std::string(
                                 HeightFeatureName(c.height_feature));
                           }};
    t["color"] = {[](RunConfig& c, std::string_view v) {
                    c.color = ParseColorMode(Trim(v));
                  },
                  [](const RunConfig& c) {
                    return std::string(ColorModeName(c.color));
                  }};
    t["window"] = Int(&RunConfig::window, 1, 1 << 20, "window");
    t["step"] = Int(&RunConfig::step, 1, 1 << 20, "step");
    t["alpha"] = Real(&RunConfig::alpha, "alpha");
    t["point_widths"] = {[](RunConfig& c, std::string_view v) {
                           c.point_widths = ToIntList("point_widths", v);
                         },
                         [](const RunConfig& c) {
                           return JoinInts(c.point_widths);
                         }};
    t["head_widths"] = {[](RunConfig& c, std::string_view v) {
                          c.head_widths = Trim(v).empty()
                                              ? std::vector<int>{}
                                              : ToIntList("head_widths", v);
                        },
                        [](const RunConfig& c) {
                          return JoinInts(c.head_widths);
                        }};
    t["folds"] = Int(&RunConfig::folds, 2, 100, "folds");
    t["epochs"] = Int(&RunConfig::epochs, 1, 100000, "epochs");
    t["learning_rate"] = Real(&RunConfig::learning_rate, "learning_rate");
    t["weight_decay"] = Real(&RunConfig::weight_decay, "weight_decay");
    t["batch_size"] = Int(&RunConfig::batch_size, 1, 1 << 20, "batch_size");
    t["superpoints"] = Int(&RunConfig::superpoints, 1, 64, "superpoints");
    t["perturbations"] =
        Int(&RunConfig::perturbations, 2, 1 << 20, "perturbations");
    t["strategy"] = {[](RunConfig& c, std::string_view v) {
                       c.strategy = ParseStrategy(Trim(v));
                     },
                     [](const RunConfig& c) {
                       return std::string(StrategyName(c.strategy));
                     }};
    t["verify_strategies"] = {
        [](RunConfig& c, std::string_view v) {
          c.verify_strategies.clear();
          for (auto part : Split(v, ',')) {
            c.verify_strategies.push_back(ParseStrategy(Trim(part)));
          }
        },
        [](const RunConfig& c) {
          return JoinNames(c.verify_strategies, [](PerturbationStrategy s) {
            return std::string(StrategyName(s));
          });
        }};
    t["surrogates"] = {
        [](RunConfig& c, std::string_view v) {
          c.surrogates.clear();
          for (auto part : Split(v, ',')) {
            c.surrogates.push_back(ParseSurrogateKind(Trim(part)));
          }
        },
        [](const RunConfig& c) {
          return JoinNames(c.surrogates, [](SurrogateKind k) {
            return std::string(SurrogateKindName(k));
          });
        }};
    t["explain_surrogate"] = {[](RunConfig& c, std::string_view v) {
                                c.explain_surrogate =
                                    ParseSurrogateKind(Trim(v));
                              },
                              [](const RunConfig& c) {
                                return std::string(
                                    SurrogateKindName(c.explain_surrogate));
                              }};
    t["ridge_lambda"] = HyperReal(&SurrogateHyper::ridge_lambda, "ridge_lambda");
    t["elastic_lambda"] =
        HyperReal(&SurrogateHyper::elastic_lambda, "elastic_lambda");
    t["elastic_rho"] = HyperReal(&SurrogateHyper::elastic_rho, "elastic_rho");
    t["elastic_tol"] = HyperReal(&SurrogateHyper::elastic_tol, "elastic_tol");
    t["elastic_max_sweeps"] =
        HyperInt(&SurrogateHyper::elastic_max_sweeps, "elastic_max_sweeps");
    t["tree_max_depth"] =
        HyperInt(&SurrogateHyper::tree_max_depth, "tree_max_depth");
    t["tree_min_leaf"] =
        HyperInt(&SurrogateHyper::tree_min_leaf, "tree_min_leaf");
    t["forest_trees"] = HyperInt(&SurrogateHyper::forest_trees, "forest_trees");
    t["boost_trees"] = HyperInt(&SurrogateHyper::boost_trees, "boost_trees");
    t["boost_depth"] = HyperInt(&SurrogateHyper::boost_depth, "boost_depth");
    t["boost_shrinkage"] =
        HyperReal(&SurrogateHyper::boost_shrinkage, "boost_shrinkage");
    t["boost_lambda"] = HyperReal(&SurrogateHyper::boost_lambda, "boost_lambda");
    t["verify_instances"] =
        Int(&RunConfig::verify_instances, 0, 1 << 20, "verify_instances");
    t["smoothing_window"] =
        Int(&RunConfig::smoothing_window, 1, 1 << 20, "smoothing_window");
    t["bootstrap"] = Int(&RunConfig::bootstrap, 1, 1 << 24, "bootstrap");
    t["confidence"] = Real(&RunConfig::confidence, "confidence");
    t["calibration_bins"] =
        Int(&RunConfig::calibration_bins, 1, 1000, "calibration_bins");
    t["sweep_points"] = Int(&RunConfig::sweep_points, 2, 100001, "sweep_points");
    t["seed"] = {[](RunConfig& c, std::string_view v) {
                   c.seed = ToU64("seed", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    t["threads"] = Int(&RunConfig::threads, 1, 1024, "threads");
    return t;
  }();
  return table;
}

}  // namespace

PointSetConfig RunConfig::network() const {
  PointSetConfig c;
  c.input_channels = color == ColorMode::kNone ? 3 : 6;
  c.point_widths = point_widths;
  c.head_widths = head_widths;
  return c;
}

TrainConfig RunConfig::training(uint64_t shuffle_seed) const {
  TrainConfig t;
  t.learning_rate = learning_rate;
  t.weight_decay = weight_decay;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.seed = shuffle_seed;
  return t;
}

void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value) {
  const auto it = Fields().find(Trim(key));
  if (it == Fields().end()) {
    throw ConfigError("unknown config key '" + std::string(Trim(key)) + "'");
  }
  it->second.set(config, Trim(value));
}

void ApplyOverride(RunConfig& config, std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) +
                      "' is not of the form key=value");
  }
  ApplySetting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig ParseRunConfig(std::istream& in, RunConfig base) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(number) +
                        ": expected key = value");
    }
    try {
      ApplySetting(base, text.substr(0, eq), text.substr(eq + 1));
    } catch (const Error& e) {
      throw ConfigError("config line " + std::to_string(number) + ": " +
                        e.what());
    }
  }
  return base;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return ParseRunConfig(in);
}

void ValidateRunConfig(const RunConfig& c) {
  ValidateCohortParams(c.cohort);
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1]");
  }
  if (c.point_widths.empty()) throw ConfigError("point_widths is empty");
  if (!(c.learning_rate > 0.0) || !(c.weight_decay >= 0.0)) {
    throw ConfigError("learning_rate must be > 0 and weight_decay >= 0");
  }
  if (c.verify_strategies.empty() || c.surrogates.empty()) {
    throw ConfigError("verify_strategies and surrogates must be non-empty");
  }
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) {
    throw ConfigError("confidence must lie in (0, 1)");
  }
  if (c.hyper.ridge_lambda < 0.0 || c.hyper.elastic_lambda < 0.0 ||
      c.hyper.elastic_rho < 0.0 || c.hyper.elastic_rho > 1.0 ||
      !(c.hyper.boost_shrinkage > 0.0) || c.hyper.boost_lambda < 0.0 ||
      c.hyper.forest_trees < 1 || c.hyper.boost_trees < 1) {
    throw ConfigError("surrogate hyperparameter out of range");
  }
}

std::string RunConfigToText(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& [key, field] : Fields()) {
    out << key << " = " << field.get(config) << '\n';
  }
  return out.str();
}

std::vector<std::string> RunConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& entry : Fields()) keys.push_back(entry.first);
  return keys;
}

}  // namespace pointexplainer
