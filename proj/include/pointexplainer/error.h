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

#ifndef POINTEXPLAINER_ERROR_H_
#define POINTEXPLAINER_ERROR_H_

#include <stdexcept>
#include <string>

namespace pointexplainer {

// Broad failure category. The command-line tool maps each category onto a
// process exit code.
enum class ErrorKind {
  kConfig,   // invalid configuration or argument
  kData,     // malformed or missing input data
  kNumeric,  // numerical failure (degenerate design, undefined statistic)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}
inline Error DataError(const std::string& message) {
  return Error(ErrorKind::kData, message);
}
inline Error NumericError(const std::string& message) {
  return Error(ErrorKind::kNumeric, message);
}

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_ERROR_H_
