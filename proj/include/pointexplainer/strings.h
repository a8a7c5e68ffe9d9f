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

#ifndef POINTEXPLAINER_STRINGS_H_
#define POINTEXPLAINER_STRINGS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pointexplainer {

std::string_view Trim(std::string_view text);
std::vector<std::string_view> Split(std::string_view text, char delimiter);

std::optional<double> ParseDouble(std::string_view text);
std::optional<long long> ParseInt(std::string_view text);

// Shortest representation that round-trips exactly.
std::string FormatDouble(double value);

std::string ToLower(std::string_view text);

}  // namespace pointexplainer

#endif  // POINTEXPLAINER_STRINGS_H_
