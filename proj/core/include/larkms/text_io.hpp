// Copyright 2026 The larkms Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace larkms::text {

/// Shortest decimal form that parses back to the identical double.
[[nodiscard]] std::string format_double(double v);

/// Fixed-precision form for human-facing tables.
[[nodiscard]] std::string format_fixed(double v, int digits);

[[nodiscard]] std::optional<double> parse_double(std::string_view s);
[[nodiscard]] std::optional<long long> parse_int(std::string_view s);

[[nodiscard]] std::string_view trim(std::string_view s);

/// Splits on commas, tabs or runs of spaces; empty fields between commas are kept.
[[nodiscard]] std::vector<std::string_view> split_fields(std::string_view line);

/// Splits on runs of whitespace only.
[[nodiscard]] std::vector<std::string_view> split_whitespace(std::string_view line);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace larkms::text
