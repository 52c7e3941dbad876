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

namespace larkms {

/// Ordered `key = value` text configuration. Blank lines and lines starting
/// with '#' are ignored; a repeated key overrides the earlier value.
class KeyValueConfig {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::string comment;  ///< emitted as a trailing "# ..." when written
  };

  KeyValueConfig() = default;

  [[nodiscard]] static KeyValueConfig parse(std::string_view text, std::string_view origin = "<config>");
  [[nodiscard]] static KeyValueConfig load(const std::filesystem::path& path);

  [[nodiscard]] bool has(std::string_view key) const;
  [[nodiscard]] std::optional<std::string> find(std::string_view key) const;

  /// Throws Error(schema) naming the key when absent or malformed.
  [[nodiscard]] std::string get_string(std::string_view key) const;
  [[nodiscard]] double get_double(std::string_view key) const;
  [[nodiscard]] long long get_int(std::string_view key) const;
  [[nodiscard]] bool get_bool(std::string_view key) const;

  [[nodiscard]] std::string get_string_or(std::string_view key, std::string fallback) const;
  [[nodiscard]] double get_double_or(std::string_view key, double fallback) const;
  [[nodiscard]] long long get_int_or(std::string_view key, long long fallback) const;
  [[nodiscard]] bool get_bool_or(std::string_view key, bool fallback) const;

  void set(std::string_view key, std::string value, std::string comment = {});
  void set(std::string_view key, double value, std::string comment = {});

  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Serialized form; doubles use shortest round-trip formatting.
  [[nodiscard]] std::string to_string(std::string_view header = {}) const;
  void save(const std::filesystem::path& path, std::string_view header = {}) const;

 private:
  [[nodiscard]] const Entry* lookup(std::string_view key) const;
  std::vector<Entry> entries_;
};

}  // namespace larkms
