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

#include <stdexcept>
#include <string>
#include <string_view>

namespace larkms {

/// Coarse failure classes. The CLI prints the category name as the first
/// token of its one-line error message.
enum class ErrorCategory {
  io,
  parse,
  invalid_argument,
  domain,
  elicitation,
  sampler,
  schema,
};

[[nodiscard]] constexpr std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::io: return "io";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::elicitation: return "elicitation";
    case ErrorCategory::sampler: return "sampler";
    case ErrorCategory::schema: return "schema";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Elicitation failure that names the config key a caller must set by hand.
class ElicitationError : public Error {
 public:
  ElicitationError(std::string key, const std::string& what)
      : Error(ErrorCategory::elicitation, what), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace larkms
