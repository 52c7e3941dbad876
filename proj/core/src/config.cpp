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

#include "larkms/config.hpp"

#include <sstream>

#include "larkms/error.hpp"
#include "larkms/text_io.hpp"

namespace larkms {

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view origin) {
  KeyValueConfig cfg;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCategory::parse, std::string(origin) + ":" + std::to_string(line_no) +
                                            ": expected key = value");
    }
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCategory::parse,
                  std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.set(key, std::string(value));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCategory::io, "config file not found: " + path.string());
  }
  return parse(text::read_file(path), path.string());
}

const KeyValueConfig::Entry* KeyValueConfig::lookup(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

bool KeyValueConfig::has(std::string_view key) const { return lookup(key) != nullptr; }

std::optional<std::string> KeyValueConfig::find(std::string_view key) const {
  if (const auto* e = lookup(key)) return e->value;
  return std::nullopt;
}

std::string KeyValueConfig::get_string(std::string_view key) const {
  if (const auto* e = lookup(key)) return e->value;
  throw Error(ErrorCategory::schema, "missing config key: " + std::string(key));
}

double KeyValueConfig::get_double(std::string_view key) const {
  const auto v = text::parse_double(get_string(key));
  if (!v) throw Error(ErrorCategory::schema, "config key is not a number: " + std::string(key));
  return *v;
}

long long KeyValueConfig::get_int(std::string_view key) const {
  const auto v = text::parse_int(get_string(key));
  if (!v) throw Error(ErrorCategory::schema, "config key is not an integer: " + std::string(key));
  return *v;
}

bool KeyValueConfig::get_bool(std::string_view key) const {
  const auto v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCategory::schema, "config key is not a boolean: " + std::string(key));
}

std::string KeyValueConfig::get_string_or(std::string_view key, std::string fallback) const {
  return has(key) ? get_string(key) : std::move(fallback);
}

double KeyValueConfig::get_double_or(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int_or(std::string_view key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool_or(std::string_view key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

void KeyValueConfig::set(std::string_view key, std::string value, std::string comment) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      e.comment = std::move(comment);
      return;
    }
  }
  entries_.push_back({std::string(key), std::move(value), std::move(comment)});
}

void KeyValueConfig::set(std::string_view key, double value, std::string comment) {
  set(key, text::format_double(value), std::move(comment));
}

std::string KeyValueConfig::to_string(std::string_view header) const {
  std::ostringstream out;
  if (!header.empty()) out << "# " << header << '\n';
  for (const auto& e : entries_) {
    out << e.key << " = " << e.value;
    if (!e.comment.empty()) out << "  # " << e.comment;
    out << '\n';
  }
  return out.str();
}

void KeyValueConfig::save(const std::filesystem::path& path, std::string_view header) const {
  text::write_file(path, to_string(header));
}

}  // namespace larkms
