// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Strict JSON reading: every accessor records the key it consumed so that
// finish() can reject anything the schema does not know about. Errors are
// kParse and carry the dotted field path.

#ifndef GREENLOOP_JSON_UTIL_HPP_
#define GREENLOOP_JSON_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"

namespace greenloop {

using Json = nlohmann::json;

// Parses `text`; syntax errors become kParse with "source:line:column".
Json parse_json(std::string_view text, std::string_view source);
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// 2-space indent, keys sorted, trailing newline.
std::string dump_json(const Json& j);

[[noreturn]] void throw_field_error(const std::string& path, std::string_view message);

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  const std::string& path() const { return path_; }
  std::string field(std::string_view key) const;
  bool has(std::string_view key) const;

  // Required values.
  const Json& at(std::string_view key);
  double number(std::string_view key);
  int64_t integer(std::string_view key);
  uint64_t unsigned_integer(std::string_view key);
  std::string string(std::string_view key);
  bool boolean(std::string_view key);
  ObjectReader object(std::string_view key);
  const Json& array(std::string_view key);

  // Defaults when absent.
  double number_or(std::string_view key, double fallback);
  int64_t integer_or(std::string_view key, int64_t fallback);
  uint64_t unsigned_or(std::string_view key, uint64_t fallback);
  std::string string_or(std::string_view key, std::string fallback);
  bool boolean_or(std::string_view key, bool fallback);

  // Throws on any key never consumed.
  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

// Element accessors for arrays and map values.
double as_number(const Json& j, const std::string& path);
std::string as_string(const Json& j, const std::string& path);

}  // namespace greenloop

#endif  // GREENLOOP_JSON_UTIL_HPP_
