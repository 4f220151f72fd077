// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/json_util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "greenloop/error.hpp"

namespace greenloop {

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const size_t offset = e.byte == 0 ? 0 : std::min<size_t>(e.byte - 1, text.size());
    size_t line = 1;
    size_t column = 1;
    for (size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorCode::kParse, fmt::format("{}:{}:{}: {}", source, line, column, what));
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, fmt::format("short write to '{}'", path.string()));
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void throw_field_error(const std::string& path, std::string_view message) {
  throw Error(ErrorCode::kParse, fmt::format("{}: {}", path.empty() ? "<root>" : path, message));
}

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw_field_error(path_, "expected an object");
}

std::string ObjectReader::field(std::string_view key) const {
  return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
}

bool ObjectReader::has(std::string_view key) const { return j_.contains(key); }

const Json& ObjectReader::at(std::string_view key) {
  auto it = j_.find(key);
  if (it == j_.end()) throw_field_error(field(key), "required field is missing");
  used_.emplace(key);
  return *it;
}

double ObjectReader::number(std::string_view key) { return as_number(at(key), field(key)); }

int64_t ObjectReader::integer(std::string_view key) {
  const Json& v = at(key);
  if (!v.is_number_integer()) throw_field_error(field(key), "expected an integer");
  return v.get<int64_t>();
}

uint64_t ObjectReader::unsigned_integer(std::string_view key) {
  const Json& v = at(key);
  if (!v.is_number_unsigned()) throw_field_error(field(key), "expected a nonnegative integer");
  return v.get<uint64_t>();
}

std::string ObjectReader::string(std::string_view key) { return as_string(at(key), field(key)); }

bool ObjectReader::boolean(std::string_view key) {
  const Json& v = at(key);
  if (!v.is_boolean()) throw_field_error(field(key), "expected true or false");
  return v.get<bool>();
}

ObjectReader ObjectReader::object(std::string_view key) { return ObjectReader(at(key), field(key)); }

const Json& ObjectReader::array(std::string_view key) {
  const Json& v = at(key);
  if (!v.is_array()) throw_field_error(field(key), "expected an array");
  return v;
}

double ObjectReader::number_or(std::string_view key, double fallback) {
  return has(key) ? number(key) : fallback;
}

int64_t ObjectReader::integer_or(std::string_view key, int64_t fallback) {
  return has(key) ? integer(key) : fallback;
}

uint64_t ObjectReader::unsigned_or(std::string_view key, uint64_t fallback) {
  return has(key) ? unsigned_integer(key) : fallback;
}

std::string ObjectReader::string_or(std::string_view key, std::string fallback) {
  return has(key) ? string(key) : fallback;
}

bool ObjectReader::boolean_or(std::string_view key, bool fallback) {
  return has(key) ? boolean(key) : fallback;
}

void ObjectReader::finish() const {
  for (const auto& [key, value] : j_.items()) {
    if (!used_.contains(key)) throw_field_error(field(key), "unknown field");
  }
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw_field_error(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw_field_error(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace greenloop
