// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace contra {

/// 17 significant digits, always recognisable as a float.
inline std::string format_double(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

/// Builds one line-delimited record with fields in insertion order.
class RecordWriter {
 public:
  RecordWriter& field(std::string_view key, std::string_view value) {
    return raw(key, nlohmann::json(std::string{value}).dump());
  }
  RecordWriter& field(std::string_view key, const char* value) { return field(key, std::string_view{value}); }
  RecordWriter& field(std::string_view key, double value) { return raw(key, format_double(value)); }
  RecordWriter& field(std::string_view key, std::int64_t value) { return raw(key, std::to_string(value)); }
  RecordWriter& field(std::string_view key, std::uint64_t value) { return raw(key, std::to_string(value)); }
  RecordWriter& field(std::string_view key, int value) { return raw(key, std::to_string(value)); }
  RecordWriter& field(std::string_view key, bool value) { return raw(key, value ? "true" : "false"); }
  RecordWriter& null(std::string_view key) { return raw(key, "null"); }

  RecordWriter& field(std::string_view key, const std::vector<int>& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
    return raw(key, s + "]");
  }

  RecordWriter& raw(std::string_view key, std::string_view json_value) {
    body_ += body_.empty() ? "{" : ",";
    body_ += nlohmann::json(std::string{key}).dump();
    body_ += ':';
    body_ += json_value;
    return *this;
  }

  std::string str() const { return body_.empty() ? "{}" : body_ + "}"; }

 private:
  std::string body_;
};

}  // namespace contra
