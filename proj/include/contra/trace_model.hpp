// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "contra/diagnostic.hpp"
#include "contra/literal.hpp"

namespace contra {

// ---------------------------------------------------------------------------
// Ground truth

/// One block of a reference execution. Line numbers are relative to the
/// function signature, which is line 0.
struct GroundTruthBlock {
  std::size_t index = 0;  // 1-based
  std::size_t line_start = 0;
  std::size_t line_end = 0;
  std::vector<std::string> code_lines;
  LiteralValue post_state;  // mapping of variable name to value
  std::uint64_t weight = 1;
};

struct GroundTruthTrace {
  std::string id;
  std::string function_name;
  std::string source;
  std::vector<LiteralValue> input;
  std::vector<GroundTruthBlock> blocks;
  LiteralValue return_value;

  std::uint64_t total_weight() const {
    return std::accumulate(blocks.begin(), blocks.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const GroundTruthBlock& b) { return acc + b.weight; });
  }
  std::size_t block_count() const { return blocks.size(); }
};

// ---------------------------------------------------------------------------
// Model output

struct CodeLine {
  std::size_t number = 0;
  std::string text;  // source text after the four-space separator
};

struct ParsedBlock {
  std::size_t index = 0;      // 1-based
  std::size_t text_line = 0;  // line offset of its [CODE] tag in the raw text
  std::vector<CodeLine> code_lines;
  std::string thought;
  LiteralValue locals;
};

struct ReturnAssertion {
  std::string call_text;
  std::string function_name;
  std::vector<LiteralValue> arguments;
  LiteralValue predicted;
};

struct ParsedTrace {
  std::vector<ParsedBlock> blocks;
  ReturnAssertion return_assertion;
  std::string raw_text;
};

/// Blocks parsed from a truncated trace. `failure` is set when a block-level
/// check failed; `blocks` then holds only the blocks before the failing one.
struct PartialTrace {
  std::vector<ParsedBlock> blocks;
  std::optional<Failure> failure;
  bool closed = false;  // a [RETURN] section was reached
};

struct RewardBreakdown {
  int delta_fmt = 0;
  std::vector<int> deltas;
  std::vector<int> prefix_products;
  double r_proc = 0.0;
  double r_res = 0.0;
  bool gate_open = false;
  double total = 0.0;
  double alpha = 1.0;
  std::optional<Failure> format_failure;
  // 1-based index of the first inconsistent block, 0 when none.
  std::size_t first_inconsistent_block = 0;
};

// ---------------------------------------------------------------------------
// Errors

enum class TraceErrorKind { Schema, Literal, Contiguity };

inline std::string_view to_string(TraceErrorKind kind) {
  switch (kind) {
    case TraceErrorKind::Schema: return "SchemaError";
    case TraceErrorKind::Literal: return "LiteralError";
    case TraceErrorKind::Contiguity: return "ContiguityError";
  }
  return "TraceError";
}

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceErrorKind kind, const std::string& what)
      : std::runtime_error(std::string{to_string(kind)} + ": " + what), kind_(kind) {}
  TraceErrorKind kind() const { return kind_; }

 private:
  TraceErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Wire formats

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     nlohmann::json::value_t type) {
  if (!obj.is_object() || !obj.contains(key))
    throw TraceError(TraceErrorKind::Schema, std::string{"missing field '"} + key + "'");
  const auto& v = obj.at(key);
  const bool ok = type == nlohmann::json::value_t::number_unsigned
                      ? v.is_number_integer()
                      : v.type() == type;
  if (!ok) throw TraceError(TraceErrorKind::Schema, std::string{"field '"} + key + "' has the wrong type");
  return v;
}

inline std::uint64_t require_unsigned(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key, nlohmann::json::value_t::number_unsigned);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) throw TraceError(TraceErrorKind::Schema, std::string{"field '"} + key + "' is negative");
  return static_cast<std::uint64_t>(s);
}

inline LiteralValue parse_field(const std::string& text, const std::string& what) {
  try {
    return parse_literal(text);
  } catch (const LiteralError& e) {
    throw TraceError(TraceErrorKind::Literal, what + ": " + e.what());
  }
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !LiteralReader::is_ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), LiteralReader::is_ident_char);
}

}  // namespace detail

/// Checks the structural invariants of a ground-truth trace.
inline void check_ground_truth(const GroundTruthTrace& gt) {
  if (!detail::is_identifier(gt.function_name))
    throw TraceError(TraceErrorKind::Schema, "function_name is not an identifier");
  if (gt.blocks.size() < 2)
    throw TraceError(TraceErrorKind::Schema, "a trace needs the signature block and at least one body block");
  std::vector<std::string> joined;
  for (std::size_t i = 0; i < gt.blocks.size(); ++i) {
    const auto& b = gt.blocks[i];
    const std::string where = "block " + std::to_string(i + 1);
    if (b.weight < 1) throw TraceError(TraceErrorKind::Schema, where + ": weight must be >= 1");
    if (b.line_end < b.line_start)
      throw TraceError(TraceErrorKind::Schema, where + ": line_end precedes line_start");
    if (b.code_lines.size() != b.line_end - b.line_start + 1)
      throw TraceError(TraceErrorKind::Schema, where + ": code length does not match its line range");
    if (!b.post_state.is(LiteralKind::Mapping))
      throw TraceError(TraceErrorKind::Schema, where + ": locals is not a mapping");
    for (const auto& [key, value] : b.post_state.entries())
      if (!key.is(LiteralKind::Text))
        throw TraceError(TraceErrorKind::Schema, where + ": locals keys must be variable names");
    if (i == 0 && (b.line_start != 0 || b.line_end != 0))
      throw TraceError(TraceErrorKind::Contiguity, "block 1 must be exactly the signature line 0");
    if (i > 0 && b.line_start != gt.blocks[i - 1].line_end + 1)
      throw TraceError(TraceErrorKind::Contiguity,
                       where + " starts at line " + std::to_string(b.line_start) + ", expected " +
                           std::to_string(gt.blocks[i - 1].line_end + 1));
    joined.insert(joined.end(), b.code_lines.begin(), b.code_lines.end());
  }
  if (gt.total_weight() > (std::uint64_t{1} << 52))
    throw TraceError(TraceErrorKind::Schema, "total weight too large for exact scoring");
  std::string_view source = gt.source;
  if (!source.empty() && source.back() == '\n') source.remove_suffix(1);
  if (detail::split_lines(source) != joined)
    throw TraceError(TraceErrorKind::Schema, "block code does not reproduce the function source");
}

/// Parses one ground-truth record and verifies its invariants.
inline GroundTruthTrace load_ground_truth(const nlohmann::json& record) {
  using vt = nlohmann::json::value_t;
  if (!record.is_object()) throw TraceError(TraceErrorKind::Schema, "record is not an object");
  GroundTruthTrace gt;
  gt.id = detail::require(record, "id", vt::string).get<std::string>();
  gt.function_name = detail::require(record, "function_name", vt::string).get<std::string>();
  gt.source = detail::require(record, "source", vt::string).get<std::string>();

  const auto& input = detail::require(record, "input", vt::array);
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!input[i].is_string()) throw TraceError(TraceErrorKind::Schema, "input entries must be literal text");
    gt.input.push_back(detail::parse_field(input[i].get<std::string>(), "input " + std::to_string(i)));
  }

  const auto& blocks = detail::require(record, "blocks", vt::array);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& jb = blocks[i];
    GroundTruthBlock b;
    b.index = i + 1;
    b.line_start = detail::require_unsigned(jb, "line_start");
    b.line_end = detail::require_unsigned(jb, "line_end");
    for (const auto& line : detail::require(jb, "code", vt::array)) {
      if (!line.is_string()) throw TraceError(TraceErrorKind::Schema, "code entries must be strings");
      b.code_lines.push_back(line.get<std::string>());
    }
    b.post_state = detail::parse_field(detail::require(jb, "locals", vt::string).get<std::string>(),
                                       "locals of block " + std::to_string(i + 1));
    b.weight = detail::require_unsigned(jb, "weight");
    gt.blocks.push_back(std::move(b));
  }
  gt.return_value = detail::parse_field(detail::require(record, "return", vt::string).get<std::string>(), "return");
  check_ground_truth(gt);
  return gt;
}

inline GroundTruthTrace load_ground_truth(std::string_view line) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceError(TraceErrorKind::Schema, std::string{"malformed record: "} + e.what());
  }
  return load_ground_truth(record);
}

inline GroundTruthTrace load_ground_truth(const std::string& line) { return load_ground_truth(std::string_view{line}); }
inline GroundTruthTrace load_ground_truth(const char* line) { return load_ground_truth(std::string_view{line}); }

inline nlohmann::ordered_json dump_ground_truth(const GroundTruthTrace& gt) {
  nlohmann::ordered_json out;
  out["id"] = gt.id;
  out["function_name"] = gt.function_name;
  out["source"] = gt.source;
  out["input"] = nlohmann::ordered_json::array();
  for (const auto& arg : gt.input) out["input"].push_back(render_literal(arg));
  out["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : gt.blocks) {
    nlohmann::ordered_json jb;
    jb["line_start"] = b.line_start;
    jb["line_end"] = b.line_end;
    jb["code"] = b.code_lines;
    jb["locals"] = render_literal(b.post_state);
    jb["weight"] = b.weight;
    out["blocks"].push_back(std::move(jb));
  }
  out["return"] = render_literal(gt.return_value);
  return out;
}

/// `f(arg1, arg2)` with canonical argument renderings.
inline std::string render_call(const GroundTruthTrace& gt) {
  std::string call = gt.function_name + "(";
  for (std::size_t i = 0; i < gt.input.size(); ++i) {
    if (i) call += ", ";
    call += render_literal(gt.input[i]);
  }
  return call + ")";
}

struct RolloutRecord {
  std::string id;
  std::string trace_text;
};

inline RolloutRecord load_rollout(std::string_view line) {
  using vt = nlohmann::json::value_t;
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceError(TraceErrorKind::Schema, std::string{"malformed rollout record: "} + e.what());
  }
  if (!record.is_object()) throw TraceError(TraceErrorKind::Schema, "rollout record is not an object");
  return {detail::require(record, "id", vt::string).get<std::string>(),
          detail::require(record, "trace_text", vt::string).get<std::string>()};
}

}  // namespace contra
