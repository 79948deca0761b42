// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace contra {

enum class FailureCode {
  MissingTag,
  TagNotAlone,
  SectionOrder,
  EmptySection,
  LineNoPattern,
  LineNoGap,
  BlockCountMismatch,
  BoundaryMismatch,
  CodeMismatch,
  LocalsNotMapping,
  ReturnNotAssertion,
  ReturnNotLiteral,
  CallMismatch,
  TrailingContent,
};

inline std::string_view to_string(FailureCode code) {
  switch (code) {
    case FailureCode::MissingTag: return "MissingTag";
    case FailureCode::TagNotAlone: return "TagNotAlone";
    case FailureCode::SectionOrder: return "SectionOrder";
    case FailureCode::EmptySection: return "EmptySection";
    case FailureCode::LineNoPattern: return "LineNoPattern";
    case FailureCode::LineNoGap: return "LineNoGap";
    case FailureCode::BlockCountMismatch: return "BlockCountMismatch";
    case FailureCode::BoundaryMismatch: return "BoundaryMismatch";
    case FailureCode::CodeMismatch: return "CodeMismatch";
    case FailureCode::LocalsNotMapping: return "LocalsNotMapping";
    case FailureCode::ReturnNotAssertion: return "ReturnNotAssertion";
    case FailureCode::ReturnNotLiteral: return "ReturnNotLiteral";
    case FailureCode::CallMismatch: return "CallMismatch";
    case FailureCode::TrailingContent: return "TrailingContent";
  }
  return "Unknown";
}

/// Where a format check failed. `block` is 1-based (0 = outside any block);
/// `line` is the 0-based line offset in the raw text.
struct Location {
  std::size_t block = 0;
  std::size_t line = 0;
};

struct Failure {
  FailureCode code;
  Location location;
  std::string reason;
};

/// Outcome of the strict format check (verdict 1 iff no failure).
struct FormatDiagnostic {
  std::optional<Failure> failure;

  int verdict() const { return failure ? 0 : 1; }
  bool ok() const { return !failure.has_value(); }

  static FormatDiagnostic pass() { return {}; }
  static FormatDiagnostic fail(FailureCode code, Location loc, std::string reason) {
    return FormatDiagnostic{Failure{code, loc, std::move(reason)}};
  }
};

}  // namespace contra
