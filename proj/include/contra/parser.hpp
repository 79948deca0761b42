// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contra/diagnostic.hpp"
#include "contra/literal.hpp"
#include "contra/trace_model.hpp"

namespace contra {

/// Result of a full-trace parse: a trace on success, otherwise the first failure.
struct ParseResult {
  std::optional<ParsedTrace> trace;
  FormatDiagnostic diagnostic;

  bool ok() const { return trace.has_value(); }
};

namespace detail {

inline constexpr std::array<std::string_view, 10> kTags = {
    "[TRACE]",  "[/TRACE]",  "[CODE]",   "[/CODE]",   "[THOUGHT]",
    "[/THOUGHT]", "[LOCALS]", "[/LOCALS]", "[RETURN]", "[/RETURN]"};

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

inline bool is_exact_tag(std::string_view line) {
  for (auto tag : kTags)
    if (line == tag) return true;
  return false;
}

// A line that starts like some tag once whitespace and case are ignored, but
// is not an exact tag line.
inline bool is_malformed_tag(std::string_view line) {
  if (is_exact_tag(line)) return false;
  const auto t = trim(line);
  for (auto tag : kTags)
    if (iequals_prefix(t, tag)) return true;
  return false;
}

// A well-formed single-line `[TAG] text [/TAG]` section.
inline bool is_inline_section(std::string_view line) {
  for (auto open : {std::string_view{"[THOUGHT]"}, std::string_view{"[LOCALS]"}, std::string_view{"[RETURN]"}}) {
    const std::string close = "[/" + std::string{open.substr(1)};
    if (line.size() > open.size() + close.size() && line.substr(0, open.size()) == open &&
        line.substr(line.size() - close.size()) == close)
      return true;
  }
  return false;
}

/// Parses `[LINENO X]    <source>`. Returns false on any deviation.
inline bool parse_lineno(std::string_view line, CodeLine& out) {
  constexpr std::string_view head = "[LINENO ";
  if (line.substr(0, head.size()) != head) return false;
  std::size_t p = head.size();
  const std::size_t digits_start = p;
  while (p < line.size() && line[p] >= '0' && line[p] <= '9') ++p;
  const std::size_t ndigits = p - digits_start;
  if (ndigits == 0 || ndigits > 18) return false;
  if (ndigits > 1 && line[digits_start] == '0') return false;
  if (p >= line.size() || line[p] != ']') return false;
  ++p;
  if (line.substr(p, 4) != "    ") return false;
  out.number = std::stoull(std::string{line.substr(digits_start, ndigits)});
  out.text = std::string{line.substr(p + 4)};
  return true;
}

class TraceScanner {
 public:
  enum class Mode { Full, Partial };

  TraceScanner(std::string_view text, Mode mode) : lines_(split_lines(text)), mode_(mode) {}

  // Returns a failure or nullopt; on success `blocks` and `ret` are filled.
  std::optional<Failure> scan_full(std::vector<ParsedBlock>& blocks, ReturnAssertion& ret) {
    if (auto f = expect_exact("[TRACE]", 0)) return f;
    for (;;) {
      if (eof()) return fail(FailureCode::MissingTag, 0, "expected [CODE] or [RETURN] before end of text");
      const std::string_view line = cur();
      if (line == "[CODE]") {
        ParsedBlock block;
        if (auto f = scan_block(blocks.size() + 1, block)) return f;
        blocks.push_back(std::move(block));
        skip_blank_lines();
        continue;
      }
      if (starts_with(line, "[RETURN]")) {
        if (blocks.empty()) return fail(FailureCode::SectionOrder, 0, "[RETURN] before any block");
        std::string content;
        if (auto f = read_section("[RETURN]", "[/RETURN]", 0, content)) return f;
        if (auto f = parse_return(content, ret)) return f;
        break;
      }
      return unexpected(line, "[CODE]", 0);
    }
    if (auto f = expect_exact("[/TRACE]", 0)) return f;
    for (; pos_ < lines_.size(); ++pos_)
      if (!trim(lines_[pos_]).empty())
        return fail(FailureCode::TrailingContent, 0, "content after [/TRACE]");
    return std::nullopt;
  }

  PartialTrace scan_partial() {
    PartialTrace out;
    if (all_blank()) return out;
    if (auto f = expect_exact("[TRACE]", 0)) {
      out.failure = std::move(f);
      return out;
    }
    for (;;) {
      if (eof()) return out;
      const std::string_view line = cur();
      if (line == "[CODE]") {
        ParsedBlock block;
        if (auto f = scan_block(out.blocks.size() + 1, block)) {
          out.failure = std::move(f);
          return out;
        }
        out.blocks.push_back(std::move(block));
        skip_blank_lines();
        continue;
      }
      if (starts_with(line, "[RETURN]")) {
        out.closed = true;
        return out;
      }
      out.failure = unexpected(line, "[CODE]", out.blocks.size() + 1);
      return out;
    }
  }

 private:
  static bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

  bool eof() const { return pos_ >= lines_.size(); }
  std::string_view cur() const { return lines_[pos_]; }

  bool all_blank() const {
    for (const auto& l : lines_)
      if (!trim(l).empty()) return false;
    return true;
  }

  // Splitting "...[/LOCALS]\n" yields a trailing empty line; those and the
  // blank separators between blocks are skipped here.
  void skip_blank_lines() {
    while (pos_ < lines_.size() && lines_[pos_].empty()) ++pos_;
  }

  Failure fail(FailureCode code, std::size_t block, std::string reason) const {
    return Failure{code, Location{block, pos_}, std::move(reason)};
  }

  Failure truncated(std::size_t block, std::string_view expected) const {
    if (mode_ == Mode::Partial)
      return fail(FailureCode::SectionOrder, block,
                  "block incomplete: text ends before " + std::string{expected});
    return fail(FailureCode::MissingTag, block, "missing " + std::string{expected});
  }

  Failure unexpected(std::string_view line, std::string_view expected, std::size_t block) const {
    if (is_exact_tag(line) || is_inline_section(line))
      return fail(FailureCode::SectionOrder, block,
                  "found " + std::string{line} + " where " + std::string{expected} + " was expected");
    if (is_malformed_tag(line))
      return fail(FailureCode::TagNotAlone, block, "malformed tag line '" + std::string{line} + "'");
    return fail(FailureCode::MissingTag, block, "expected " + std::string{expected});
  }

  std::optional<Failure> expect_exact(std::string_view tag, std::size_t block) {
    if (eof()) return truncated(block, tag);
    if (cur() != tag) return unexpected(cur(), tag, block);
    ++pos_;
    return std::nullopt;
  }

  // Reads THOUGHT/LOCALS/RETURN content: either an inline `[TAG] text [/TAG]`
  // line, or the tag alone followed by content lines and the closing tag alone.
  std::optional<Failure> read_section(std::string_view open, std::string_view close,
                                      std::size_t block, std::string& content) {
    if (eof()) return truncated(block, open);
    const std::string_view line = cur();
    if (line == open) {
      ++pos_;
      std::string body;
      bool first = true;
      for (;;) {
        if (eof()) return truncated(block, close);
        const std::string_view l = cur();
        if (l == close) break;
        if (is_exact_tag(l))
          return fail(FailureCode::SectionOrder, block,
                      "found " + std::string{l} + " inside " + std::string{open});
        if (is_malformed_tag(l)) return fail(FailureCode::TagNotAlone, block, "malformed tag line '" + std::string{l} + "'");
        if (!first) body += '\n';
        body += l;
        first = false;
        ++pos_;
      }
      if (trim(body).empty()) return fail(FailureCode::EmptySection, block, std::string{open} + " section is empty");
      content = std::string{trim(body)};
      ++pos_;
      return std::nullopt;
    }
    if (starts_with(line, open) && line.size() > open.size()) {
      if (line.size() < open.size() + close.size() || line.substr(line.size() - close.size()) != close) {
        if (mode_ == Mode::Partial && pos_ + 1 == lines_.size()) return truncated(block, close);
        return fail(FailureCode::TagNotAlone, block,
                    std::string{open} + " shares its line without a closing " + std::string{close});
      }
      const auto inner = trim(line.substr(open.size(), line.size() - open.size() - close.size()));
      if (inner.empty()) return fail(FailureCode::EmptySection, block, std::string{open} + " section is empty");
      content = std::string{inner};
      ++pos_;
      return std::nullopt;
    }
    return unexpected(line, open, block);
  }

  std::optional<Failure> scan_block(std::size_t index, ParsedBlock& block) {
    block.index = index;
    block.text_line = pos_;
    if (auto f = expect_exact("[CODE]", index)) return f;
    for (;;) {
      if (eof()) return truncated(index, "[/CODE]");
      const std::string_view line = cur();
      if (line == "[/CODE]") break;
      CodeLine cl;
      if (!parse_lineno(line, cl)) {
        if (is_exact_tag(line))
          return fail(FailureCode::SectionOrder, index, "found " + std::string{line} + " inside [CODE]");
        if (is_malformed_tag(line))
          return fail(FailureCode::TagNotAlone, index, "malformed tag line '" + std::string{line} + "'");
        return fail(FailureCode::LineNoPattern, index, "code line does not match '[LINENO X]    <source>'");
      }
      if (cl.number != next_lineno_)
        return fail(FailureCode::LineNoGap, index,
                    "line number " + std::to_string(cl.number) + ", expected " + std::to_string(next_lineno_));
      ++next_lineno_;
      block.code_lines.push_back(std::move(cl));
      ++pos_;
    }
    if (block.code_lines.empty()) return fail(FailureCode::EmptySection, index, "[CODE] section is empty");
    ++pos_;

    if (auto f = read_section("[THOUGHT]", "[/THOUGHT]", index, block.thought)) return f;

    const std::size_t locals_line = pos_;
    std::string locals_text;
    if (auto f = read_section("[LOCALS]", "[/LOCALS]", index, locals_text)) return f;
    try {
      block.locals = parse_literal(locals_text);
    } catch (const LiteralError& e) {
      return Failure{FailureCode::LocalsNotMapping, Location{index, locals_line}, e.what()};
    }
    if (!block.locals.is(LiteralKind::Mapping))
      return Failure{FailureCode::LocalsNotMapping, Location{index, locals_line},
                     "locals is a " + std::string{to_string(block.locals.kind())}};
    return std::nullopt;
  }

  std::optional<Failure> parse_return(const std::string& content, ReturnAssertion& ret) {
    const std::size_t line = pos_ == 0 ? 0 : pos_ - 1;
    auto failure = [&](FailureCode code, std::string reason) {
      return Failure{code, Location{0, line}, std::move(reason)};
    };
    constexpr std::string_view kw = "assert";
    if (content.substr(0, kw.size()) != kw || content.size() == kw.size() ||
        !std::isspace(static_cast<unsigned char>(content[kw.size()])))
      return failure(FailureCode::ReturnNotAssertion, "return section is not an assert statement");

    LiteralReader reader(content);
    reader.seek(kw.size());
    reader.peek();
    const std::size_t call_start = reader.position();
    const std::string_view name = reader.read_identifier();
    if (name.empty() || !reader.consume("("))
      return failure(FailureCode::ReturnNotAssertion, "expected 'assert <name>(<args>) == <literal>'");
    ret.function_name = std::string{name};
    ret.arguments.clear();
    try {
      while (!reader.consume(")")) {
        ret.arguments.push_back(reader.read_value());
        const char c = reader.peek();
        if (c != ',' && c != ')')
          return failure(FailureCode::ReturnNotAssertion, "call arguments must be literals");
        reader.consume(",");
      }
    } catch (const LiteralError& e) {
      return failure(FailureCode::ReturnNotAssertion, std::string{"call arguments must be literals: "} + e.what());
    }
    ret.call_text = content.substr(call_start, reader.position() - call_start);
    if (!reader.consume("==")) return failure(FailureCode::ReturnNotAssertion, "expected '==' after the call");
    try {
      ParseOptions opts;
      opts.allow_bare_tuple = false;
      ret.predicted = parse_literal(std::string_view{content}.substr(reader.position()), opts);
    } catch (const LiteralError& e) {
      return failure(FailureCode::ReturnNotLiteral, e.what());
    }
    return std::nullopt;
  }

  std::vector<std::string> lines_;
  Mode mode_;
  std::size_t pos_ = 0;
  std::size_t next_lineno_ = 0;
};

}  // namespace detail

/// Strict grammar check of a complete trace (no ground truth involved).
inline ParseResult parse_trace(std::string_view text) {
  detail::TraceScanner scanner(text, detail::TraceScanner::Mode::Full);
  ParsedTrace trace;
  if (auto failure = scanner.scan_full(trace.blocks, trace.return_assertion))
    return ParseResult{std::nullopt, FormatDiagnostic{std::move(failure)}};
  trace.raw_text = std::string{text};
  return ParseResult{std::move(trace), FormatDiagnostic::pass()};
}

/// Parses the blocks of a trace truncated at a [/LOCALS] or [/TRACE] boundary.
inline PartialTrace parse_partial(std::string_view text) {
  detail::TraceScanner scanner(text, detail::TraceScanner::Mode::Partial);
  return scanner.scan_partial();
}

/// Ground-truth alignment: block count, block boundaries, code content and the
/// asserted call.
inline FormatDiagnostic validate_against(const GroundTruthTrace& gt, const ParsedTrace& pt,
                                         const EqualityConfig& eq = {}) {
  if (pt.blocks.size() != gt.blocks.size())
    return FormatDiagnostic::fail(FailureCode::BlockCountMismatch, {},
                                  std::to_string(pt.blocks.size()) + " blocks, ground truth has " +
                                      std::to_string(gt.blocks.size()));
  for (std::size_t t = 0; t < gt.blocks.size(); ++t) {
    const auto& g = gt.blocks[t];
    const auto& p = pt.blocks[t];
    const Location loc{t + 1, p.text_line};
    if (p.code_lines.front().number != g.line_start || p.code_lines.back().number != g.line_end)
      return FormatDiagnostic::fail(FailureCode::BoundaryMismatch, loc,
                                    "block spans lines " + std::to_string(p.code_lines.front().number) + "-" +
                                        std::to_string(p.code_lines.back().number) + ", expected " +
                                        std::to_string(g.line_start) + "-" + std::to_string(g.line_end));
    for (std::size_t k = 0; k < g.code_lines.size(); ++k)
      if (detail::trim(p.code_lines[k].text) != detail::trim(g.code_lines[k]))
        return FormatDiagnostic::fail(FailureCode::CodeMismatch, Location{t + 1, p.text_line + 1 + k},
                                      "code differs from source line " + std::to_string(g.line_start + k));
  }
  const auto& call = pt.return_assertion;
  bool call_ok = call.function_name == gt.function_name && call.arguments.size() == gt.input.size();
  for (std::size_t i = 0; call_ok && i < gt.input.size(); ++i)
    call_ok = values_equal(call.arguments[i], gt.input[i], eq);
  if (!call_ok)
    return FormatDiagnostic::fail(FailureCode::CallMismatch, {},
                                  "asserted call '" + call.call_text + "' does not match " + render_call(gt));
  return FormatDiagnostic::pass();
}

/// Both format stages: grammar then alignment. `trace` is set whenever the
/// grammar stage succeeded.
struct FormatCheck {
  std::optional<ParsedTrace> trace;
  FormatDiagnostic diagnostic;
};

inline FormatCheck check_format(const GroundTruthTrace& gt, std::string_view text,
                                const EqualityConfig& eq = {}) {
  ParseResult parsed = parse_trace(text);
  if (!parsed.ok()) return FormatCheck{std::nullopt, std::move(parsed.diagnostic)};
  FormatDiagnostic diag = validate_against(gt, *parsed.trace, eq);
  return FormatCheck{std::move(parsed.trace), std::move(diag)};
}

}  // namespace contra
