// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "contra/fixtures.hpp"
#include "contra/parser.hpp"
#include "contra/render.hpp"
#include "contra_test/generators.hpp"

using contra::FailureCode;
using contra::parse_partial;
using contra::parse_trace;

namespace {

const contra::GoldenCase& case3() {
  static const contra::GoldenCase c = contra::load_golden("case3_f14");
  return c;
}

std::optional<FailureCode> code_of(std::string_view text) {
  const auto r = parse_trace(text);
  if (r.ok()) return std::nullopt;
  return r.diagnostic.failure->code;
}

std::optional<FailureCode> check_code(const std::string& text) {
  const auto c = contra::check_format(case3().gt, text);
  if (c.diagnostic.ok()) return std::nullopt;
  return c.diagnostic.failure->code;
}

// Trace text cut right after the k-th "[/LOCALS]" (k >= 1).
std::string truncate_after_locals(const std::string& text, std::size_t k) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) pos = text.find("[/LOCALS]", pos) + 9;
  return text.substr(0, pos) + "\n";
}

const std::string kMinimal =
    "[TRACE]\n[CODE]\n[LINENO 0]    def g():\n[/CODE]\n[THOUGHT]\nt\n[/THOUGHT]\n[LOCALS]\n{}\n[/LOCALS]\n"
    "[CODE]\n[LINENO 1]        return 1\n[/CODE]\n[THOUGHT]\nt\n[/THOUGHT]\n[LOCALS]\n{}\n[/LOCALS]\n"
    "[RETURN]\nassert g() == 1\n[/RETURN]\n[/TRACE]\n";

}  // namespace

TEST(ParseTrace, Case3) {
  const auto r = parse_trace(case3().rollout);
  ASSERT_TRUE(r.ok()) << r.diagnostic.failure->reason;
  EXPECT_EQ(r.diagnostic.verdict(), 1);
  ASSERT_EQ(r.trace->blocks.size(), 4u);
  EXPECT_EQ(r.trace->return_assertion.predicted.as_integer(), 15);
  EXPECT_EQ(r.trace->return_assertion.function_name, "f");
  EXPECT_EQ(r.trace->return_assertion.call_text, "f(14)");
  EXPECT_EQ(r.trace->blocks[2].code_lines.size(), 2u);
  EXPECT_EQ(r.trace->blocks[2].code_lines[1].text, "        x <<= 1");
  EXPECT_EQ(r.trace->blocks[0].thought, "f is called with n = 14 ...");
  EXPECT_EQ(r.trace->raw_text, case3().rollout);
}

TEST(ParseTrace, MultiLineForm) {
  EXPECT_EQ(code_of(kMinimal), std::nullopt);
  EXPECT_EQ(code_of(contra::render_trace(case3().gt, "thinking")), std::nullopt);
}

TEST(ParseTrace, FirstLineNumberMustBeZero) {
  std::string text = contra_test::replace_once(case3().rollout, "[LINENO 0]", "[LINENO 1]");
  EXPECT_EQ(code_of(text), FailureCode::LineNoGap);
}

TEST(ParseTrace, MissingThoughtIsSectionOrder) {
  const std::string text = contra_test::replace_once(case3().rollout, "[THOUGHT] Initialize x = 1. [/THOUGHT]\n", "");
  EXPECT_EQ(code_of(text), FailureCode::SectionOrder);
}

TEST(ParseTrace, TrailingContent) {
  EXPECT_EQ(code_of(case3().rollout + "extra\n"), FailureCode::TrailingContent);
  EXPECT_EQ(code_of(case3().rollout + "\n  \n\t\n"), std::nullopt);
  EXPECT_EQ(code_of(case3().rollout + "[TRACE]\n"), FailureCode::TrailingContent);
}

TEST(ParseTrace, FailureCodes) {
  using contra_test::replace_once;
  const std::string& t = case3().rollout;
  EXPECT_EQ(code_of(""), FailureCode::MissingTag);
  EXPECT_EQ(code_of(t.substr(0, t.size() - 9)), FailureCode::MissingTag);
  EXPECT_EQ(code_of(replace_once(t, "[/LOCALS]\n\n[CODE]", "[/LOCALS]\n\n[CODE] ")), FailureCode::TagNotAlone);
  EXPECT_EQ(code_of(replace_once(t, "[THOUGHT] Initialize x = 1. [/THOUGHT]", "[THOUGHT] [/THOUGHT]")),
            FailureCode::EmptySection);
  EXPECT_EQ(code_of(replace_once(t, "[LINENO 1]        x = 1", "[LINENO 1]   x = 1")), FailureCode::LineNoPattern);
  EXPECT_EQ(code_of(replace_once(t, "[LINENO 1]", "[LINENO 01]")), FailureCode::LineNoPattern);
  EXPECT_EQ(code_of(replace_once(t, "[LINENO 3]", "[LINENO 4]")), FailureCode::LineNoGap);
  EXPECT_EQ(code_of(replace_once(t, "{'n': 14, 'x': 1}", "[14, 1]")), FailureCode::LocalsNotMapping);
  EXPECT_EQ(code_of(replace_once(t, "{'n': 14, 'x': 1}", "{'n': n}")), FailureCode::LocalsNotMapping);
  EXPECT_EQ(code_of(replace_once(t, "assert f(14) == 15", "f(14) == 15")), FailureCode::ReturnNotAssertion);
  EXPECT_EQ(code_of(replace_once(t, "assert f(14) == 15", "assert f(14) != 15")), FailureCode::ReturnNotAssertion);
  EXPECT_EQ(code_of(replace_once(t, "assert f(14) == 15", "assert f(n) == 15")), FailureCode::ReturnNotAssertion);
  EXPECT_EQ(code_of(replace_once(t, "assert f(14) == 15", "assert f(14) == 3 * 5")), FailureCode::ReturnNotLiteral);
  EXPECT_EQ(code_of(replace_once(t, "assert f(14) == 15", "assert f(14) == 15, 'x'")), FailureCode::ReturnNotLiteral);
  EXPECT_EQ(code_of(replace_once(t, "[CODE]\n[LINENO 0]", "[RETURN]\n[LINENO 0]")), FailureCode::SectionOrder);
}

TEST(ParseTrace, ReturnVariants) {
  using contra_test::replace_once;
  const std::string& t = case3().rollout;
  const auto r = parse_trace(replace_once(t, "assert f(14) == 15", "assert f(14,) == [15, (1, 2)]"));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.trace->return_assertion.arguments.size(), 1u);
  EXPECT_TRUE(r.trace->return_assertion.predicted.is(contra::LiteralKind::List));
  const auto inline_ret = parse_trace(replace_once(t, "[RETURN]\nassert f(14) == 15\n[/RETURN]",
                                                   "[RETURN] assert f(14) == 15 [/RETURN]"));
  EXPECT_TRUE(inline_ret.ok());
}

TEST(ParseTrace, Deterministic) {
  const std::string text = contra_test::replace_once(case3().rollout, "[LINENO 3]", "[LINENO 5]");
  const auto a = parse_trace(text), b = parse_trace(text);
  ASSERT_FALSE(a.ok());
  EXPECT_EQ(a.diagnostic.failure->code, b.diagnostic.failure->code);
  EXPECT_EQ(a.diagnostic.failure->location.block, b.diagnostic.failure->location.block);
  EXPECT_EQ(a.diagnostic.failure->location.line, b.diagnostic.failure->location.line);
  EXPECT_EQ(a.diagnostic.failure->reason, b.diagnostic.failure->reason);
  EXPECT_EQ(a.diagnostic.failure->location.block, 3u);
}

TEST(ValidateAgainst, Case3Passes) {
  EXPECT_EQ(check_code(case3().rollout), std::nullopt);
  const auto c = contra::check_format(case3().gt, case3().rollout);
  EXPECT_EQ(c.diagnostic.verdict(), 1);
}

TEST(ValidateAgainst, ThreeBlocksVsFour) {
  std::string text = case3().rollout;
  const auto start = text.find("[CODE]\n[LINENO 4]");
  const auto end = text.find("[RETURN]");
  text.erase(start, end - start);
  ASSERT_EQ(code_of(text), std::nullopt);
  EXPECT_EQ(check_code(text), FailureCode::BlockCountMismatch);
}

TEST(ValidateAgainst, CallMismatch) {
  EXPECT_EQ(check_code(contra_test::replace_once(case3().rollout, "assert f(14)", "assert f(13)")),
            FailureCode::CallMismatch);
  EXPECT_EQ(check_code(contra_test::replace_once(case3().rollout, "assert f(14)", "assert g(14)")),
            FailureCode::CallMismatch);
  EXPECT_EQ(check_code(contra_test::replace_once(case3().rollout, "assert f(14)", "assert f(14, 1)")),
            FailureCode::CallMismatch);
  EXPECT_EQ(check_code(contra_test::replace_once(case3().rollout, "assert f(14)", "assert f(14.0)")), std::nullopt);
}

TEST(ValidateAgainst, BoundaryAndCode) {
  using contra_test::replace_once;
  std::string merged = replace_once(case3().rollout,
                                    "[LINENO 1]        x = 1\n[/CODE]\n[THOUGHT] Initialize x = 1. [/THOUGHT]\n"
                                    "[LOCALS] {'n': 14, 'x': 1} [/LOCALS]\n\n[CODE]\n",
                                    "[LINENO 1]        x = 1\n");
  merged = replace_once(merged, "[LINENO 4]        return x - 1\n[/CODE]",
                        "[LINENO 4]        return x - 1\n[/CODE]\n[THOUGHT] t [/THOUGHT]\n[LOCALS] {} [/LOCALS]\n"
                        "[CODE]\n[LINENO 5]        pass\n[/CODE]");
  ASSERT_EQ(code_of(merged), std::nullopt);
  EXPECT_EQ(check_code(merged), FailureCode::BoundaryMismatch);
  EXPECT_EQ(check_code(replace_once(case3().rollout, "x <<= 1", "x <<= 2")), FailureCode::CodeMismatch);
  EXPECT_EQ(check_code(replace_once(case3().rollout, "[LINENO 1]        x = 1", "[LINENO 1]    x = 1  ")),
            std::nullopt);
}

TEST(ParsePartial, TruncatedAfterBlock2) {
  const auto p = parse_partial(truncate_after_locals(case3().rollout, 2));
  EXPECT_FALSE(p.failure);
  EXPECT_EQ(p.blocks.size(), 2u);
  EXPECT_FALSE(p.closed);
}

TEST(ParsePartial, EmptyText) {
  const auto p = parse_partial("");
  EXPECT_FALSE(p.failure);
  EXPECT_TRUE(p.blocks.empty());
}

TEST(ParsePartial, MidThought) {
  const std::string& t = case3().rollout;
  const auto cut = t.find("0<14 -> x=2");
  const auto p = parse_partial(t.substr(0, cut));
  ASSERT_TRUE(p.failure);
  EXPECT_TRUE(p.failure->code == FailureCode::SectionOrder || p.failure->code == FailureCode::EmptySection);
  EXPECT_EQ(p.blocks.size(), 2u);

  const auto inline_cut = parse_partial(t.substr(0, t.find("Initialize x")));
  ASSERT_TRUE(inline_cut.failure);
  EXPECT_EQ(inline_cut.blocks.size(), 1u);
}

TEST(ParsePartial, FullTraceIsClosed) {
  const auto p = parse_partial(case3().rollout);
  EXPECT_FALSE(p.failure);
  EXPECT_EQ(p.blocks.size(), 4u);
  EXPECT_TRUE(p.closed);
}

TEST(ParsePartial, BlockFailureKeepsPrefix) {
  const auto p = parse_partial(contra_test::replace_once(case3().rollout, "[LINENO 3]", "[LINENO 9]"));
  ASSERT_TRUE(p.failure);
  EXPECT_EQ(p.failure->code, FailureCode::LineNoGap);
  EXPECT_EQ(p.blocks.size(), 2u);
}

TEST(ParserProperties, MonotoneTruncation) {
  for (auto name : contra::kGoldenNames) {
    const auto c = contra::load_golden(name);
    for (std::size_t k = 1; k <= c.gt.blocks.size(); ++k) {
      const auto p = parse_partial(truncate_after_locals(c.rollout, k));
      EXPECT_FALSE(p.failure) << name << " k=" << k;
      EXPECT_EQ(p.blocks.size(), k);
    }
  }
  contra_test::Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto gt = contra_test::random_ground_truth(rng);
    const std::string text = contra_test::consistent_trace(gt);
    ASSERT_TRUE(contra::check_format(gt, text).diagnostic.ok());
    for (std::size_t k = 1; k <= gt.blocks.size(); ++k) {
      const auto p = parse_partial(truncate_after_locals(text, k));
      ASSERT_FALSE(p.failure);
      ASSERT_EQ(p.blocks.size(), k);
    }
  }
}

TEST(ParserProperties, SingleTagMutationsFail) {
  for (auto name : contra::kGoldenNames) {
    const auto c = contra::load_golden(name);
    const auto mutations = contra_test::tag_mutations(c.rollout);
    EXPECT_GE(mutations.size(), 30u);
    for (const auto& m : mutations) {
      const auto check = contra::check_format(c.gt, m.text);
      EXPECT_EQ(check.diagnostic.verdict(), 0) << name << ": " << m.label;
    }
  }
}

TEST(ParserProperties, SyntheticMutationsFail) {
  contra_test::Rng rng(32);
  for (int i = 0; i < 50; ++i) {
    const auto gt = contra_test::random_ground_truth(rng, 4);
    for (const auto& m : contra_test::tag_mutations(contra_test::consistent_trace(gt)))
      ASSERT_EQ(contra::check_format(gt, m.text).diagnostic.verdict(), 0) << m.label << "\n" << m.text;
  }
}
