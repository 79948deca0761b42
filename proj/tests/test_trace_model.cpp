// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "contra/fixtures.hpp"
#include "contra/trace_model.hpp"
#include "contra_test/generators.hpp"

using contra::GroundTruthTrace;
using contra::TraceError;
using contra::TraceErrorKind;

namespace {

nlohmann::json case3_record() {
  return nlohmann::json::parse(contra_test::read_text(std::filesystem::path(CONTRA_FIXTURE_DIR) / "case3_f14/gt.jsonl"));
}

TraceErrorKind error_of(const nlohmann::json& record) {
  try {
    contra::load_ground_truth(record);
  } catch (const TraceError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << record.dump();
  return TraceErrorKind::Schema;
}

bool traces_equal(const GroundTruthTrace& a, const GroundTruthTrace& b) {
  if (a.id != b.id || a.function_name != b.function_name || a.source != b.source) return false;
  if (a.input.size() != b.input.size() || a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t i = 0; i < a.input.size(); ++i)
    if (!contra::values_equal(a.input[i], b.input[i])) return false;
  for (std::size_t t = 0; t < a.blocks.size(); ++t) {
    const auto &x = a.blocks[t], &y = b.blocks[t];
    if (x.index != y.index || x.line_start != y.line_start || x.line_end != y.line_end ||
        x.code_lines != y.code_lines || x.weight != y.weight || !contra::values_equal(x.post_state, y.post_state))
      return false;
  }
  return contra::values_equal(a.return_value, b.return_value);
}

}  // namespace

TEST(LoadGroundTruth, Case3) {
  const GroundTruthTrace gt = contra::load_ground_truth(case3_record());
  EXPECT_EQ(gt.blocks.size(), 4u);
  EXPECT_EQ(gt.total_weight(), 5u);
  EXPECT_EQ(gt.blocks[2].weight, 2u);
  EXPECT_EQ(gt.blocks[2].line_start, 2u);
  EXPECT_EQ(gt.blocks[2].line_end, 3u);
  EXPECT_EQ(gt.return_value.as_integer(), 15);
  EXPECT_EQ(contra::render_call(gt), "f(14)");
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(gt.blocks[t].index, t + 1);
}

TEST(LoadGroundTruth, GapIsContiguityError) {
  auto rec = case3_record();
  rec["blocks"][2]["line_start"] = 3;
  rec["blocks"][2]["code"] = {"        x <<= 1"};
  EXPECT_EQ(error_of(rec), TraceErrorKind::Contiguity);
}

TEST(LoadGroundTruth, ZeroWeightIsSchemaError) {
  auto rec = case3_record();
  rec["blocks"][1]["weight"] = 0;
  EXPECT_EQ(error_of(rec), TraceErrorKind::Schema);
}

TEST(LoadGroundTruth, SchemaViolations) {
  auto missing = case3_record();
  missing.erase("return");
  EXPECT_EQ(error_of(missing), TraceErrorKind::Schema);

  auto one_block = case3_record();
  one_block["blocks"] = nlohmann::json::array({one_block["blocks"][0]});
  one_block["source"] = "def f(n):\n";
  EXPECT_EQ(error_of(one_block), TraceErrorKind::Schema);

  auto code_len = case3_record();
  code_len["blocks"][2]["code"] = {"    while x - 1 < n:"};
  EXPECT_EQ(error_of(code_len), TraceErrorKind::Schema);

  auto first = case3_record();
  first["blocks"][0]["line_start"] = 1;
  EXPECT_NE(error_of(first), TraceErrorKind::Literal);

  auto source = case3_record();
  source["source"] = "def f(n):\n    x = 2\n    while x - 1 < n:\n        x <<= 1\n    return x - 1\n";
  EXPECT_EQ(error_of(source), TraceErrorKind::Schema);

  auto negative = case3_record();
  negative["blocks"][0]["weight"] = -1;
  EXPECT_EQ(error_of(negative), TraceErrorKind::Schema);

  auto name = case3_record();
  name["function_name"] = "f x";
  EXPECT_EQ(error_of(name), TraceErrorKind::Schema);
}

TEST(LoadGroundTruth, LiteralErrors) {
  auto bad_locals = case3_record();
  bad_locals["blocks"][0]["locals"] = "{'n': g(1)}";
  EXPECT_EQ(error_of(bad_locals), TraceErrorKind::Literal);

  auto not_mapping = case3_record();
  not_mapping["blocks"][0]["locals"] = "[14]";
  EXPECT_NE(error_of(not_mapping), TraceErrorKind::Contiguity);

  auto bad_input = case3_record();
  bad_input["input"] = {"14)"};
  EXPECT_EQ(error_of(bad_input), TraceErrorKind::Literal);
}

TEST(LoadGroundTruth, MalformedLine) {
  EXPECT_THROW(contra::load_ground_truth(std::string_view{"{not json"}), TraceError);
  EXPECT_THROW(contra::load_ground_truth(std::string_view{"[1, 2]"}), TraceError);
}

TEST(DumpGroundTruth, RoundTripCase3) {
  const GroundTruthTrace gt = contra::load_ground_truth(case3_record());
  const auto dumped = contra::dump_ground_truth(gt);
  const GroundTruthTrace back = contra::load_ground_truth(dumped.dump());
  EXPECT_TRUE(traces_equal(gt, back));
  EXPECT_EQ(contra::dump_ground_truth(back).dump(), dumped.dump());
}

TEST(DumpGroundTruth, CanonicalInput) {
  auto rec = case3_record();
  rec["input"] = {"0x0E"};
  const auto dumped = contra::dump_ground_truth(contra::load_ground_truth(rec));
  EXPECT_EQ(dumped["input"][0], "14");
}

TEST(DumpGroundTruth, MinimalTwoBlockTrace) {
  const std::string line =
      R"({"id": "min", "function_name": "g", "source": "def g():\n    return 1\n", "input": [],)"
      R"( "blocks": [{"line_start": 0, "line_end": 0, "code": ["def g():"], "locals": "{}", "weight": 1},)"
      R"( {"line_start": 1, "line_end": 1, "code": ["    return 1"], "locals": "{}", "weight": 1}], "return": "1"})";
  const GroundTruthTrace gt = contra::load_ground_truth(line);
  const auto dumped = contra::dump_ground_truth(gt);
  for (auto key : {"id", "function_name", "source", "input", "blocks", "return"}) EXPECT_TRUE(dumped.contains(key));
  EXPECT_TRUE(traces_equal(gt, contra::load_ground_truth(dumped.dump())));
}

TEST(GroundTruthProperties, SourceReconstructionAndRoundTrip) {
  contra_test::Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const GroundTruthTrace gt = contra_test::random_ground_truth(rng);
    std::string joined;
    for (const auto& b : gt.blocks)
      for (const auto& l : b.code_lines) joined += l + "\n";
    ASSERT_EQ(joined, gt.source);
    ASSERT_TRUE(traces_equal(gt, contra::load_ground_truth(contra::dump_ground_truth(gt).dump())));
  }
}

TEST(GoldenFixtures, SourcesReconstruct) {
  for (auto name : contra::kGoldenNames) {
    const auto c = contra::load_golden(name);
    std::string joined;
    for (const auto& b : c.gt.blocks)
      for (const auto& l : b.code_lines) joined += l + "\n";
    EXPECT_EQ(joined, c.gt.source) << name;
  }
}

TEST(LoadRollout, Records) {
  const auto r = contra::load_rollout(R"({"id": "a", "trace_text": "[TRACE]\n"})");
  EXPECT_EQ(r.id, "a");
  EXPECT_EQ(r.trace_text, "[TRACE]\n");
  EXPECT_THROW(contra::load_rollout(R"({"id": 3, "trace_text": ""})"), TraceError);
  EXPECT_THROW(contra::load_rollout(R"({"id": "a"})"), TraceError);
}
