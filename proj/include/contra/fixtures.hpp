// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "contra/trace_model.hpp"

#ifndef CONTRA_FIXTURE_DIR
#define CONTRA_FIXTURE_DIR "fixtures"
#endif

namespace contra {

inline constexpr std::array<std::string_view, 3> kGoldenNames = {"case3_f14", "words_x", "partition_f"};

class UnknownFixture : public std::runtime_error {
 public:
  explicit UnknownFixture(const std::string& name) : std::runtime_error("UnknownFixture: " + name) {}
};

struct ExpectedReward {
  int delta_fmt = 0;
  std::vector<int> deltas;
  double r_proc = 0.0;
  double r_res = 0.0;
  bool gate = false;
  double total = 0.0;
  double alpha = 1.0;
};

struct GoldenCase {
  std::string name;
  GroundTruthTrace gt;
  std::string rollout;
  ExpectedReward expected;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline std::filesystem::path default_fixture_root() { return CONTRA_FIXTURE_DIR; }

/// Loads fixtures/<name>/{gt.jsonl, rollout.txt, expected.jsonl}.
inline GoldenCase load_golden(std::string_view name, const std::filesystem::path& root = default_fixture_root()) {
  bool known = false;
  for (auto n : kGoldenNames) known = known || n == name;
  const auto dir = root / std::string{name};
  if (!known || !std::filesystem::is_directory(dir)) throw UnknownFixture(std::string{name});

  GoldenCase c;
  c.name = std::string{name};
  c.gt = load_ground_truth(detail::read_file(dir / "gt.jsonl"));
  c.rollout = detail::read_file(dir / "rollout.txt");
  const auto exp = nlohmann::json::parse(detail::read_file(dir / "expected.jsonl"));
  c.expected.delta_fmt = exp.at("delta_fmt").get<int>();
  c.expected.deltas = exp.at("deltas").get<std::vector<int>>();
  c.expected.r_proc = exp.at("r_proc").get<double>();
  c.expected.r_res = exp.at("r_res").get<double>();
  c.expected.gate = exp.at("gate").get<bool>();
  c.expected.total = exp.at("total").get<double>();
  c.expected.alpha = exp.value("alpha", 1.0);
  return c;
}

}  // namespace contra
