// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "contra/dbs.hpp"
#include "contra/grpo.hpp"
#include "contra/mock_policy.hpp"
#include "contra/parser.hpp"
#include "contra/records.hpp"
#include "contra/render.hpp"
#include "contra/reward.hpp"
#include "contra/trace_model.hpp"

namespace contra::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kInternalError = 3 };

/// Bad input files, records or flags. Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double alpha = 1.0;
  double epsilon = kDefaultAdvantageEpsilon;
  std::size_t n = 8;
  std::size_t t_max = 10;
  std::uint64_t l_max = 4096;
  std::uint64_t seed = 0;
  double rel_tol = 0.0;
  std::size_t group_size = 8;
  std::string policy = "oracle";
  std::string mode = "mixed";  // mixed | dbs | regular

  EqualityConfig equality() const { return EqualityConfig{rel_tol}; }
};

// ---------------------------------------------------------------------------
// Streams

/// An input path, or standard input for "-".
class InputStream {
 public:
  explicit InputStream(const std::string& path) {
    if (path == "-") {
      in_ = &std::cin;
      return;
    }
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw InputError("cannot open input file '" + path + "'");
    in_ = file_.get();
  }
  std::istream& get() { return *in_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_ = nullptr;
};

/// Non-blank lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_records(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n)
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.emplace_back(n, line);
  return out;
}

inline std::map<std::string, GroundTruthTrace> read_ground_truth(std::istream& in) {
  std::map<std::string, GroundTruthTrace> out;
  for (const auto& [n, line] : read_records(in)) {
    try {
      GroundTruthTrace gt = load_ground_truth(line);
      std::string id = gt.id;
      if (!out.emplace(id, std::move(gt)).second) throw InputError("duplicate ground-truth id '" + id + "'");
    } catch (const TraceError& e) {
      throw InputError("ground truth line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<RolloutRecord> read_rollouts(std::istream& in) {
  std::vector<RolloutRecord> out;
  for (const auto& [n, line] : read_records(in)) {
    try {
      out.push_back(load_rollout(line));
    } catch (const TraceError& e) {
      throw InputError("rollout line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline const GroundTruthTrace& lookup(const std::map<std::string, GroundTruthTrace>& gts, const std::string& id) {
  auto it = gts.find(id);
  if (it == gts.end()) throw InputError("no ground truth for rollout id '" + id + "'");
  return it->second;
}

inline void write_failure(RecordWriter& w, const std::optional<Failure>& failure) {
  if (!failure) {
    w.null("failure_code");
    return;
  }
  w.field("failure_code", to_string(failure->code));
  w.field("block", static_cast<std::uint64_t>(failure->location.block));
  w.field("line", static_cast<std::uint64_t>(failure->location.line));
  w.field("reason", failure->reason);
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_validate(std::istream& gt_in, std::istream& rollout_in, std::ostream& out, const RunConfig& cfg) {
  const auto gts = read_ground_truth(gt_in);
  const auto rollouts = read_rollouts(rollout_in);
  for (const auto& r : rollouts) {
    const FormatCheck check = check_format(lookup(gts, r.id), r.trace_text, cfg.equality());
    RecordWriter w;
    w.field("id", r.id).field("verdict", check.diagnostic.verdict());
    write_failure(w, check.diagnostic.failure);
    out << w.str() << '\n';
  }
  return kOk;
}

inline std::string reward_record(const std::string& id, const RewardBreakdown& r) {
  RecordWriter w;
  w.field("id", id)
      .field("delta_fmt", r.delta_fmt)
      .field("deltas", r.deltas)
      .field("r_proc", r.r_proc)
      .field("r_res", r.r_res)
      .field("gate", r.gate_open)
      .field("total", r.total)
      .field("alpha", r.alpha);
  write_failure(w, r.format_failure);
  return w.str();
}

inline int cmd_score(std::istream& gt_in, std::istream& rollout_in, std::ostream& out, const RunConfig& cfg) {
  check_alpha(cfg.alpha);
  const auto gts = read_ground_truth(gt_in);
  const auto rollouts = read_rollouts(rollout_in);
  for (const auto& r : rollouts) {
    const RewardBreakdown b = score_text(lookup(gts, r.id), r.trace_text, cfg.alpha, cfg.equality());
    if (b.gate_open && b.r_proc != 2.0) throw std::logic_error("gate open with r_proc != 2");
    out << reward_record(r.id, b) << '\n';
  }
  return kOk;
}

inline int cmd_rcs(std::istream& gt_in, std::istream& rollout_in, std::ostream& out, const RunConfig& cfg) {
  const auto gts = read_ground_truth(gt_in);
  const auto rollouts = read_rollouts(rollout_in);
  double sum = 0.0;
  for (const auto& r : rollouts) {
    const double v = rcs_of_text(lookup(gts, r.id), r.trace_text, cfg.equality());
    sum += v;
    out << RecordWriter{}.field("id", r.id).field("rcs", v).str() << '\n';
  }
  const double mean = rollouts.empty() ? 0.0 : sum / static_cast<double>(rollouts.size());
  out << RecordWriter{}
             .field("summary", "rcs")
             .field("count", static_cast<std::uint64_t>(rollouts.size()))
             .field("mean_rcs", mean)
             .str()
      << '\n';
  return kOk;
}

/// Reward records are grouped by id in order of first appearance. With a
/// nonzero group size every group must have exactly that many records.
inline int cmd_advantage(std::istream& reward_in, std::ostream& out, const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InputError("--epsilon must be positive");
  std::vector<RolloutGroup> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& [n, line] : read_records(reward_in)) {
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("reward line " + std::to_string(n) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() || !rec.contains("total") ||
        !rec["total"].is_number())
      throw InputError("reward line " + std::to_string(n) + ": needs string 'id' and numeric 'total'");
    const std::string id = rec["id"].get<std::string>();
    auto [it, fresh] = index.emplace(id, groups.size());
    if (fresh) groups.push_back(RolloutGroup{id, {}, cfg.epsilon});
    groups[it->second].rewards.push_back(rec["total"].get<double>());
  }
  for (const auto& g : groups) {
    if (cfg.group_size != 0 && g.rewards.size() != cfg.group_size)
      throw InputError("group '" + g.prompt_id + "' has " + std::to_string(g.rewards.size()) +
                       " rewards, expected " + std::to_string(cfg.group_size));
    const GroupStatistics s = group_statistics(g);
    const std::vector<double> adv = group_advantages(g);
    for (std::size_t i = 0; i < adv.size(); ++i)
      out << RecordWriter{}
                 .field("id", g.prompt_id)
                 .field("index", static_cast<std::uint64_t>(i))
                 .field("reward", g.rewards[i])
                 .field("advantage", adv[i])
                 .field("group_mean", s.mean)
                 .field("group_std", s.std)
                 .str()
          << '\n';
  }
  return kOk;
}

/// "oracle", "noisy:<p>", "gibberish" or "scripted:<file>" (a JSON array of
/// per-stage arrays of continuation texts).
inline MockSpec parse_policy_spec(const std::string& spec) {
  MockSpec m;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "oracle" && arg.empty()) {
    m.kind = MockSpec::Kind::Oracle;
  } else if (kind == "gibberish" && arg.empty()) {
    m.kind = MockSpec::Kind::Gibberish;
  } else if (kind == "noisy") {
    m.kind = MockSpec::Kind::Noisy;
    try {
      std::size_t used = 0;
      m.p = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw InputError("noisy policy needs a probability, e.g. noisy:0.3");
    }
    if (!(m.p >= 0.0 && m.p <= 1.0)) throw InputError("noise probability must be in [0, 1]");
  } else if (kind == "scripted" && !arg.empty()) {
    m.kind = MockSpec::Kind::Scripted;
    InputStream in(arg);
    try {
      m.script = nlohmann::json::parse(in.get()).get<Script>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("script file '" + arg + "': " + e.what());
    }
  } else {
    throw InputError("unknown policy '" + spec + "'");
  }
  return m;
}

inline std::string trajectory_record(const std::string& id, const Trajectory& t) {
  return RecordWriter{}
      .field("id", id)
      .field("provenance", to_string(t.provenance))
      .field("termination", to_string(t.termination))
      .field("score", t.score)
      .field("text", t.text)
      .str();
}

inline std::string stats_json(const std::vector<double>& scores) {
  if (scores.empty()) return "null";
  const GroupStatistics s = group_statistics(scores);
  return RecordWriter{}
      .field("count", static_cast<std::uint64_t>(scores.size()))
      .field("mean", s.mean)
      .field("std", s.std)
      .str();
}

inline int cmd_dbs_run(std::istream& gt_in, std::ostream& out, const RunConfig& cfg) {
  if (cfg.mode != "mixed" && cfg.mode != "dbs" && cfg.mode != "regular")
    throw InputError("--mode must be mixed, dbs or regular");
  if (cfg.mode == "mixed" && (cfg.n < 2 || cfg.n % 2 != 0))
    throw InputError("mixed sampling needs an even --n >= 2");
  if (cfg.n < 1 || cfg.t_max < 1 || cfg.l_max < 1) throw InputError("--n, --t-max and --l-max must be >= 1");
  const MockSpec spec = parse_policy_spec(cfg.policy);
  const auto gts = read_ground_truth(gt_in);

  SamplingConfig sc;
  sc.n = cfg.n;
  sc.t_max = cfg.t_max;
  sc.l_max = cfg.l_max;
  sc.eq = cfg.equality();
  for (const auto& [id, gt] : gts) {
    sc.seed = derive_seed(cfg.seed, detail::stable_hash(id), 0, 0);
    PolicyPort policy = make_mock_policy(spec, gt, cfg.seed);
    const std::string prompt = render_prompt(gt);
    SamplingRun run = cfg.mode == "mixed"     ? mixed_sample(policy, prompt, gt, cfg.n, sc)
                      : cfg.mode == "dbs"     ? dynamic_beam_sample(policy, prompt, gt, sc)
                                              : regular_sample(policy, prompt, gt, sc);
    if (run.trajectories.size() != cfg.n) throw std::logic_error("trajectory count differs from the budget");
    std::vector<double> all, regular, beam;
    for (const auto& t : run.trajectories) {
      out << trajectory_record(id, t) << '\n';
      all.push_back(t.score);
      (t.provenance == Provenance::Regular ? regular : beam).push_back(t.score);
    }
    std::string stages = "[";
    for (std::size_t i = 0; i < run.stages.size(); ++i) {
      const auto& s = run.stages[i];
      stages += (i ? "," : "") + RecordWriter{}
                                     .field("stage", static_cast<std::uint64_t>(s.stage))
                                     .field("candidates", static_cast<std::uint64_t>(s.candidates))
                                     .field("active", static_cast<std::uint64_t>(s.active))
                                     .field("mean", s.mean)
                                     .field("std", s.std)
                                     .str();
    }
    stages += "]";
    const GroupStatistics overall = group_statistics(all);
    out << RecordWriter{}
               .field("id", id)
               .field("summary", "dbs-run")
               .field("mean", overall.mean)
               .field("std", overall.std)
               .raw("regular", stats_json(regular))
               .raw("dbs", stats_json(beam))
               .raw("stages", stages)
               .str()
        << '\n';
  }
  return kOk;
}

}  // namespace contra::cli
