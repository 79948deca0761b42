// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contra/grpo.hpp"
#include "contra/parser.hpp"
#include "contra/reward.hpp"
#include "contra/trace_model.hpp"

namespace contra {

/// Everything a policy sees for one continuation. `stage` is 1-based;
/// `beam_index` is the entry's position in the active beam (or the sample
/// index for regular sampling).
struct SampleRequest {
  std::string_view prompt;
  std::string_view partial;
  std::uint64_t seed = 0;
  std::size_t stage = 0;
  std::size_t beam_index = 0;
};

/// One-block continuation ending at the next [/LOCALS] or at [/TRACE].
/// `length` is in the policy's own length units.
struct Continuation {
  std::string text;
  std::uint64_t length = 0;
};

/// A policy returns nullopt (or empty text) when it cannot continue.
template <class P>
concept Policy = requires(P& p, const SampleRequest& r) {
  { p.sample(r) } -> std::convertible_to<std::optional<Continuation>>;
};

/// Type-erased policy.
class PolicyPort {
 public:
  using Fn = std::function<std::optional<Continuation>(const SampleRequest&)>;

  PolicyPort() = default;
  explicit PolicyPort(Fn fn) : fn_(std::move(fn)) {}
  template <Policy P>
    requires(!std::same_as<std::remove_cvref_t<P>, PolicyPort>)
  explicit PolicyPort(P policy)
      : fn_([p = std::move(policy)](const SampleRequest& r) mutable { return p.sample(r); }) {}

  std::optional<Continuation> sample(const SampleRequest& r) { return fn_ ? fn_(r) : std::nullopt; }

 private:
  Fn fn_;
};

enum class Termination { TraceClosed, LengthCap, StageCap };
enum class Provenance { Regular, Dbs };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::TraceClosed: return "trace-closed";
    case Termination::LengthCap: return "length-cap";
    case Termination::StageCap: return "stage-cap";
  }
  return "unknown";
}

inline std::string_view to_string(Provenance p) { return p == Provenance::Regular ? "regular" : "dbs"; }

struct BeamEntry {
  std::string text;
  std::uint64_t score_numerator = 0;  // S = 2 * numerator / total weight
  double score = 0.0;
  std::size_t stages = 0;
  std::uint64_t length = 0;
};

struct Trajectory {
  std::string text;
  double score = 0.0;
  std::uint64_t score_numerator = 0;
  Termination termination = Termination::StageCap;
  Provenance provenance = Provenance::Dbs;
  std::size_t stages = 0;
  std::uint64_t length = 0;
  bool policy_failed = false;
};

/// Scores of every candidate produced in one stage.
struct StageStats {
  std::size_t stage = 0;
  std::size_t candidates = 0;
  std::size_t active = 0;  // entries still running after this stage
  double mean = 0.0;
  double std = 0.0;
};

struct SamplingConfig {
  std::size_t n = 4;
  std::size_t t_max = 10;
  std::uint64_t l_max = 4096;
  std::uint64_t seed = 0;
  EqualityConfig eq;
};

struct SamplingRun {
  std::vector<Trajectory> trajectories;
  std::vector<StageStats> stages;
};

// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a; stable across platforms and runs.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t kDbsDomain = 0xD85;
inline constexpr std::uint64_t kRegularDomain = 0x4E6;

}  // namespace detail

/// Per-call seed from (base seed, sampling domain, stage, beam index). Pure,
/// so candidates of one stage can be expanded in any order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t domain, std::size_t stage,
                                 std::size_t beam_index) {
  std::uint64_t h = detail::splitmix64(base);
  h = detail::splitmix64(h ^ domain);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(stage));
  return detail::splitmix64(h ^ static_cast<std::uint64_t>(beam_index));
}

namespace detail {

inline void check_sampling(const SamplingConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("beam width n must be >= 1");
  if (cfg.t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (cfg.l_max < 1) throw std::invalid_argument("l_max must be >= 1");
}

struct StepOutcome {
  BeamEntry entry;
  std::optional<Termination> termination;
  bool policy_failed = false;
};

// Extends `entry` by one continuation and decides whether it terminates.
template <Policy P>
StepOutcome step(P& policy, std::string_view prompt, const GroundTruthTrace& gt, const BeamEntry& entry,
                 std::size_t stage, std::size_t beam_index, std::uint64_t seed, const SamplingConfig& cfg) {
  SampleRequest req{prompt, entry.text, seed, stage, beam_index};
  std::optional<Continuation> cont = policy.sample(req);
  StepOutcome out{entry, std::nullopt, false};
  if (!cont || cont->text.empty()) {
    out.termination = Termination::StageCap;
    out.policy_failed = true;
    return out;
  }
  out.entry.text += cont->text;
  out.entry.length += cont->length;
  out.entry.stages = stage;
  const ProcessScore s = incremental_process_score(gt, parse_partial(out.entry.text), cfg.eq);
  out.entry.score_numerator = s.numerator;
  out.entry.score = s.value();
  if (out.entry.text.find("[/TRACE]") != std::string::npos)
    out.termination = Termination::TraceClosed;
  else if (out.entry.length >= cfg.l_max)
    out.termination = Termination::LengthCap;
  else if (stage >= cfg.t_max)
    out.termination = Termination::StageCap;
  return out;
}

inline Trajectory finish(const StepOutcome& o, Provenance provenance) {
  return Trajectory{o.entry.text,  o.entry.score,  o.entry.score_numerator, *o.termination,
                    provenance,    o.entry.stages, o.entry.length,          o.policy_failed};
}

}  // namespace detail

/// Stage-wise sampling: after every stage the whole active budget moves to
/// the highest-scoring partial trajectories, split evenly among ties in
/// beam-index order. Returns exactly `cfg.n` trajectories.
template <Policy P>
SamplingRun dynamic_beam_sample(P& policy, std::string_view prompt, const GroundTruthTrace& gt,
                                const SamplingConfig& cfg) {
  detail::check_sampling(cfg);
  SamplingRun run;
  std::vector<BeamEntry> beam(cfg.n);
  for (std::size_t stage = 1; !beam.empty(); ++stage) {
    std::vector<BeamEntry> active;
    std::vector<double> stage_scores;
    for (std::size_t i = 0; i < beam.size(); ++i) {
      const std::uint64_t seed = derive_seed(cfg.seed, detail::kDbsDomain, stage, i);
      detail::StepOutcome o = detail::step(policy, prompt, gt, beam[i], stage, i, seed, cfg);
      stage_scores.push_back(o.entry.score);
      if (o.termination)
        run.trajectories.push_back(detail::finish(o, Provenance::Dbs));
      else
        active.push_back(std::move(o.entry));
    }
    const GroupStatistics st = group_statistics(stage_scores);
    run.stages.push_back(StageStats{stage, stage_scores.size(), active.size(), st.mean, st.std});
    if (active.empty()) break;

    const std::size_t m = active.size();
    std::uint64_t best = 0;
    for (const auto& e : active) best = std::max(best, e.score_numerator);
    std::vector<std::size_t> winners;
    for (std::size_t i = 0; i < m; ++i)
      if (active[i].score_numerator == best) winners.push_back(i);
    const std::size_t q = m / winners.size();
    const std::size_t r = m % winners.size();
    beam.clear();
    for (std::size_t k = 0; k < winners.size(); ++k) {
      const std::size_t copies = q + (k < r ? 1 : 0);
      for (std::size_t c = 0; c < copies; ++c) beam.push_back(active[winners[k]]);
    }
  }
  return run;
}

/// `cfg.n` independent rollouts, each extended block by block until it
/// terminates, with no reallocation.
template <Policy P>
SamplingRun regular_sample(P& policy, std::string_view prompt, const GroundTruthTrace& gt,
                           const SamplingConfig& cfg) {
  detail::check_sampling(cfg);
  SamplingRun run;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    BeamEntry entry;
    for (std::size_t stage = 1;; ++stage) {
      const std::uint64_t seed = derive_seed(cfg.seed, detail::kRegularDomain, stage, i);
      detail::StepOutcome o = detail::step(policy, prompt, gt, entry, stage, i, seed, cfg);
      if (o.termination) {
        run.trajectories.push_back(detail::finish(o, Provenance::Regular));
        break;
      }
      entry = std::move(o.entry);
    }
  }
  return run;
}

/// Half of `n_total` from regular sampling, half from dynamic beam sampling.
/// `cfg.n` is ignored.
template <Policy P>
SamplingRun mixed_sample(P& policy, std::string_view prompt, const GroundTruthTrace& gt, std::size_t n_total,
                         const SamplingConfig& cfg) {
  if (n_total < 2 || n_total % 2 != 0)
    throw std::invalid_argument("mixed sampling needs an even total budget >= 2");
  SamplingConfig half = cfg;
  half.n = n_total / 2;
  SamplingRun regular = regular_sample(policy, prompt, gt, half);
  SamplingRun beam = dynamic_beam_sample(policy, prompt, gt, half);
  for (auto& t : beam.trajectories) regular.trajectories.push_back(std::move(t));
  regular.stages = std::move(beam.stages);
  return regular;
}

}  // namespace contra
