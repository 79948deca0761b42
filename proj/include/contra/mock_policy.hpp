// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contra/dbs.hpp"
#include "contra/literal.hpp"
#include "contra/render.hpp"
#include "contra/trace_model.hpp"

namespace contra {

inline constexpr std::string_view kOracleThought = "Execute the block and record the resulting locals.";

namespace detail {

inline std::size_t completed_blocks(std::string_view partial) {
  std::size_t count = 0;
  for (auto pos = partial.find("[/LOCALS]"); pos != std::string_view::npos;
       pos = partial.find("[/LOCALS]", pos + 1))
    ++count;
  return count;
}

// Continuation an exact-tracing model would emit next, with `locals` used
// in place of the ground-truth post state.
inline Continuation ground_truth_step(const GroundTruthTrace& gt, std::string_view partial,
                                      const LiteralValue* locals) {
  const std::size_t k = completed_blocks(partial);
  std::string text;
  if (k < gt.blocks.size()) {
    if (k == 0) text = "[TRACE]\n";
    text += render_block(gt, k, kOracleThought, locals ? *locals : gt.blocks[k].post_state);
  } else {
    text = render_return(gt, gt.return_value);
  }
  const auto len = static_cast<std::uint64_t>(text.size());
  return Continuation{std::move(text), len};
}

inline LiteralValue rebuild(const LiteralValue& v, LiteralKind target, bool& done);

inline std::vector<LiteralValue> rebuild_all(const std::vector<LiteralValue>& items, LiteralKind target,
                                             bool& done) {
  std::vector<LiteralValue> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(rebuild(item, target, done));
  return out;
}

// Copy of `v` with the first value of kind `target` (depth first, mapping
// values only) perturbed.
inline LiteralValue rebuild(const LiteralValue& v, LiteralKind target, bool& done) {
  if (done) return v;
  if (v.kind() == target) {
    done = true;
    switch (target) {
      case LiteralKind::Integer: return LiteralValue::integer(BigInt{v.as_integer() + 1});
      case LiteralKind::Boolean: return LiteralValue::boolean(!v.as_bool());
      case LiteralKind::Text: return LiteralValue::text(v.as_text() + "~");
      default: done = false; return v;
    }
  }
  switch (v.kind()) {
    case LiteralKind::List: return LiteralValue::list(rebuild_all(v.elements(), target, done));
    case LiteralKind::Tuple: return LiteralValue::tuple(rebuild_all(v.elements(), target, done));
    case LiteralKind::Set: return LiteralValue::set(rebuild_all(v.elements(), target, done));
    case LiteralKind::Mapping: {
      std::vector<std::pair<LiteralValue, LiteralValue>> entries;
      for (const auto& [key, value] : v.entries()) entries.emplace_back(key, rebuild(value, target, done));
      return LiteralValue::mapping(std::move(entries));
    }
    default: return v;
  }
}

}  // namespace detail

/// Perturbs one value of a locals mapping: the first integer gets +1, else
/// the first boolean flips, else the first text gains a suffix; a mapping
/// with none of these gains an extra key.
inline LiteralValue corrupt_locals(const LiteralValue& locals) {
  for (LiteralKind target : {LiteralKind::Integer, LiteralKind::Boolean, LiteralKind::Text}) {
    bool done = false;
    LiteralValue out = detail::rebuild(locals, target, done);
    if (done) return out;
  }
  auto entries = locals.entries();
  entries.emplace_back(LiteralValue::text("__noise__"), LiteralValue::integer(0));
  return LiteralValue::mapping(std::move(entries));
}

/// Emits the ground-truth blocks verbatim, then the correct return.
class OraclePolicy {
 public:
  explicit OraclePolicy(GroundTruthTrace gt) : gt_(std::move(gt)) {}
  std::optional<Continuation> sample(const SampleRequest& r) const {
    return detail::ground_truth_step(gt_, r.partial, nullptr);
  }

 private:
  GroundTruthTrace gt_;
};

/// Like the oracle, but each block's locals are corrupted with probability p.
/// The return assertion is always correct.
class NoisyPolicy {
 public:
  NoisyPolicy(GroundTruthTrace gt, double p, std::uint64_t seed = 0) : gt_(std::move(gt)), p_(p), seed_(seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise probability must be in [0, 1]");
  }

  std::optional<Continuation> sample(const SampleRequest& r) const {
    const std::size_t k = detail::completed_blocks(r.partial);
    if (k >= gt_.blocks.size()) return detail::ground_truth_step(gt_, r.partial, nullptr);
    std::mt19937_64 rng(r.seed ^ seed_);
    const bool corrupt = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p_;
    if (!corrupt) return detail::ground_truth_step(gt_, r.partial, nullptr);
    const LiteralValue bad = corrupt_locals(gt_.blocks[k].post_state);
    return detail::ground_truth_step(gt_, r.partial, &bad);
  }

 private:
  GroundTruthTrace gt_;
  double p_;
  std::uint64_t seed_;
};

/// script[stage - 1][beam_index] is the continuation text; a missing entry
/// is a policy failure.
using Script = std::vector<std::vector<std::string>>;

class ScriptedPolicy {
 public:
  explicit ScriptedPolicy(Script script) : script_(std::move(script)) {}

  std::optional<Continuation> sample(const SampleRequest& r) const {
    if (r.stage == 0 || r.stage > script_.size()) return std::nullopt;
    const auto& row = script_[r.stage - 1];
    if (r.beam_index >= row.size()) return std::nullopt;
    return Continuation{row[r.beam_index], static_cast<std::uint64_t>(row[r.beam_index].size())};
  }

 private:
  Script script_;
};

/// Malformed text that never closes the trace.
class GibberishPolicy {
 public:
  explicit GibberishPolicy(std::uint64_t seed = 0) : seed_(seed) {}

  std::optional<Continuation> sample(const SampleRequest& r) const {
    static constexpr std::string_view words[] = {"lorem", "ipsum", "[CODE", "x ==", "LINENO",
                                                 "}", "{'a'", "[/LOCAL]", "dolor", "=>"};
    std::mt19937_64 rng(r.seed ^ seed_);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(words) - 1);
    std::string text;
    for (int i = 0; i < 6; ++i) {
      text += words[pick(rng)];
      text += i == 5 ? "\n" : " ";
    }
    const auto len = static_cast<std::uint64_t>(text.size());
    return Continuation{std::move(text), len};
  }

 private:
  std::uint64_t seed_;
};

struct MockSpec {
  enum class Kind { Oracle, Noisy, Scripted, Gibberish };
  Kind kind = Kind::Oracle;
  double p = 0.0;
  Script script;
};

inline PolicyPort make_mock_policy(const MockSpec& spec, const GroundTruthTrace& gt, std::uint64_t seed = 0) {
  switch (spec.kind) {
    case MockSpec::Kind::Oracle: return PolicyPort{OraclePolicy{gt}};
    case MockSpec::Kind::Noisy: return PolicyPort{NoisyPolicy{gt, spec.p, seed}};
    case MockSpec::Kind::Scripted: return PolicyPort{ScriptedPolicy{spec.script}};
    case MockSpec::Kind::Gibberish: return PolicyPort{GibberishPolicy{seed}};
  }
  throw std::invalid_argument("unknown mock policy kind");
}

}  // namespace contra
