// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "contra/literal.hpp"
#include "contra/trace_model.hpp"

namespace contra {

inline constexpr std::string_view kThinkingPlaceholder = "# THINKING";

/// One ConTra block for ground-truth block `t` (0-based), newline-terminated.
inline std::string render_block(const GroundTruthTrace& gt, std::size_t t, std::string_view thought,
                                const LiteralValue& locals) {
  const auto& b = gt.blocks.at(t);
  std::string out = "[CODE]\n";
  for (std::size_t k = 0; k < b.code_lines.size(); ++k)
    out += "[LINENO " + std::to_string(b.line_start + k) + "]    " + b.code_lines[k] + "\n";
  out += "[/CODE]\n[THOUGHT]\n";
  out += thought;
  out += "\n[/THOUGHT]\n[LOCALS]\n";
  out += render_literal(locals);
  out += "\n[/LOCALS]\n";
  return out;
}

inline std::string render_block(const GroundTruthTrace& gt, std::size_t t, std::string_view thought) {
  return render_block(gt, t, thought, gt.blocks.at(t).post_state);
}

inline std::string render_return(const GroundTruthTrace& gt, const LiteralValue& predicted) {
  return "[RETURN]\nassert " + render_call(gt) + " == " + render_literal(predicted) + "\n[/RETURN]\n[/TRACE]\n";
}

/// The ground truth as a complete ConTra trace with a fixed thought per block.
inline std::string render_trace(const GroundTruthTrace& gt, std::string_view thought) {
  std::string out = "[TRACE]\n";
  for (std::size_t t = 0; t < gt.blocks.size(); ++t) out += render_block(gt, t, thought);
  out += render_return(gt, gt.return_value);
  return out;
}

/// Real code and locals with "# THINKING" placeholders in every thought,
/// the shape used for thought-infilling prompts.
inline std::string emit_raw_template(const GroundTruthTrace& gt) {
  if (gt.blocks.empty()) throw std::invalid_argument("ground truth has no blocks");
  return render_trace(gt, kThinkingPlaceholder);
}

/// Problem statement handed to a policy.
inline std::string render_prompt(const GroundTruthTrace& gt) {
  std::string src = gt.source;
  if (!src.empty() && src.back() != '\n') src += '\n';
  return "[PYTHON]\n" + src + "assert " + render_call(gt) + " == ??\n[/PYTHON]\n";
}

}  // namespace contra
