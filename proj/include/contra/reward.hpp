// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "contra/diagnostic.hpp"
#include "contra/literal.hpp"
#include "contra/parser.hpp"
#include "contra/trace_model.hpp"

namespace contra {

/// 1 iff the block's code matches the reference line by line (after
/// whitespace stripping) and its locals equal the reference post-state.
inline int block_consistency(const GroundTruthBlock& gt_block, const ParsedBlock& p_block,
                             const EqualityConfig& eq = {}) {
  if (p_block.code_lines.size() != gt_block.code_lines.size()) return 0;
  if (p_block.code_lines.front().number != gt_block.line_start) return 0;
  for (std::size_t k = 0; k < gt_block.code_lines.size(); ++k)
    if (detail::trim(p_block.code_lines[k].text) != detail::trim(gt_block.code_lines[k])) return 0;
  return values_equal(p_block.locals, gt_block.post_state, eq) ? 1 : 0;
}

/// Weighted prefix-consistency as an exact fraction. The score is
/// 2 * numerator / denominator.
struct ProcessScore {
  std::vector<int> deltas;           // one per ground-truth block; missing blocks are 0
  std::vector<int> prefix_products;  // running product of deltas
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  std::size_t consistent_prefix = 0;

  double value() const { return static_cast<double>(2 * numerator) / static_cast<double>(denominator); }
};

namespace detail {

inline ProcessScore score_blocks(const GroundTruthTrace& gt, const std::vector<ParsedBlock>& blocks,
                                 const EqualityConfig& eq) {
  ProcessScore s;
  s.denominator = gt.total_weight();
  int running = 1;
  for (std::size_t t = 0; t < gt.blocks.size(); ++t) {
    const int delta = t < blocks.size() ? block_consistency(gt.blocks[t], blocks[t], eq) : 0;
    running *= delta;
    s.deltas.push_back(delta);
    s.prefix_products.push_back(running);
    if (running) {
      s.numerator += gt.blocks[t].weight;
      ++s.consistent_prefix;
    }
  }
  return s;
}

}  // namespace detail

/// Process reward. A failed format check zeroes the score; the per-block
/// deltas are still reported for diagnostics.
inline ProcessScore process_reward(const GroundTruthTrace& gt, const ParsedTrace& pt,
                                   const FormatDiagnostic& diag, const EqualityConfig& eq = {}) {
  ProcessScore s = detail::score_blocks(gt, pt.blocks, eq);
  if (!diag.ok()) s.numerator = 0;
  return s;
}

inline double result_reward(const GroundTruthTrace& gt, const ParsedTrace& pt,
                            const FormatDiagnostic& diag, const EqualityConfig& eq = {}) {
  if (!diag.ok()) return 0.0;
  return values_equal(pt.return_assertion.predicted, gt.return_value, eq) ? 2.0 : 0.0;
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be a finite nonnegative number");
}

/// alpha * R_proc plus R_res, where R_res is only admitted when the format is
/// valid and every block is consistent.
inline RewardBreakdown overall_reward(const GroundTruthTrace& gt, const ParsedTrace& pt,
                                      const FormatDiagnostic& diag, double alpha = 1.0,
                                      const EqualityConfig& eq = {}) {
  check_alpha(alpha);
  const ProcessScore proc = process_reward(gt, pt, diag, eq);
  RewardBreakdown r;
  r.alpha = alpha;
  r.delta_fmt = diag.verdict();
  r.format_failure = diag.failure;
  r.deltas = proc.deltas;
  r.prefix_products = proc.prefix_products;
  r.r_proc = proc.value();
  r.r_res = result_reward(gt, pt, diag, eq);
  r.gate_open = diag.ok() && proc.consistent_prefix == gt.blocks.size();
  r.total = alpha * r.r_proc + (r.gate_open ? r.r_res : 0.0);
  if (proc.consistent_prefix < gt.blocks.size()) r.first_inconsistent_block = proc.consistent_prefix + 1;
  return r;
}

/// Scores raw model text end to end. Text that fails the grammar stage gets
/// a zero breakdown with all deltas 0.
inline RewardBreakdown score_text(const GroundTruthTrace& gt, std::string_view text, double alpha = 1.0,
                                  const EqualityConfig& eq = {}) {
  check_alpha(alpha);
  FormatCheck check = check_format(gt, text, eq);
  if (check.trace) return overall_reward(gt, *check.trace, check.diagnostic, alpha, eq);
  RewardBreakdown r;
  r.alpha = alpha;
  r.format_failure = check.diagnostic.failure;
  r.deltas.assign(gt.blocks.size(), 0);
  r.prefix_products.assign(gt.blocks.size(), 0);
  r.first_inconsistent_block = 1;
  return r;
}

/// Fraction of ground-truth blocks completed before the first inconsistency.
inline double rcs(const GroundTruthTrace& gt, const ParsedTrace& pt, const FormatDiagnostic& diag,
                  const EqualityConfig& eq = {}) {
  if (!diag.ok()) return 0.0;
  const ProcessScore s = detail::score_blocks(gt, pt.blocks, eq);
  return static_cast<double>(s.consistent_prefix) / static_cast<double>(gt.blocks.size());
}

inline double rcs_of_text(const GroundTruthTrace& gt, std::string_view text, const EqualityConfig& eq = {}) {
  FormatCheck check = check_format(gt, text, eq);
  if (!check.trace) return 0.0;
  return rcs(gt, *check.trace, check.diagnostic, eq);
}

/// Process score of a partial trace over the full-trace weight total, so the
/// stage increments of a complete trace add up to its process reward. A
/// block-level format failure ends the consistent prefix at that block.
inline ProcessScore incremental_process_score(const GroundTruthTrace& gt, const PartialTrace& partial,
                                              const EqualityConfig& eq = {}) {
  return detail::score_blocks(gt, partial.blocks, eq);
}

}  // namespace contra
