// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace contra {

inline constexpr double kDefaultAdvantageEpsilon = 1e-6;

struct RolloutGroup {
  std::string prompt_id;
  std::vector<double> rewards;
  double epsilon = kDefaultAdvantageEpsilon;
};

struct GroupStatistics {
  double mean = 0.0;
  double std = 0.0;  // population (divisor G)
};

inline void check_group(const RolloutGroup& g) {
  if (g.rewards.empty()) throw std::invalid_argument("rollout group is empty");
  if (!(g.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

inline GroupStatistics group_statistics(const std::vector<double>& rewards) {
  if (rewards.empty()) throw std::invalid_argument("rollout group is empty");
  const auto n = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  double mean = sum / n;
  // Corrected two-pass algorithm.
  double ss = 0.0, comp = 0.0;
  for (double r : rewards) {
    ss += (r - mean) * (r - mean);
    comp += r - mean;
  }
  ss -= comp * comp / n;
  mean += comp / n;
  return {mean, std::sqrt(std::max(ss, 0.0) / n)};
}

inline GroupStatistics group_statistics(const RolloutGroup& g) {
  check_group(g);
  return group_statistics(g.rewards);
}

/// (r_i - mean) / (std + epsilon) within the group.
inline std::vector<double> group_advantages(const RolloutGroup& g) {
  check_group(g);
  const GroupStatistics s = group_statistics(g.rewards);
  std::vector<double> dev;
  dev.reserve(g.rewards.size());
  double drift = 0.0;
  for (double r : g.rewards) {
    dev.push_back(r - s.mean);
    drift += dev.back();
  }
  // Re-centre so rounding in the mean does not leak into the sum.
  drift /= static_cast<double>(dev.size());
  for (double& d : dev) d = (d - drift) / (s.std + g.epsilon);
  return dev;
}

}  // namespace contra
