// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "contra/cli.hpp"

int main(int argc, char** argv) {
  using namespace contra::cli;
  CLI::App app{"contra: strict trace validation, consistency rewards and beam sampling"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string gt_path, rollout_path, reward_path;

  auto add_eq = [&](CLI::App* sub) { sub->add_option("--rel-tol", cfg.rel_tol, "Relative float tolerance (0 = exact)")->capture_default_str(); };

  auto* validate = app.add_subcommand("validate", "Format diagnostics per rollout");
  validate->add_option("gt-file", gt_path, "Ground-truth records ('-' for stdin)")->required();
  validate->add_option("rollout-file", rollout_path, "Rollout records ('-' for stdin)")->required();
  add_eq(validate);

  auto* score = app.add_subcommand("score", "Reward breakdown per rollout");
  score->add_option("gt-file", gt_path)->required();
  score->add_option("rollout-file", rollout_path)->required();
  score->add_option("--alpha", cfg.alpha, "Process reward weight")->capture_default_str();
  add_eq(score);

  auto* rcs = app.add_subcommand("rcs", "Reasoning consistency score per rollout and mean");
  rcs->add_option("gt-file", gt_path)->required();
  rcs->add_option("rollout-file", rollout_path)->required();
  add_eq(rcs);

  auto* advantage = app.add_subcommand("advantage", "Group-relative advantages from reward records");
  advantage->add_option("reward-file", reward_path)->required();
  advantage->add_option("--group-size", cfg.group_size, "Rewards per group (0 = any)")->capture_default_str();
  advantage->add_option("--epsilon", cfg.epsilon, "Std guard")->capture_default_str();

  auto* dbs = app.add_subcommand("dbs-run", "Sample trajectories with a mock policy");
  dbs->add_option("gt-file", gt_path)->required();
  dbs->add_option("--policy", cfg.policy, "oracle | noisy:<p> | gibberish | scripted:<file>")->capture_default_str();
  dbs->add_option("--mode", cfg.mode, "mixed | dbs | regular")->capture_default_str();
  dbs->add_option("--n", cfg.n, "Total sampling budget")->capture_default_str();
  dbs->add_option("--t-max", cfg.t_max, "Maximum stages")->capture_default_str();
  dbs->add_option("--l-max", cfg.l_max, "Maximum length units")->capture_default_str();
  dbs->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
  add_eq(dbs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*validate) {
      InputStream g(gt_path), r(rollout_path);
      return cmd_validate(g.get(), r.get(), std::cout, cfg);
    }
    if (*score) {
      InputStream g(gt_path), r(rollout_path);
      return cmd_score(g.get(), r.get(), std::cout, cfg);
    }
    if (*rcs) {
      InputStream g(gt_path), r(rollout_path);
      return cmd_rcs(g.get(), r.get(), std::cout, cfg);
    }
    if (*advantage) {
      InputStream in(reward_path);
      return cmd_advantage(in.get(), std::cout, cfg);
    }
    if (*dbs) {
      InputStream g(gt_path);
      return cmd_dbs_run(g.get(), std::cout, cfg);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
