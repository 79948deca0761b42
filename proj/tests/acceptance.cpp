// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "contra/contra.hpp"
#include "contra/records.hpp"
#include "contra_test/generators.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const contra::GoldenCase& case3() {
  static const contra::GoldenCase c = contra::load_golden("case3_f14");
  return c;
}

std::string corrupt_block3(const std::string& text) {
  return contra_test::replace_once(text, "[LOCALS] {'n': 14, 'x': 16} [/LOCALS]", "[LOCALS] {'n': 14, 'x': 8} [/LOCALS]");
}

Outcome golden_case3() {
  const auto t0 = Clock::now();
  const auto& c = case3();
  const auto r = contra::score_text(c.gt, c.rollout, 1.0);
  const double dt = seconds_since(t0);
  Outcome o;
  o.ok = r.delta_fmt == 1 && r.r_proc == 2.0 && r.r_res == 2.0 && r.total == 4.0 && dt < 1.0;
  o.detail = "total=" + contra::format_double(r.total) + " in " + std::to_string(dt) + "s";
  return o;
}

Outcome hacking_gate() {
  const auto r = contra::score_text(case3().gt, corrupt_block3(case3().rollout), 1.0);
  // An outcome-only scorer would pay the correct final value.
  const bool orm_would_pay = r.r_res == 2.0;
  Outcome o;
  o.ok = r.r_proc == 0.8 && !r.gate_open && r.total == 0.8 && orm_would_pay;
  o.detail = "r_proc=" + contra::format_double(r.r_proc) + " gate=" + (r.gate_open ? "open" : "closed") +
             " total=" + contra::format_double(r.total);
  return o;
}

Outcome format_denial() {
  const auto mutations = contra_test::tag_mutations(case3().rollout);
  Outcome o;
  std::size_t zero = 0;
  for (const auto& m : mutations) {
    const auto r = contra::score_text(case3().gt, m.text, 1.0);
    if (r.total == 0.0) {
      ++zero;
    } else if (o.ok) {
      o.ok = false;
      o.detail = "scored: " + m.label + "; ";
    }
  }
  o.ok = o.ok && mutations.size() >= 30;
  o.detail += std::to_string(zero) + "/" + std::to_string(mutations.size()) + " mutations score 0";
  return o;
}

Outcome golden_rollouts() {
  Outcome o;
  for (auto name : {"words_x", "partition_f"}) {
    const auto c = contra::load_golden(name);
    const double total = contra::score_text(c.gt, c.rollout, 1.0).total;
    o.ok = o.ok && total == 4.0;
    o.detail += (o.detail.empty() ? "" : " ") + std::string{name} + "=" + contra::format_double(total);
  }
  return o;
}

Outcome alpha_grid() {
  Outcome o;
  const std::pair<double, double> grid[] = {{0.5, 3.0}, {1.0, 4.0}, {2.0, 6.0}};
  for (auto [alpha, want] : grid) {
    const double total = contra::score_text(case3().gt, case3().rollout, alpha).total;
    o.ok = o.ok && total == want;
    o.detail += (o.detail.empty() ? "" : " ") + contra::format_double(total);
  }
  return o;
}

Outcome rcs_check() {
  Outcome o;
  const double r = contra::rcs_of_text(case3().gt, corrupt_block3(case3().rollout));
  o.ok = r == 0.5;
  contra_test::Rng rng(1001);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto gt = contra_test::random_ground_truth(rng);
    std::vector<std::size_t> bad;
    for (std::size_t t = 0; t < gt.blocks.size(); ++t)
      if (contra_test::coin(rng, 0.1)) bad.push_back(t);
    const std::string text = contra_test::corrupted_trace(gt, bad);
    const auto b = contra::score_text(gt, text);
    if (b.delta_fmt != 1 || (b.r_proc == 2.0) != (contra::rcs_of_text(gt, text) == 1.0)) ++violations;
  }
  o.ok = o.ok && violations == 0;
  o.detail = "rcs=" + contra::format_double(r) + ", " + std::to_string(violations) + "/1000 coupling violations";
  return o;
}

Outcome grpo() {
  Outcome o;
  const auto adv = contra::group_advantages(contra::RolloutGroup{"p", {4, 0, 0, 0}, 1e-300});
  double err = std::fabs(adv[0] - std::sqrt(3.0));
  for (int i = 1; i < 4; ++i) err = std::max(err, std::fabs(adv[i] + 1 / std::sqrt(3.0)));
  o.ok = err <= 1e-9;

  contra_test::Rng rng(1002);
  double worst_sum = 0.0;
  std::size_t order_breaks = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> r(contra_test::pick(rng, 1, 16));
    const bool close = contra_test::coin(rng, 0.2);
    for (auto& x : r) x = close ? 2.0 + std::uniform_real_distribution<double>(0, 1e-6)(rng)
                                : std::uniform_real_distribution<double>(0, 4)(rng);
    const auto a = contra::group_advantages(contra::RolloutGroup{"p", r});
    const double sum = std::accumulate(a.begin(), a.end(), 0.0);
    worst_sum = std::max(worst_sum, std::fabs(sum) / static_cast<double>(r.size()));
    const double k = std::uniform_real_distribution<double>(0.01, 100)(rng);
    auto scaled = r;
    for (auto& x : scaled) x *= k;
    const auto b = contra::group_advantages(contra::RolloutGroup{"p", scaled});
    std::vector<std::size_t> ia(a.size()), ib(a.size());
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(ib.begin(), ib.end(), 0);
    std::stable_sort(ia.begin(), ia.end(), [&](auto x, auto y) { return a[x] < a[y]; });
    std::stable_sort(ib.begin(), ib.end(), [&](auto x, auto y) { return b[x] < b[y]; });
    if (ia != ib) ++order_breaks;
  }
  o.ok = o.ok && worst_sum <= 1e-12 && order_breaks == 0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "max err %.3g, max |sum|/G %.3g, %zu argsort changes", err, worst_sum, order_breaks);
  o.detail = buf;
  return o;
}

Outcome budget_conservation() {
  const auto t0 = Clock::now();
  Outcome o;
  std::size_t runs = 0, bad = 0;
  const auto& gt = case3().gt;
  const std::string prompt = contra::render_prompt(gt);
  for (std::size_t n : {1u, 4u, 8u, 16u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      for (auto kind : {contra::MockSpec::Kind::Oracle, contra::MockSpec::Kind::Noisy, contra::MockSpec::Kind::Gibberish}) {
        contra::MockSpec spec;
        spec.kind = kind;
        spec.p = 0.3;
        auto policy = contra::make_mock_policy(spec, gt, seed);
        contra::SamplingConfig cfg;
        cfg.n = n;
        cfg.seed = seed;
        const auto run = contra::dynamic_beam_sample(policy, prompt, gt, cfg);
        ++runs;
        bool ok = run.trajectories.size() == n;
        for (const auto& t : run.trajectories) {
          const bool closed = t.text.find("[/TRACE]") != std::string::npos;
          // exactly one reason, and it agrees with the trajectory
          switch (t.termination) {
            case contra::Termination::TraceClosed: ok = ok && closed; break;
            case contra::Termination::LengthCap: ok = ok && !closed && t.length >= cfg.l_max; break;
            case contra::Termination::StageCap: ok = ok && !closed && (t.stages == cfg.t_max || t.policy_failed); break;
          }
        }
        bad += !ok;
      }
    }
  }
  const double dt = seconds_since(t0);
  o.ok = bad == 0 && dt < 10.0;
  o.detail = std::to_string(runs - bad) + "/" + std::to_string(runs) + " runs conserve n, " + std::to_string(dt) + "s";
  return o;
}

Outcome score_consistency() {
  Outcome o;
  contra_test::Rng rng(1003);
  std::size_t checked = 0, mismatched = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gt = contra_test::random_ground_truth(rng);
    contra::NoisyPolicy policy(gt, 0.3, static_cast<std::uint64_t>(trial));
    contra::SamplingConfig cfg;
    cfg.n = 4;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto run = contra::dynamic_beam_sample(policy, contra::render_prompt(gt), gt, cfg);
    for (const auto& t : run.trajectories) {
      const auto check = contra::check_format(gt, t.text);
      if (!check.trace) continue;
      ++checked;
      const double want = contra::process_reward(gt, *check.trace, check.diagnostic).value();
      if (!(t.score == want || std::nextafter(t.score, want) == want)) ++mismatched;
    }
  }
  o.ok = checked > 0 && mismatched == 0;
  o.detail = std::to_string(checked - mismatched) + "/" + std::to_string(checked) + " parsed trajectories match";
  return o;
}

Outcome quality_dominance() {
  Outcome o;
  std::ifstream in(contra_test::data_dir() / "dbs_seeds.txt");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s; in >> s;) seeds.push_back(s);
  double dbs = 0.0, regular = 0.0;
  for (std::uint64_t seed : seeds) {
    contra_test::Rng rng(seed);
    const auto gt = contra_test::random_ground_truth(rng);
    contra::NoisyPolicy policy(gt, 0.3, seed);
    contra::SamplingConfig cfg;
    cfg.seed = seed;
    const auto run = contra::mixed_sample(policy, contra::render_prompt(gt), gt, 8, cfg);
    for (const auto& t : run.trajectories) (t.provenance == contra::Provenance::Dbs ? dbs : regular) += t.score;
  }
  const double denom = 4.0 * static_cast<double>(seeds.size());
  dbs /= denom;
  regular /= denom;
  o.ok = seeds.size() >= 200 && dbs >= regular;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu prompts, DBS mean %.4f vs regular mean %.4f", seeds.size(), dbs, regular);
  o.detail = buf;
  return o;
}

Outcome literal_round_trip() {
  Outcome o;
  contra_test::Rng rng(1004);
  std::size_t failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto v = contra_test::random_literal(rng, 5);
    try {
      if (!contra::values_equal(contra::parse_literal(contra::render_literal(v)), v)) ++failures;
    } catch (const contra::LiteralError&) {
      ++failures;
    }
  }
  o.ok = failures == 0;
  o.detail = std::to_string(failures) + " failures in 10000";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"golden case3_f14 scores 4.0 within 1 s", golden_case3},
      {"hacking gate: corrupted block 3 scores 0.8 with the gate closed", hacking_gate},
      {"format denial: single-tag mutations score 0", format_denial},
      {"golden rollouts words_x and partition_f score 4.0", golden_rollouts},
      {"alpha grid 0.5/1/2 gives 3/4/6", alpha_grid},
      {"RCS 0.5 at first failure in block 3; r_proc = 2 iff RCS = 1", rcs_check},
      {"GRPO advantages, sum to zero, order under scaling", grpo},
      {"DBS budget conservation and termination reasons", budget_conservation},
      {"DBS cumulative score equals process reward", score_consistency},
      {"DBS quality dominance under noisy(0.3)", quality_dominance},
      {"literal round trip over 10k values", literal_round_trip},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string{"exception: "} + e.what()};
    }
    std::printf("%s [%2d] %s (%s)\n", o.ok ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    failed += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
