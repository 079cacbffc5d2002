#include <gtest/gtest.h>

#include <cmath>

#include "hlmc/adversaries.hpp"
#include "hlmc/hlmc_policy.hpp"

using namespace hlmc;

namespace {

MatrixRewardModel random_matrix(std::size_t arms, Step horizon, std::uint64_t seed) {
  RngStream rng(seed, 99);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(horizon), std::vector<double>(arms));
  for (auto& row : rows) {
    for (auto& x : row) x = rng.uniform();
  }
  return MatrixRewardModel(rows);
}

}  // namespace

// K=4, N=L=2, epochs of 2 steps, every reward 1: after the first epoch the
// chosen group's weight is exp(gamma1 * (1 / 0.5) / 2).
TEST(HlmcPolicy, TwoStepHandTrace) {
  const double g1 = 0.3, g2 = 0.4;
  HlmcConfig cfg(Hierarchy(4, {2, 2}), EpochSchedule(4, {2, 2}), {RoutineSpec::exp3(g1), RoutineSpec::exp3(g2)});
  MemoryLedger ledger(4);
  HlmcPolicy p(cfg, ledger);
  RngStream rng(1, 1);
  const ArmId a1 = p.select(1, rng);
  p.observe(a1, 1.0, 1);
  // Arm level after one play: the played arm moved by exp(g2 * (1/0.5) / 2).
  const auto arm_w = p.level_weights(2);
  EXPECT_NEAR(arm_w[a1.value() % 2], std::exp(g2), 1e-12);
  // Group weights untouched mid-epoch.
  for (double w : p.level_weights(1)) EXPECT_EQ(w, 1.0);
  const ArmId a2 = p.select(2, rng);
  EXPECT_EQ(a2.value() / 2, a1.value() / 2);  // same group inside the epoch
  p.observe(a2, 1.0, 2);
  const auto group_w = p.level_weights(1);
  EXPECT_NEAR(group_w[a1.value() / 2], std::exp(g1), 1e-12);
  EXPECT_EQ(group_w[1 - a1.value() / 2], 1.0);
}

TEST(HlmcPolicy, ArmStateIsFreshEachEpoch) {
  HlmcConfig cfg(Hierarchy(4, {2, 2}), EpochSchedule(4, {2, 2}), {RoutineSpec::exp3(0.3), RoutineSpec::exp3(0.4)});
  MemoryLedger ledger(4);
  HlmcPolicy p(cfg, ledger);
  RngStream rng(1, 1);
  for (Step t = 1; t <= 2; ++t) p.observe(p.select(t, rng), 1.0, t);
  p.observe(p.select(3, rng), 0.0, 3);
  for (double w : p.level_weights(2)) EXPECT_EQ(w, 1.0);
}

TEST(HlmcPolicy, RunningAverageOverShortTrailingEpoch) {
  // T=5 with epochs of 2: the last epoch has one step and y is that reward.
  HlmcConfig cfg(Hierarchy(4, {2, 2}), EpochSchedule(5, {3, 2}), {RoutineSpec::exp3(0.5), RoutineSpec::exp3(0.5)});
  MemoryLedger ledger(4);
  HlmcPolicy p(cfg, ledger);
  RngStream rng(3, 3);
  for (Step t = 1; t <= 4; ++t) p.observe(p.select(t, rng), 0.0, t);
  const auto before = std::vector<double>(p.level_weights(1).begin(), p.level_weights(1).end());
  const ArmId a = p.select(5, rng);
  const double prob = (1 - 0.5) * before[a.value() / 2] / (before[0] + before[1]) + 0.25;
  p.observe(a, 0.6, 5);
  EXPECT_NEAR(p.level_weights(1)[a.value() / 2], before[a.value() / 2] * std::exp(0.5 * (0.6 / prob) / 2), 1e-12);
}

TEST(HlmcPolicy, ContractViolations) {
  const auto cfg = make_two_level_config(16, 100, params_weak_expected(100, 16));
  MemoryLedger ledger(100);
  HlmcPolicy p(cfg, ledger);
  RngStream rng(1, 1);
  EXPECT_THROW(p.select(2, rng), ContractViolation);
  const ArmId a = p.select(1, rng);
  EXPECT_THROW(p.select(1, rng), ContractViolation);
  EXPECT_THROW(p.observe(ArmId((a.value() + 1) % 16), 0.5, 1), ContractViolation);
  EXPECT_THROW(p.observe(a, 0.5, 2), ContractViolation);
  p.observe(a, 0.5, 1);
  EXPECT_THROW(p.observe(a, 0.5, 2), ContractViolation);
}

TEST(HlmcPolicy, BudgetBelowFootprintThrows) {
  const auto cfg = make_two_level_config(100, 1000, params_weak_expected(1000, 100));
  MemoryLedger ledger(19);
  EXPECT_THROW(HlmcPolicy(cfg, ledger), BudgetViolation);
}

TEST(HlmcPolicy, FootprintAuditTwoAndThreeLevel) {
  auto model = random_matrix(100, 3000, 4);
  {
    MemoryLedger ledger(20);
    HlmcPolicy p(make_two_level_config(100, 3000, params_weak_expected(3000, 100)), ledger);
    RngStream rng(1, 1);
    play(p, model, rng);
    EXPECT_EQ(ledger.peak_words(), 20);
    EXPECT_NO_THROW(audit_footprint(p));
  }
  {
    MemoryLedger ledger(14);
    HlmcPolicy p(make_three_level_config(100, 3000, params_threelevel(3000, 100)), ledger);
    RngStream rng(1, 1);
    play(p, model, rng);
    EXPECT_EQ(ledger.peak_words(), 14);
    EXPECT_NO_THROW(audit_footprint(p));
  }
}

TEST(HlmcPolicy, FootprintAuditUnevenGroups) {
  // K=23 with groups of 5: the last group holds 3 arms but the level still
  // reserves its full width.
  auto model = random_matrix(23, 500, 8);
  MemoryLedger ledger(10);
  HlmcPolicy p(make_two_level_config(23, 500, params_weak_expected(500, 23)), ledger);
  RngStream rng(2, 2);
  play(p, model, rng);
  EXPECT_EQ(ledger.peak_words(), 10);
  // The arm level closes with the final epoch; only the group level is live.
  EXPECT_EQ(ledger.live_words(), 5);
}

TEST(Invariant, DegenerateDepthOneMatchesFlat) {
  RngStream meta(77, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t k = 2 + meta.below(30);
    const double gamma = 0.05 + 0.9 * meta.uniform();
    const auto model = random_matrix(k, 1000, 10 + trial);
    MemoryLedger l1(static_cast<std::int64_t>(k)), l2(static_cast<std::int64_t>(k));
    HlmcPolicy h(make_flat_config(k, 1000, RoutineSpec::exp3(gamma)), l1);
    FlatPolicy f(RoutineSpec::exp3(gamma), k, l2);
    RngStream r1(trial, 5), r2(trial, 5);
    EXPECT_EQ(play(h, model, r1), play(f, model, r2)) << "trial " << trial;
  }
}

// Changing rewards of arms outside the selected group never changes what
// HLMC does, because it only reads the played arm's reward.
TEST(Invariant, EpochIsolation) {
  const std::size_t k = 16;
  const Step horizon = 400;
  const auto params = params_weak_expected(horizon, k);
  const auto cfg = make_two_level_config(k, horizon, params);
  std::vector<std::vector<double>> rows(horizon, std::vector<double>(k));
  RngStream fill(5, 5);
  for (auto& row : rows) {
    for (auto& x : row) x = fill.uniform();
  }
  MemoryLedger l1(100);
  HlmcPolicy a(cfg, l1);
  RngStream r1(9, 9);
  const auto base = play(a, MatrixRewardModel(rows), r1);

  // Within each epoch, permute the rewards of arms outside the played group.
  RngStream perm(6, 6);
  for (Step first = 1; first <= horizon; first += params.epoch_length) {
    const std::size_t group = base.plays[static_cast<std::size_t>(first - 1)].arm.value() / params.group_size;
    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < k; ++i) {
      if (i / params.group_size != group) outside.push_back(i);
    }
    auto shuffled = outside;
    perm.shuffle(shuffled);
    for (Step t = first; t < std::min(first + params.epoch_length, horizon + 1); ++t) {
      auto& row = rows[static_cast<std::size_t>(t - 1)];
      const auto copy = row;
      for (std::size_t j = 0; j < outside.size(); ++j) row[outside[j]] = copy[shuffled[j]];
    }
  }
  MemoryLedger l2(100);
  HlmcPolicy b(cfg, l2);
  RngStream r2(9, 9);
  EXPECT_EQ(play(b, MatrixRewardModel(rows), r2), base);
}

TEST(HlmcConfig, DepthMismatchRejected) {
  EXPECT_THROW(HlmcConfig(Hierarchy(4, {2, 2}), EpochSchedule(4, {4}), {RoutineSpec::exp3(0.5)}),
               std::invalid_argument);
}
