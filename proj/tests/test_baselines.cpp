#include <gtest/gtest.h>

#include <set>

#include "hlmc/adversaries.hpp"
#include "hlmc/baselines.hpp"

using namespace hlmc;

TEST(UcbmSchedule, Example) {
  const UcbmSchedule s(100, 20);
  EXPECT_EQ(s.subphases_per_phase(), 6);
  EXPECT_EQ(s.base_length(), 440);
  EXPECT_EQ(s.phase_length(0), 2640);
  EXPECT_EQ(s.phase_start(1), 2641);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(s.phase_length(i + 1), 2 * s.phase_length(i));
  EXPECT_EQ(UcbmSchedule(21, 20).subphases_per_phase(), 2);  // 20 challengers, 19 slots
  EXPECT_EQ(UcbmSchedule(20, 20).subphases_per_phase(), 1);
  EXPECT_THROW(UcbmSchedule(10, 1), std::invalid_argument);
}

TEST(UcbmSchedule, LocateAndBoundaries) {
  const UcbmSchedule s(100, 20);
  auto p = s.locate(1);
  EXPECT_EQ(p.phase, 0);
  EXPECT_EQ(p.subphase, 0);
  p = s.locate(441);
  EXPECT_EQ(p.subphase, 1);
  EXPECT_EQ(p.subphase_first, 441);
  p = s.locate(2641);
  EXPECT_EQ(p.phase, 1);
  EXPECT_EQ(p.subphase, 0);
  EXPECT_EQ(p.subphase_length, 880);
  const auto b = s.boundaries(2641 + 880);
  EXPECT_EQ(b, (std::vector<Step>{1, 441, 881, 1321, 1761, 2201, 2641, 3521}));
}

namespace {

// Records which arms become active as fresh arms in every subphase.
struct SweepLog {
  std::vector<std::vector<ArmId>> fresh;
  std::vector<std::int64_t> phase;
};

SweepLog run_sweep(std::size_t k, std::size_t m, ShuffleMode shuffle, Step horizon) {
  MemoryLedger ledger(static_cast<std::int64_t>(m));
  UcbMPolicy p(k, m, shuffle, ledger);
  RngStream rng(1, 1);
  SweepLog log;
  for (Step t = 1; t <= horizon; ++t) {
    const ArmId a = p.select(t, rng);
    const auto pos = p.schedule().locate(t);
    if (t == pos.subphase_first) {
      log.fresh.push_back(p.fresh_arms());
      log.phase.push_back(pos.phase);
    }
    p.observe(a, (a.value() * 7 % 5) / 5.0, t);
  }
  return log;
}

}  // namespace

// Every arm enters the active set exactly once per phase: either as the
// retained champion at the phase start or as a fresh arm.
TEST(Invariant, SweepCompletenessExhaustive) {
  for (std::size_t k = 3; k <= 64; ++k) {
    for (std::size_t m = 2; m < k; ++m) {
      const UcbmSchedule s(k, m);
      const Step horizon = s.phase_length(0) + s.phase_length(1);
      MemoryLedger ledger(static_cast<std::int64_t>(m));
      UcbMPolicy p(k, m, ShuffleMode::Once, ledger);
      RngStream rng(k, m);
      std::int64_t current_phase = -1;
      std::multiset<std::size_t> seen;
      auto check = [&] {
        ASSERT_EQ(seen.size(), k) << "K=" << k << " M=" << m;
        for (std::size_t a = 0; a < k; ++a) ASSERT_EQ(seen.count(a), 1u) << "K=" << k << " M=" << m;
      };
      for (Step t = 1; t <= horizon; ++t) {
        const ArmId a = p.select(t, rng);
        const auto pos = s.locate(t);
        if (t == pos.subphase_first) {
          if (pos.phase != current_phase) {
            if (current_phase >= 0) check();
            seen.clear();
            current_phase = pos.phase;
            seen.insert(p.champion()->value());
          }
          for (ArmId f : p.fresh_arms()) seen.insert(f.value());
          ASSERT_LE(p.active_arms().size(), m);
        }
        p.observe(a, static_cast<double>((a.value() + t) % 3) / 2.0, t);
      }
      check();
      ASSERT_LE(ledger.peak_words(), static_cast<std::int64_t>(m));
    }
  }
}

TEST(UcbM, IdentitySweepOrder) {
  const auto log = run_sweep(10, 4, ShuffleMode::None, 200);
  ASSERT_GE(log.fresh.size(), 3u);
  EXPECT_EQ(log.fresh[0], (std::vector<ArmId>{ArmId(1), ArmId(2), ArmId(3)}));
  EXPECT_EQ(log.fresh[1], (std::vector<ArmId>{ArmId(4), ArmId(5), ArmId(6)}));
  EXPECT_EQ(log.fresh[2], (std::vector<ArmId>{ArmId(7), ArmId(8), ArmId(9)}));
}

TEST(UcbM, PlaysEveryActiveArmBeforeComparing) {
  MemoryLedger ledger(5);
  UcbMPolicy p(20, 5, ShuffleMode::None, ledger);
  RngStream rng(1, 1);
  std::set<std::size_t> first;
  for (Step t = 1; t <= 5; ++t) {
    const ArmId a = p.select(t, rng);
    first.insert(a.value());
    p.observe(a, a.value() == 0 ? 1.0 : 0.0, t);
  }
  EXPECT_EQ(first, (std::set<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(UcbM, ConstantRewardsKeepLowestIndexChampion) {
  MemoryLedger ledger(4);
  UcbMPolicy p(12, 4, ShuffleMode::Once, ledger);
  RngStream rng(8, 8);
  const auto& s = p.schedule();
  ArmId prev_low;
  for (Step t = 1; t <= s.phase_length(0) + 10; ++t) {
    const auto pos = s.locate(t);
    const ArmId a = p.select(t, rng);
    if (t == pos.subphase_first && t > 1) {
      // Champion after the previous subphase: lowest index among the arms it held.
      EXPECT_EQ(*p.champion(), prev_low) << "t=" << t;
    }
    if (t == pos.subphase_first) {
      const auto held = p.active_arms();
      prev_low = *std::min_element(held.begin(), held.end());
    }
    p.observe(a, 0.5, t);
  }
}

TEST(UcbM, LedgerNeverExceedsM) {
  SubphaseCycler model(30, 6, 20000);
  MemoryLedger ledger(6);
  UcbMPolicy p(30, 6, ShuffleMode::PerPhase, ledger);
  RngStream rng(4, 4);
  play(p, model, rng);
  EXPECT_EQ(ledger.peak_words(), 6);
  EXPECT_NO_THROW(audit_footprint(p));
}

TEST(UcbM, DeterministicWithoutShuffle) {
  SubphaseCycler model(30, 6, 5000);
  MemoryLedger l1(6), l2(6);
  UcbMPolicy a(30, 6, ShuffleMode::None, l1), b(30, 6, ShuffleMode::None, l2);
  RngStream r1(1, 1), r2(999, 3);
  EXPECT_EQ(play(a, model, r1).plays, play(b, model, r2).plays);
}

TEST(Exp3M, SingleArmIsAlwaysPlayed) {
  MemoryLedger ledger(2);
  Exp3MPolicy p(1, 2, ShuffleMode::Once, ledger);
  RngStream rng(1, 1);
  for (Step t = 1; t <= 500; ++t) {
    const ArmId a = p.select(t, rng);
    ASSERT_EQ(a, ArmId(0));
    p.observe(a, 0.3, t);
  }
  EXPECT_EQ(ledger.peak_words(), 1);
}

TEST(Exp3M, BudgetAtLeastKHoldsEveryArm) {
  MemoryLedger ledger(8);
  Exp3MPolicy p(8, 8, ShuffleMode::None, ledger);
  RngStream rng(1, 1);
  std::set<std::size_t> played;
  for (Step t = 1; t <= 2000; ++t) {
    const ArmId a = p.select(t, rng);
    played.insert(a.value());
    EXPECT_EQ(p.active_arms().size(), 8u);
    p.observe(a, 0.1, t);
  }
  EXPECT_EQ(played.size(), 8u);
}

TEST(Exp3M, SharesScheduleWithUcbM) {
  MemoryLedger l1(5), l2(5);
  Exp3MPolicy e(40, 5, ShuffleMode::Once, l1);
  UcbMPolicy u(40, 5, ShuffleMode::Once, l2);
  EXPECT_EQ(e.schedule().boundaries(100000), u.schedule().boundaries(100000));
}
