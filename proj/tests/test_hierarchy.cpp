#include <gtest/gtest.h>

#include <cmath>

#include "hlmc/hierarchy.hpp"
#include "hlmc/params.hpp"

using namespace hlmc;

TEST(PartitionArms, Examples) {
  const auto a = partition_arms(5, 3);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], (IndexRange{0, 3}));
  EXPECT_EQ(a[1], (IndexRange{3, 5}));
  const auto b = partition_arms(100, 10);
  ASSERT_EQ(b.size(), 10u);
  for (const auto& r : b) EXPECT_EQ(r.size(), 10u);
  const auto c = partition_arms(7, 7);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (IndexRange{0, 7}));
  EXPECT_THROW(partition_arms(7, 0), std::invalid_argument);
}

TEST(PartitionTime, Examples) {
  const auto a = partition_time(10, 4);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0], (StepInterval{1, 4}));
  EXPECT_EQ(a[1], (StepInterval{5, 8}));
  EXPECT_EQ(a[2], (StepInterval{9, 10}));
  const auto b = partition_time(10, 10);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0], (StepInterval{1, 10}));
  const auto c = partition_time(10, 1);
  ASSERT_EQ(c.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(c[i], (StepInterval{i + 1, i + 1}));
  EXPECT_THROW(partition_time(10, 0), std::invalid_argument);
}

TEST(CeilRoot, Exact) {
  EXPECT_EQ(ceil_root(100, 2), 10u);
  EXPECT_EQ(ceil_root(101, 2), 11u);
  EXPECT_EQ(ceil_root(27, 3), 3u);
  EXPECT_EQ(ceil_root(28, 3), 4u);
  EXPECT_EQ(ceil_root(100, 3), 5u);
  EXPECT_EQ(ceil_root(1, 5), 1u);
  EXPECT_EQ(ceil_root(1000000000000ULL, 2), 1000000u);
}

TEST(Hierarchy, TwoLevelWidths) {
  const auto h = Hierarchy::two_level(100, 10);
  EXPECT_EQ(h.depth(), 2u);
  EXPECT_EQ(h.widths(), (std::vector<std::size_t>{10, 10}));
  EXPECT_EQ(memory_footprint(h), 20);
  EXPECT_EQ(h.children(1, 0), (IndexRange{0, 10}));
  EXPECT_EQ(h.children(2, 3), (IndexRange{30, 40}));
  EXPECT_EQ(h.arms_of(1, 9), (IndexRange{90, 100}));
}

TEST(Hierarchy, ThreeLevelFootprint) {
  const Hierarchy h(100, {5, 5, 4});
  EXPECT_EQ(memory_footprint(h), 14);
  EXPECT_EQ(h.unit_count(2), 25u);
  EXPECT_EQ(h.arms_of(2, 24), (IndexRange{96, 100}));
}

TEST(Hierarchy, FlatFootprintIsK) {
  EXPECT_EQ(memory_footprint(Hierarchy(37, {37})), 37);
}

TEST(Hierarchy, RejectsBadShapes) {
  EXPECT_THROW(Hierarchy(100, {5, 5, 3}), std::invalid_argument);   // 75 < 100
  EXPECT_THROW(Hierarchy(4, {2, 1, 1, 2}), std::invalid_argument);  // depth > log2 K
  EXPECT_THROW(Hierarchy(4, {}), std::invalid_argument);
  EXPECT_THROW(Hierarchy(4, {0, 4}), std::invalid_argument);
}

// Leaf groups partition [0, K) for every K <= 64 and every legal depth.
TEST(Invariant, PartitionSoundnessExhaustive) {
  for (std::size_t k = 1; k <= 64; ++k) {
    const unsigned max_depth = std::max(1u, ceil_log2(k));
    for (unsigned d = 1; d <= max_depth; ++d) {
      const auto h = Hierarchy::uniform(k, d);
      std::vector<int> owner(k, 0);
      const std::size_t parents = d == 1 ? 1 : h.unit_count(d - 1);
      for (std::size_t parent = 0; parent < parents; ++parent) {
        const auto r = h.children(d, parent);
        ASSERT_GE(r.size(), 1u);
        ASSERT_LE(r.size(), h.width(d));
        for (std::size_t a = r.begin; a < r.end; ++a) ++owner[a];
      }
      for (std::size_t a = 0; a < k; ++a) ASSERT_EQ(owner[a], 1) << "K=" << k << " D=" << d << " arm " << a;
      // Each level-1 unit's arm range nests and the ranges tile [0, K).
      std::size_t next = 0;
      for (std::size_t u = 0; u < h.unit_count(1); ++u) {
        const auto r = h.arms_of(1, u);
        ASSERT_EQ(r.begin, next);
        next = r.end;
      }
      ASSERT_EQ(next, k);
    }
  }
}

TEST(EpochSchedule, NestedLengths) {
  const EpochSchedule s(1000, {10, 10, 10});
  EXPECT_EQ(s.interval_length(1), 100);
  EXPECT_EQ(s.interval_length(2), 10);
  EXPECT_EQ(s.interval_length(3), 1);
  EXPECT_TRUE(s.starts_interval(1, 101));
  EXPECT_TRUE(s.ends_interval(2, 20));
  EXPECT_FALSE(s.ends_interval(2, 21));
  EXPECT_THROW(EpochSchedule(1001, {10, 10, 10}), std::invalid_argument);
}

TEST(EpochSchedule, IntervalsTileHorizon) {
  const auto s = EpochSchedule::two_level(10, 4);
  const auto iv = s.intervals(1);
  ASSERT_EQ(iv.size(), 3u);
  EXPECT_EQ(iv.back(), (StepInterval{9, 10}));
  EXPECT_TRUE(s.ends_interval(1, 10));
}

TEST(ParamsWeakExpected, Examples) {
  const auto p = params_weak_expected(1000000, 100);
  EXPECT_EQ(p.group_size, 10u);
  EXPECT_EQ(p.group_count, 10u);
  EXPECT_EQ(p.epoch_length, 1000);
  EXPECT_EQ(p.epochs, 1000);
  EXPECT_NEAR(p.group.gamma, 0.107298, 1e-6);
  EXPECT_NEAR(p.arm.gamma, 0.107298, 1e-6);
  EXPECT_EQ(p.group.kind, RoutineKind::Exp3);
  const auto q = params_weak_expected(100, 4);
  EXPECT_EQ(q.group_size, 2u);
  EXPECT_EQ(q.group_count, 2u);
  EXPECT_EQ(q.epoch_length, 10);
  EXPECT_THROW(params_weak_expected(100, 3), std::invalid_argument);
}

TEST(ParamsWeakExpected, PerfectSquareGivesCeilSqrtT) {
  for (Step t : {1, 2, 99, 100, 101, 12345, 1000000}) {
    for (std::size_t k : {4u, 9u, 16u, 49u, 100u}) {
      EXPECT_EQ(params_weak_expected(t, k).epoch_length,
                std::clamp<Step>(static_cast<Step>(std::ceil(std::sqrt(static_cast<double>(t)) - 1e-12)), 1, t))
          << "T=" << t << " K=" << k;
    }
  }
}

TEST(ParamsWeakExpected, DeltaNondecreasingInT) {
  for (std::size_t k : {5u, 20u, 100u}) {
    Step prev = 0;
    for (Step t = 1; t <= 5000; t += 7) {
      const Step d = params_weak_expected(t, k).epoch_length;
      EXPECT_GE(d, prev);
      prev = d;
    }
  }
}

TEST(ParamsWeakHighProb, Example) {
  const auto p = params_weak_highprob(1000000, 100, 0.05);
  EXPECT_EQ(p.epoch_length, 1921);  // sqrt(...) = 1920.98
  EXPECT_EQ(p.group.kind, RoutineKind::Exp3P);
  EXPECT_EQ(p.arm.kind, RoutineKind::Exp3P);
  const double n = 10.0, s = static_cast<double>(p.epochs), d = static_cast<double>(p.epoch_length);
  EXPECT_NEAR(p.arm.beta * std::sqrt(n * d), std::sqrt(std::log(2 * 100 * s / 0.05)), 1e-12);
  EXPECT_THROW(params_weak_highprob(100, 100, 0.0), std::invalid_argument);
}

TEST(ParamsShifting, Examples) {
  const auto p = params_shifting(1000000, 16, 10);
  EXPECT_EQ(p.group_size, 4u);
  EXPECT_EQ(p.group_count, 4u);
  EXPECT_EQ(p.epoch_length, 96);
  EXPECT_NEAR(p.group.alpha * static_cast<double>(p.epochs), 1.0, 1e-12);
  EXPECT_EQ(p.group.kind, RoutineKind::Exp3S);
  EXPECT_EQ(p.arm.kind, RoutineKind::Exp3);
  EXPECT_TRUE(p.in_regime);
  const auto v1 = params_shifting(1000000, 16, 1);
  EXPECT_NEAR(static_cast<double>(v1.epoch_length) / p.epoch_length, std::sqrt(10.0), 0.05);
  EXPECT_FALSE(params_shifting(100, 16, 10).in_regime);
}

TEST(ParamsShifting, UnknownV) {
  const auto p = params_shifting_unknown_v(1000000, 16);
  EXPECT_EQ(p.epoch_length, 302);
  EXPECT_NEAR(p.group.alpha * static_cast<double>(p.epochs), 1.0, 1e-12);
  const auto q = params_shifting(1000000, 16, 1);
  EXPECT_EQ(p.epoch_length, q.epoch_length);
  EXPECT_EQ(p.group, q.group);
}

TEST(ParamsThreeLevel, Examples) {
  const auto p = params_threelevel(1000000, 27);
  EXPECT_EQ(p.sizes, (std::vector<std::size_t>{3, 3, 3}));
  EXPECT_EQ(p.lengths, (std::vector<Step>{100, 100, 100}));
  for (double g : p.gammas) EXPECT_NEAR(g, 0.128371, 1e-6);
  EXPECT_EQ(params_threelevel(1000, 100).sizes, (std::vector<std::size_t>{5, 5, 4}));
  EXPECT_THROW(params_threelevel(1000, 7), std::invalid_argument);
}

TEST(ParamsThreeLevel, ProductCoversHorizon) {
  for (Step t : {1, 17, 1000, 99999, 100000, 1234567}) {
    for (std::size_t k : {8u, 27u, 50u, 100u, 1000u}) {
      const auto p = params_threelevel(t, k);
      EXPECT_GE(p.lengths[0] * p.lengths[1] * p.lengths[2], t);
    }
  }
}

TEST(MinDepth, Examples) {
  EXPECT_EQ(min_depth(100, 100), 1u);
  EXPECT_EQ(min_depth(20, 100), 2u);
  EXPECT_EQ(min_depth(6, 8), 2u);
  EXPECT_THROW(min_depth(3, 100), InfeasibleBudget);
}

TEST(AdaptiveTwoLevel, Examples) {
  auto p = adaptive_two_level(20, 100);
  EXPECT_EQ(p.group_size, 10u);
  EXPECT_EQ(p.group_count, 10u);
  p = adaptive_two_level(50, 100);
  EXPECT_EQ(p.group_size, 3u);
  EXPECT_EQ(p.group_count, 34u);
  p = adaptive_two_level(80, 100);
  EXPECT_EQ(p.group_size, 2u);
  EXPECT_EQ(p.group_count, 50u);
  EXPECT_THROW(adaptive_two_level(19, 100), InfeasibleBudget);
}

TEST(AdaptiveTwoLevel, FitsBudgetWheneverFeasible) {
  for (std::size_t k = 1; k <= 200; ++k) {
    for (std::int64_t m = 1; m <= 60; ++m) {
      if (static_cast<double>(m * m) < 4.0 * static_cast<double>(k)) {
        EXPECT_THROW(adaptive_two_level(m, k), InfeasibleBudget);
        continue;
      }
      const auto p = adaptive_two_level(m, k);
      EXPECT_LE(static_cast<std::int64_t>(p.group_size + p.group_count), m);
      EXPECT_GE(p.group_size * p.group_count, k);
    }
  }
}
