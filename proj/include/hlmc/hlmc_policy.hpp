#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/core.hpp"
#include "hlmc/exp_weights.hpp"
#include "hlmc/hierarchy.hpp"
#include "hlmc/params.hpp"

namespace hlmc {

/// Everything needed to instantiate an HLMC policy: the arm hierarchy, the
/// nested epoch schedule and one routine (kind + parameters) per level.
struct HlmcConfig {
  Hierarchy hierarchy;
  EpochSchedule schedule;
  std::vector<RoutineSpec> levels;

  HlmcConfig(Hierarchy h, EpochSchedule s, std::vector<RoutineSpec> r)
      : hierarchy(std::move(h)), schedule(std::move(s)), levels(std::move(r)) {
    if (hierarchy.depth() != schedule.depth() || hierarchy.depth() != levels.size()) {
      throw std::invalid_argument("HlmcConfig: hierarchy, schedule and routines disagree on depth");
    }
  }

  std::size_t depth() const { return levels.size(); }
  Step horizon() const { return schedule.horizon(); }
  std::int64_t footprint() const { return memory_footprint(hierarchy); }

  friend bool operator==(const HlmcConfig&, const HlmcConfig&) = default;
};

inline HlmcConfig make_two_level_config(std::size_t arms, Step horizon, const TwoLevelParams& p) {
  return HlmcConfig(Hierarchy(arms, {p.group_count, p.group_size}), EpochSchedule::two_level(horizon, p.epoch_length),
                    {p.group, p.arm});
}

inline HlmcConfig make_three_level_config(std::size_t arms, Step horizon, const ThreeLevelParams& p) {
  return HlmcConfig(Hierarchy(arms, p.sizes), EpochSchedule(horizon, p.lengths),
                    {RoutineSpec::exp3(p.gammas[0]), RoutineSpec::exp3(p.gammas[1]), RoutineSpec::exp3(p.gammas[2])});
}

/// Single-level hierarchy: HLMC collapses to the flat routine on all arms.
inline HlmcConfig make_flat_config(std::size_t arms, Step horizon, const RoutineSpec& routine) {
  return HlmcConfig(Hierarchy(arms, {arms}), EpochSchedule(horizon, {horizon}), {routine});
}

/// Hierarchical learning under a memory budget.
///
/// Level d keeps one exponential-weights state over the children of the unit
/// currently selected at level d-1. That state lives for one level-(d-1)
/// interval: it is built (and its N_d words leased) when the interval opens
/// and dropped when it closes. Level d draws a child at the start of each of
/// its own intervals, averages the rewards earned while that child is
/// selected, and feeds the average back when its interval ends. Level D's
/// intervals are single steps, so its feedback is the raw reward.
///
/// Each level reserves its full width N_d even over a short trailing group,
/// so the ledger peak of any run is exactly sum_d N_d.
class HlmcPolicy final : public Policy {
 public:
  HlmcPolicy(HlmcConfig config, MemoryLedger& ledger) : config_(std::move(config)), ledger_(&ledger) {
    // Refuse up front rather than midway through the first epoch.
    if (config_.footprint() > ledger.budget_words() - ledger.live_words()) {
      throw BudgetViolation("HlmcPolicy: needs " + std::to_string(config_.footprint()) + " words, ledger has " +
                            std::to_string(ledger.budget_words() - ledger.live_words()) + " free");
    }
    levels_.resize(config_.depth());
    open_level(0, 0);
  }

  ArmId select(Step t, RngStream& rng) override {
    if (awaiting_observe_) throw ContractViolation("HlmcPolicy: select called twice without observe");
    if (t != last_step_ + 1) {
      throw ContractViolation("HlmcPolicy: expected step " + std::to_string(last_step_ + 1) + ", got " +
                              std::to_string(t));
    }
    if (t > config_.horizon()) throw ContractViolation("HlmcPolicy: step beyond the configured horizon");
    const auto& sched = config_.schedule;
    std::size_t parent = 0;
    for (std::size_t d = 0; d < levels_.size(); ++d) {
      Level& level = levels_[d];
      if (d > 0 && sched.starts_interval(d, t)) open_level(d, parent);
      if (sched.starts_interval(d + 1, t)) {
        level.choice = level.routine->draw(rng);
        level.average = 0.0;
        level.plays = 0;
      }
      parent = level.children.begin + level.choice;
    }
    awaiting_observe_ = true;
    return ArmId(parent);
  }

  void observe(ArmId arm, double reward, Step t) override {
    if (!awaiting_observe_ || t != last_step_ + 1) {
      throw ContractViolation("HlmcPolicy: observe does not follow select at step " + std::to_string(t));
    }
    if (arm != selected_arm()) throw ContractViolation("HlmcPolicy: observed arm differs from the selected arm");
    if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("HlmcPolicy: reward outside [0,1]");
    const auto& sched = config_.schedule;
    for (std::size_t d = levels_.size(); d-- > 0;) {
      Level& level = levels_[d];
      level.average = (level.average * static_cast<double>(level.plays) + reward) / static_cast<double>(level.plays + 1);
      ++level.plays;
      if (sched.ends_interval(d + 1, t)) level.routine->update(level.choice, level.average);
      // The level-(d+1) state spans one level-d interval.
      if (d + 1 < levels_.size() && sched.ends_interval(d + 1, t)) close_level(d + 1);
    }
    last_step_ = t;
    awaiting_observe_ = false;
  }

  Footprint footprint() const override { return {config_.footprint(), true}; }
  const MemoryLedger& ledger() const override { return *ledger_; }
  const HlmcConfig& config() const { return config_; }

  /// Weights of the live level-d routine (1-based), for inspection.
  std::span<const double> level_weights(std::size_t level) const {
    const auto& l = levels_.at(level - 1);
    if (!l.routine) throw std::logic_error("HlmcPolicy: level has no live state");
    return l.routine->weights();
  }

 private:
  struct Level {
    std::optional<ExpWeightsRoutine> routine;
    LedgerLease lease;
    IndexRange children;
    std::size_t choice = 0;
    double average = 0.0;
    std::int64_t plays = 0;
  };

  ArmId selected_arm() const {
    const Level& inner = levels_.back();
    return ArmId(inner.children.begin + inner.choice);
  }

  void open_level(std::size_t d, std::size_t parent) {
    Level& level = levels_[d];
    close_level(d);
    const auto width = static_cast<std::int64_t>(config_.hierarchy.width(d + 1));
    level.lease = LedgerLease(*ledger_, width);
    level.children = config_.hierarchy.children(d + 1, parent);
    level.routine.emplace(config_.levels[d], level.children.size());
    level.choice = 0;
    level.average = 0.0;
    level.plays = 0;
  }

  void close_level(std::size_t d) {
    levels_[d].routine.reset();
    levels_[d].lease.reset();
  }

  HlmcConfig config_;
  MemoryLedger* ledger_;
  std::vector<Level> levels_;
  Step last_step_ = 0;
  bool awaiting_observe_ = false;
};

}  // namespace hlmc
