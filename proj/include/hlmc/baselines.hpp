#pragma once

// Memory-constrained baselines built on champion retention.
//
// This is a reconstruction of UCB-M from its behavioural description, not a
// port of the original algorithm. Time is cut into phases of length
// 2^i * h0 * b0, each split into h0 subphases of 2^i * b0 steps, with
// h0 = ceil((K-1)/(M-1)) and b0 = M(M+2). During a subphase the policy keeps
// statistics for the current champion plus the next M-1 arms of a sweep
// order and runs a bandit subroutine over them. At the end of the subphase
// only the arm with the best empirical mean survives as champion; every
// other statistic is dropped. Each phase sweeps all non-champion arms once.
//
// UcbMPolicy uses UCB1 inside a subphase; Exp3MPolicy swaps in EXP3.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/core.hpp"
#include "hlmc/exp_weights.hpp"

namespace hlmc {

/// Phase/subphase grid shared by the baselines and the adversaries built to
/// defeat them.
class UcbmSchedule {
 public:
  struct Position {
    std::int64_t phase = 0;
    std::int64_t subphase = 0;
    Step subphase_first = 1;   // first step of the subphase
    Step subphase_length = 0;  // untruncated length 2^i b0
  };

  UcbmSchedule(std::size_t arms, std::size_t budget) : arms_(arms), budget_(budget) {
    if (budget < 2) throw std::invalid_argument("ucbm_schedule: memory budget must be at least 2");
    if (arms < 1) throw std::invalid_argument("ucbm_schedule: need at least one arm");
    h0_ = std::max<std::int64_t>(1, static_cast<std::int64_t>((arms - 1 + budget - 2) / (budget - 1)));
    b0_ = static_cast<std::int64_t>(budget * (budget + 2));
  }

  std::size_t arms() const { return arms_; }
  std::size_t budget() const { return budget_; }
  std::int64_t subphases_per_phase() const { return h0_; }  // h0
  std::int64_t base_length() const { return b0_; }          // b0

  Step subphase_length(std::int64_t phase) const { return b0_ << phase; }
  Step phase_length(std::int64_t phase) const { return h0_ * subphase_length(phase); }
  /// First step of `phase`: 1 + h0 b0 (2^i - 1).
  Step phase_start(std::int64_t phase) const { return 1 + h0_ * b0_ * ((Step{1} << phase) - 1); }

  Position locate(Step t) const {
    if (t < 1) throw std::out_of_range("UcbmSchedule::locate: steps start at 1");
    std::int64_t phase = 0;
    while (phase_start(phase + 1) <= t) ++phase;
    Position pos;
    pos.phase = phase;
    pos.subphase_length = subphase_length(phase);
    pos.subphase = (t - phase_start(phase)) / pos.subphase_length;
    pos.subphase_first = phase_start(phase) + pos.subphase * pos.subphase_length;
    return pos;
  }

  /// First step of every subphase that starts within [1, horizon].
  std::vector<Step> boundaries(Step horizon) const {
    std::vector<Step> out;
    for (std::int64_t phase = 0; phase_start(phase) <= horizon; ++phase) {
      for (std::int64_t u = 0; u < h0_; ++u) {
        const Step first = phase_start(phase) + u * subphase_length(phase);
        if (first > horizon) break;
        out.push_back(first);
      }
    }
    return out;
  }

 private:
  std::size_t arms_;
  std::size_t budget_;
  std::int64_t h0_ = 1;
  std::int64_t b0_ = 1;
};

enum class ShuffleMode { None, Once, PerPhase };

inline const char* to_string(ShuffleMode m) {
  switch (m) {
    case ShuffleMode::None: return "none";
    case ShuffleMode::Once: return "once";
    case ShuffleMode::PerPhase: return "per_phase";
  }
  return "?";
}

/// Schedule, sweep order and champion bookkeeping common to both baselines.
/// Derived classes supply the within-subphase subroutine.
class ChampionSweepPolicy : public Policy {
 public:
  ChampionSweepPolicy(std::size_t arms, std::size_t budget, ShuffleMode shuffle, MemoryLedger& ledger)
      : schedule_(arms, budget), shuffle_(shuffle), ledger_(&ledger) {
    order_.resize(arms);
    for (std::size_t i = 0; i < arms; ++i) order_[i] = ArmId(i);
  }

  ArmId select(Step t, RngStream& rng) final {
    if (t != last_step_ + 1) throw ContractViolation("baseline: expected step " + std::to_string(last_step_ + 1));
    const auto pos = schedule_.locate(t);
    if (t == pos.subphase_first) begin_subphase(pos, rng);
    ++elapsed_;
    pending_ = active_[choose(rng)].arm;
    return pending_;
  }

  void observe(ArmId arm, double reward, Step t) final {
    if (t != last_step_ + 1 || arm != pending_) throw ContractViolation("baseline: observe does not match select");
    if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("baseline: reward outside [0,1]");
    const std::size_t slot = slot_of(arm);
    ArmStats& s = active_[slot];
    s.mean = (s.mean * static_cast<double>(s.count) + reward) / static_cast<double>(s.count + 1);
    ++s.count;
    learn(slot, reward);
    last_step_ = t;
  }

  Footprint footprint() const override {
    return {static_cast<std::int64_t>(std::min(schedule_.budget(), schedule_.arms())), true};
  }
  const MemoryLedger& ledger() const override { return *ledger_; }

  const UcbmSchedule& schedule() const { return schedule_; }
  std::optional<ArmId> champion() const { return champion_; }

  /// Arms in the current active set; the champion (if any) comes first.
  std::vector<ArmId> active_arms() const {
    std::vector<ArmId> out;
    for (const auto& s : active_) out.push_back(s.arm);
    return out;
  }

  /// Arms that entered as fresh arms during the current subphase.
  const std::vector<ArmId>& fresh_arms() const { return fresh_; }

 protected:
  struct ArmStats {
    ArmId arm;
    double mean = 0.0;
    std::int64_t count = 0;
  };

  /// Slot in active_ to play next; elapsed_ is the 1-based step within the subphase.
  virtual std::size_t choose(RngStream& rng) = 0;
  virtual void learn(std::size_t slot, double reward) = 0;
  virtual void subphase_started() = 0;

  const std::vector<ArmStats>& active() const { return active_; }
  std::int64_t elapsed() const { return elapsed_; }
  Step subphase_length() const { return current_length_; }

 private:
  std::size_t slot_of(ArmId arm) const {
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (active_[i].arm == arm) return i;
    }
    throw ContractViolation("baseline: arm not in the active set");
  }

  void retain_champion() {
    if (active_.empty()) return;
    // Highest empirical mean among played arms; ties go to the lower arm index.
    const ArmStats* best = nullptr;
    for (const auto& s : active_) {
      if (s.count == 0) continue;
      if (best == nullptr || s.mean > best->mean || (s.mean == best->mean && s.arm < best->arm)) best = &s;
    }
    if (best != nullptr) champion_ = best->arm;
  }

  void begin_subphase(const UcbmSchedule::Position& pos, RngStream& rng) {
    retain_champion();
    if (pos.subphase == 0) {
      const bool reshuffle = shuffle_ == ShuffleMode::PerPhase || (shuffle_ == ShuffleMode::Once && pos.phase == 0);
      if (reshuffle) rng.shuffle(order_);
      if (!champion_) champion_ = order_.front();
      sweep_.clear();
      for (ArmId a : order_) {
        if (a != *champion_) sweep_.push_back(a);
      }
      cursor_ = 0;
    }
    const std::size_t take = std::min(schedule_.budget() - 1, sweep_.size() - cursor_);
    fresh_.assign(sweep_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                  sweep_.begin() + static_cast<std::ptrdiff_t>(cursor_ + take));
    cursor_ += take;

    active_.clear();
    active_.push_back({*champion_, 0.0, 0});
    for (ArmId a : fresh_) active_.push_back({a, 0.0, 0});
    // One word per stored arm statistic; the lease grows or shrinks to the active set.
    if (lease_.words() == 0) {
      lease_ = LedgerLease(*ledger_, static_cast<std::int64_t>(active_.size()));
    } else {
      lease_.resize(static_cast<std::int64_t>(active_.size()));
    }
    elapsed_ = 0;
    current_length_ = pos.subphase_length;
    subphase_started();
  }

  UcbmSchedule schedule_;
  ShuffleMode shuffle_;
  MemoryLedger* ledger_;
  LedgerLease lease_;
  std::vector<ArmId> order_;
  std::vector<ArmId> sweep_;
  std::vector<ArmId> fresh_;
  std::size_t cursor_ = 0;
  std::optional<ArmId> champion_;
  std::vector<ArmStats> active_;
  std::int64_t elapsed_ = 0;
  Step current_length_ = 0;
  ArmId pending_;
  Step last_step_ = 0;
};

/// UCB1 inside each subphase: every active arm is played once (champion
/// first), then the arm maximizing mean + sqrt(2 ln tau / count) is played,
/// with tau the steps elapsed in the subphase and ties to the lower arm index.
class UcbMPolicy final : public ChampionSweepPolicy {
 public:
  UcbMPolicy(std::size_t arms, std::size_t budget, ShuffleMode shuffle, MemoryLedger& ledger)
      : ChampionSweepPolicy(arms, budget, shuffle, ledger) {}

 protected:
  std::size_t choose(RngStream&) override {
    const auto& arms = active();
    for (std::size_t i = 0; i < arms.size(); ++i) {
      if (arms[i].count == 0) return i;
    }
    const double log_tau = std::log(static_cast<double>(elapsed()));
    std::size_t best = 0;
    double best_index = -1.0;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      const double index = arms[i].mean + std::sqrt(2.0 * log_tau / static_cast<double>(arms[i].count));
      if (index > best_index || (index == best_index && arms[i].arm < arms[best].arm)) {
        best = i;
        best_index = index;
      }
    }
    return best;
  }
  void learn(std::size_t, double) override {}
  void subphase_started() override {}
};

/// EXP3 inside each subphase, with gamma tuned to the subphase length and
/// the active-set size. Champion retention still uses empirical means.
class Exp3MPolicy final : public ChampionSweepPolicy {
 public:
  Exp3MPolicy(std::size_t arms, std::size_t budget, ShuffleMode shuffle, MemoryLedger& ledger)
      : ChampionSweepPolicy(arms, budget, shuffle, ledger) {}

 protected:
  std::size_t choose(RngStream& rng) override { return routine_->draw(rng); }
  void learn(std::size_t slot, double reward) override { routine_->update(slot, reward); }
  void subphase_started() override {
    const std::size_t n = active().size();
    const double gamma = n < 2 ? 1.0 : exp3_default_gamma(n, static_cast<double>(subphase_length()));
    routine_.emplace(RoutineSpec::exp3(gamma), n);
  }

 private:
  std::optional<ExpWeightsRoutine> routine_;
};

}  // namespace hlmc
