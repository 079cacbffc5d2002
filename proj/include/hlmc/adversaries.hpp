#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/baselines.hpp"
#include "hlmc/core.hpp"

namespace hlmc {

/// During subphase u of every phase of the UCB-M grid, arm (M(u+1) mod K)
/// pays 1 and every other arm pays 0.
class SubphaseCycler final : public RewardModel {
 public:
  SubphaseCycler(std::size_t arms, std::size_t budget, Step horizon)
      : schedule_(arms, budget), horizon_(horizon) {
    if (budget >= arms) throw std::invalid_argument("subphase_cycler: requires M < K");
    if (horizon < 1) throw std::invalid_argument("subphase_cycler: horizon must be at least 1");
  }

  std::size_t arms() const override { return schedule_.arms(); }
  Step horizon() const override { return horizon_; }

  /// The single arm paying 1 at step t.
  ArmId paying_arm(Step t) const {
    const auto u = static_cast<std::size_t>(schedule_.locate(t).subphase);
    return ArmId((schedule_.budget() * (u + 1)) % schedule_.arms());
  }

  double reward(ArmId arm, Step t) const override { return arm == paying_arm(t) ? 1.0 : 0.0; }

  void rewards_at(Step t, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    out[paying_arm(t).value()] = 1.0;
  }

  const UcbmSchedule& schedule() const { return schedule_; }

 private:
  UcbmSchedule schedule_;
  Step horizon_;
};

/// Arm 0 pays (u mod 2) during subphase u of the UCB-M grid; every other arm
/// pays a constant epsilon.
class BlinkingArm final : public RewardModel {
 public:
  BlinkingArm(std::size_t arms, std::size_t budget, Step horizon, double epsilon)
      : schedule_(arms, budget), horizon_(horizon), epsilon_(epsilon) {
    if (budget >= arms) throw std::invalid_argument("blinking_arm: requires M < K");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("blinking_arm: epsilon must lie in [0,1)");
    if (horizon < 1) throw std::invalid_argument("blinking_arm: horizon must be at least 1");
  }

  std::size_t arms() const override { return schedule_.arms(); }
  Step horizon() const override { return horizon_; }

  double reward(ArmId arm, Step t) const override {
    if (arm.value() != 0) return epsilon_;
    return static_cast<double>(schedule_.locate(t).subphase % 2);
  }

  void rewards_at(Step t, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), epsilon_);
    out[0] = static_cast<double>(schedule_.locate(t).subphase % 2);
  }

  double epsilon() const { return epsilon_; }
  const UcbmSchedule& schedule() const { return schedule_; }

 private:
  UcbmSchedule schedule_;
  Step horizon_;
  double epsilon_;
};

/// Horizon split into V equal phases (remainder folded into the last);
/// in phase v arm (v N mod K) pays 1 and every other arm pays 0.
class ShiftingPhases final : public RewardModel {
 public:
  ShiftingPhases(std::size_t arms, std::size_t group_size, std::int64_t phases, Step horizon)
      : arms_(arms), group_size_(group_size), phases_(phases), horizon_(horizon) {
    if (arms < 1) throw std::invalid_argument("shifting_phases: need at least one arm");
    if (phases < 1) throw std::invalid_argument("shifting_phases: V must be at least 1");
    if (horizon < 1) throw std::invalid_argument("shifting_phases: horizon must be at least 1");
    phase_length_ = std::max<Step>(1, horizon / phases);
  }

  std::size_t arms() const override { return arms_; }
  Step horizon() const override { return horizon_; }
  Step phase_length() const { return phase_length_; }

  std::int64_t phase_of(Step t) const { return std::min<std::int64_t>(phases_ - 1, (t - 1) / phase_length_); }

  ArmId paying_arm(Step t) const {
    return ArmId((static_cast<std::size_t>(phase_of(t)) * group_size_) % arms_);
  }

  double reward(ArmId arm, Step t) const override { return arm == paying_arm(t) ? 1.0 : 0.0; }

  void rewards_at(Step t, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    out[paying_arm(t).value()] = 1.0;
  }

 private:
  std::size_t arms_;
  std::size_t group_size_;
  std::int64_t phases_;
  Step horizon_;
  Step phase_length_ = 1;
};

/// i.i.d. Bernoulli rewards realized up front from (seed, stream 0), so the
/// adversary stays oblivious. Draw order is step-major, then arm.
class BernoulliRewards final : public RewardModel {
 public:
  BernoulliRewards(std::vector<double> means, Step horizon, std::uint64_t seed)
      : means_(std::move(means)), horizon_(horizon) {
    if (means_.empty()) throw std::invalid_argument("bernoulli: need at least one arm");
    for (double m : means_) {
      if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("bernoulli: means must lie in [0,1]");
    }
    if (horizon < 1) throw std::invalid_argument("bernoulli: horizon must be at least 1");
    RngStream rng(seed, 0);
    bits_.resize(static_cast<std::size_t>(horizon) * means_.size());
    for (std::size_t k = 0; k < bits_.size(); ++k) bits_[k] = rng.uniform() < means_[k % means_.size()] ? 1 : 0;
  }

  std::size_t arms() const override { return means_.size(); }
  Step horizon() const override { return horizon_; }
  double reward(ArmId arm, Step t) const override {
    return bits_[static_cast<std::size_t>(t - 1) * means_.size() + arm.value()];
  }
  const std::vector<double>& means() const { return means_; }

 private:
  std::vector<double> means_;
  Step horizon_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace hlmc
