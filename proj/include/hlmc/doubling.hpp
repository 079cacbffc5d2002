#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hlmc/core.hpp"

namespace hlmc {

/// Stage lengths 1, 2, 4, ... with the last stage truncated at `horizon`.
inline std::vector<Step> doubling_stages(Step horizon) {
  std::vector<Step> out;
  Step covered = 0;
  for (Step len = 1; covered < horizon; len *= 2) {
    out.push_back(std::min(len, horizon - covered));
    covered += out.back();
  }
  return out;
}

/// Runs a known-horizon policy in stages of length 2^r, building a fresh
/// instance tuned for horizon 2^r at each stage. The previous stage's policy
/// is destroyed first, so its leased statistics return to the ledger before
/// the next stage charges anything.
class DoublingPolicy final : public Policy {
 public:
  using Factory = std::function<std::unique_ptr<Policy>(Step stage_horizon, MemoryLedger& ledger)>;

  DoublingPolicy(Factory factory, MemoryLedger& ledger) : factory_(std::move(factory)), ledger_(&ledger) {}

  ArmId select(Step t, RngStream& rng) override {
    if (t != last_step_ + 1) throw ContractViolation("DoublingPolicy: expected step " + std::to_string(last_step_ + 1));
    if (t > stage_end_) {
      inner_.reset();
      const Step len = Step{1} << stage_;
      stage_start_ = t;
      stage_end_ = t + len - 1;
      ++stage_;
      inner_ = factory_(len, *ledger_);
      const Footprint f = inner_->footprint();
      claim_.words = std::max(claim_.words, f.words);
      claim_.exact = claim_.exact && f.exact;
    }
    return inner_->select(t - stage_start_ + 1, rng);
  }

  void observe(ArmId arm, double reward, Step t) override {
    inner_->observe(arm, reward, t - stage_start_ + 1);
    last_step_ = t;
  }

  /// Largest claim among the stages built so far.
  Footprint footprint() const override { return claim_; }
  const MemoryLedger& ledger() const override { return *ledger_; }

  /// Number of stages started so far.
  int stages() const { return stage_; }

 private:
  Factory factory_;
  MemoryLedger* ledger_;
  std::unique_ptr<Policy> inner_;
  Footprint claim_{0, true};
  int stage_ = 0;
  Step stage_start_ = 1;
  Step stage_end_ = 0;
  Step last_step_ = 0;
};

}  // namespace hlmc
