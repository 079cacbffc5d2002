#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hlmc {

/// Time steps are 1-based, matching the horizon [1, T].
using Step = std::int64_t;

/// Index of an arm in [0, K).
struct ArmId {
  std::uint32_t index = 0;

  constexpr ArmId() = default;
  constexpr explicit ArmId(std::uint32_t i) : index(i) {}
  constexpr explicit ArmId(std::size_t i) : index(static_cast<std::uint32_t>(i)) {}
  constexpr explicit ArmId(int i) : index(static_cast<std::uint32_t>(i)) {}

  constexpr std::size_t value() const { return index; }
  friend constexpr auto operator<=>(const ArmId&, const ArmId&) = default;
};

// -- errors -------------------------------------------------------------------

/// A policy tried to store more statistics than its memory budget allows.
class BudgetViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a sequencing contract (e.g. out-of-order time steps).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// No hierarchy or partition fits in the requested memory budget.
class InfeasibleBudget : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// -- randomness ---------------------------------------------------------------

/// Deterministic random stream addressed by (seed, stream id).
///
/// The engine is seeded through std::seed_seq, whose mixing is fully
/// specified by the standard, and all derived draws are computed here rather
/// than through the implementation-defined std distributions, so a given
/// (seed, stream) pair reproduces the same draws on every conforming
/// toolchain.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

// -- memory accounting --------------------------------------------------------

/// Word-level memory ledger. One stored arm or group statistic is one word;
/// O(1) scalar bookkeeping is not charged.
class MemoryLedger {
 public:
  explicit MemoryLedger(std::int64_t budget_words) : budget_(budget_words) {
    if (budget_words < 0) throw std::invalid_argument("MemoryLedger: negative budget");
  }

  std::int64_t budget_words() const { return budget_; }
  std::int64_t live_words() const { return live_; }
  std::int64_t peak_words() const { return peak_; }
  bool compliant() const { return peak_ <= budget_; }

  void charge(std::int64_t words) {
    if (words < 0) throw std::invalid_argument("MemoryLedger::charge: negative word count");
    if (live_ + words > budget_) {
      throw BudgetViolation("memory budget exceeded: live " + std::to_string(live_) + " + " +
                            std::to_string(words) + " > budget " + std::to_string(budget_));
    }
    live_ += words;
    if (live_ > peak_) peak_ = live_;
  }

  void release(std::int64_t words) {
    if (words < 0 || words > live_) {
      throw ContractViolation("MemoryLedger::release: releasing " + std::to_string(words) +
                              " words with only " + std::to_string(live_) + " live");
    }
    live_ -= words;
  }

 private:
  std::int64_t budget_;
  std::int64_t live_ = 0;
  std::int64_t peak_ = 0;
};

/// RAII claim on ledger words; released when the lease dies.
class LedgerLease {
 public:
  LedgerLease() = default;
  LedgerLease(MemoryLedger& ledger, std::int64_t words) : ledger_(&ledger), words_(words) {
    ledger.charge(words);
  }
  LedgerLease(const LedgerLease&) = delete;
  LedgerLease& operator=(const LedgerLease&) = delete;
  LedgerLease(LedgerLease&& other) noexcept
      : ledger_(std::exchange(other.ledger_, nullptr)), words_(std::exchange(other.words_, 0)) {}
  LedgerLease& operator=(LedgerLease&& other) noexcept {
    if (this != &other) {
      reset();
      ledger_ = std::exchange(other.ledger_, nullptr);
      words_ = std::exchange(other.words_, 0);
    }
    return *this;
  }
  ~LedgerLease() { reset(); }

  std::int64_t words() const { return words_; }

  /// Adjusts the claim to `words`, charging or releasing the difference.
  void resize(std::int64_t words) {
    if (ledger_ == nullptr) throw ContractViolation("LedgerLease::resize on empty lease");
    if (words > words_) {
      ledger_->charge(words - words_);
    } else {
      ledger_->release(words_ - words);
    }
    words_ = words;
  }

  void reset() noexcept {
    if (ledger_ != nullptr && words_ > 0) {
      // live >= words_ holds for every lease, so release cannot throw here.
      ledger_->release(words_);
    }
    ledger_ = nullptr;
    words_ = 0;
  }

 private:
  MemoryLedger* ledger_ = nullptr;
  std::int64_t words_ = 0;
};

// -- rewards ------------------------------------------------------------------

/// Oblivious adversary: a fixed mapping (arm, t) -> [0, 1].
class RewardModel {
 public:
  virtual ~RewardModel() = default;

  virtual std::size_t arms() const = 0;
  virtual Step horizon() const = 0;
  virtual double reward(ArmId arm, Step t) const = 0;

  /// Writes the reward of every arm at step t into `out` (size == arms()).
  virtual void rewards_at(Step t, std::span<double> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = reward(ArmId(i), t);
  }
};

/// Dense T x K reward table; values are validated to lie in [0, 1].
class MatrixRewardModel final : public RewardModel {
 public:
  /// `rows[t-1][i]` is the reward of arm i at step t.
  explicit MatrixRewardModel(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("MatrixRewardModel: empty reward matrix");
    arms_ = rows.front().size();
    if (arms_ == 0) throw std::invalid_argument("MatrixRewardModel: zero arms");
    horizon_ = static_cast<Step>(rows.size());
    values_.reserve(rows.size() * arms_);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != arms_) {
        throw std::invalid_argument("MatrixRewardModel: ragged row at t=" + std::to_string(t + 1));
      }
      for (double r : rows[t]) {
        if (!(r >= 0.0 && r <= 1.0)) {
          throw std::invalid_argument("MatrixRewardModel: reward outside [0,1] at t=" + std::to_string(t + 1));
        }
        values_.push_back(r);
      }
    }
  }

  std::size_t arms() const override { return arms_; }
  Step horizon() const override { return horizon_; }
  double reward(ArmId arm, Step t) const override {
    return values_[static_cast<std::size_t>(t - 1) * arms_ + arm.value()];
  }
  void rewards_at(Step t, std::span<double> out) const override {
    const auto* row = values_.data() + static_cast<std::size_t>(t - 1) * arms_;
    std::copy(row, row + arms_, out.begin());
  }

 private:
  std::size_t arms_ = 0;
  Step horizon_ = 0;
  std::vector<double> values_;
};

// -- policies -----------------------------------------------------------------

/// Closed-form memory claim of a policy. When `exact`, the ledger peak of a
/// completed run must equal `words`; otherwise it must not exceed it.
struct Footprint {
  std::int64_t words = 0;
  bool exact = true;
};

/// Sequential decision maker under bandit feedback. Implementations never see
/// the reward model; every stored per-arm or per-group statistic is leased
/// from the ledger passed at construction.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual ArmId select(Step t, RngStream& rng) = 0;
  virtual void observe(ArmId arm, double reward, Step t) = 0;

  virtual Footprint footprint() const = 0;
  virtual const MemoryLedger& ledger() const = 0;
};

// -- traces -------------------------------------------------------------------

struct Play {
  Step t = 0;
  ArmId arm;
  double reward = 0.0;

  friend bool operator==(const Play&, const Play&) = default;
};

struct RunTrace {
  std::vector<Play> plays;
  std::int64_t peak_words = 0;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// Plays `policy` against `model` for the model's full horizon.
inline RunTrace play(Policy& policy, const RewardModel& model, RngStream& rng) {
  RunTrace trace;
  const Step horizon = model.horizon();
  trace.plays.reserve(static_cast<std::size_t>(horizon));
  for (Step t = 1; t <= horizon; ++t) {
    const ArmId arm = policy.select(t, rng);
    if (arm.value() >= model.arms()) {
      throw ContractViolation("policy selected arm " + std::to_string(arm.value()) + " outside [0," +
                              std::to_string(model.arms()) + ")");
    }
    const double r = model.reward(arm, t);
    policy.observe(arm, r, t);
    trace.plays.push_back({t, arm, r});
  }
  trace.peak_words = policy.ledger().peak_words();
  return trace;
}

/// Checks the ledger peak against the policy's closed-form claim.
inline void audit_footprint(const Policy& policy) {
  const Footprint claim = policy.footprint();
  const auto peak = policy.ledger().peak_words();
  const bool ok = claim.exact ? peak == claim.words : peak <= claim.words;
  if (!ok) {
    throw ContractViolation("ledger audit failed: peak " + std::to_string(peak) +
                            (claim.exact ? " != " : " > ") + std::to_string(claim.words));
  }
}

/// 1 + number of positions where consecutive entries differ.
template <typename T>
std::int64_t hardness(std::span<const T> seq) {
  if (seq.empty()) throw std::invalid_argument("hardness: empty benchmark sequence");
  std::int64_t h = 1;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (!(seq[i] == seq[i - 1])) ++h;
  }
  return h;
}

inline std::int64_t hardness(const std::vector<ArmId>& seq) {
  return hardness(std::span<const ArmId>(seq));
}

}  // namespace hlmc
