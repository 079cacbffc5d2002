#pragma once

// EXP3, EXP3.P and EXP3.S over a generic action count n.
//
// All three share the mixed sampling distribution
//   p_i = (1 - gamma) * w_i / sum_j w_j + gamma / n
// and differ only in how the weights move after a play. Each update is
// degree-1 homogeneous in the weight vector, so dividing every weight by the
// same constant never changes a probability; that is what makes the overflow
// renormalization below legal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hlmc/core.hpp"

namespace hlmc {

struct Exp3Params {
  double gamma = 1.0;
};

struct Exp3PParams {
  double eta = 0.0;
  double gamma = 1.0;
  double beta = 0.0;
};

struct Exp3SParams {
  double gamma = 1.0;
  double alpha = 0.0;
};

/// Weight vector plus the routine's parameters. Weights start at 1.
template <typename Params>
struct ExpWeightsState {
  std::vector<double> weights;
  Params params;

  ExpWeightsState() = default;
  ExpWeightsState(std::size_t n, Params p) : weights(n, 1.0), params(p) {
    if (n == 0) throw std::invalid_argument("exponential weights: action count must be positive");
    if (!(p.gamma > 0.0 && p.gamma <= 1.0)) {
      throw std::invalid_argument("exponential weights: gamma must lie in (0,1], got " + std::to_string(p.gamma));
    }
  }

  std::size_t size() const { return weights.size(); }
};

using Exp3State = ExpWeightsState<Exp3Params>;
using Exp3PState = ExpWeightsState<Exp3PParams>;
using Exp3SState = ExpWeightsState<Exp3SParams>;

/// Weights are rescaled by their maximum once it passes this value.
inline constexpr double kRenormalizeAbove = 1e100;

/// Mixed distribution (1-gamma) w/W + gamma/n written into `out`.
inline void mix_probabilities(std::span<const double> weights, double gamma, std::span<double> out) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double n = static_cast<double>(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = (1.0 - gamma) * (weights[i] / total) + gamma / n;
  }
}

template <typename Params>
std::vector<double> probabilities(const ExpWeightsState<Params>& state) {
  std::vector<double> p(state.size());
  mix_probabilities(state.weights, state.params.gamma, p);
  return p;
}

/// Inverse-CDF draw with a single uniform u in [0,1). The first index whose
/// cumulative mass exceeds u wins, so ties go to the lower index.
inline std::size_t sample_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  // Round-off left u above the total mass: fall back to the last supported index.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return probs.size() - 1;
}

/// Divides all weights by their maximum. Weights that underflow are floored
/// at the smallest normal double so they stay strictly positive.
template <typename Params>
void renormalize(ExpWeightsState<Params>& state) {
  const double top = *std::max_element(state.weights.begin(), state.weights.end());
  for (double& w : state.weights) {
    w = std::max(w / top, std::numeric_limits<double>::min());
  }
}

namespace detail {

template <typename Params>
void renormalize_if_large(ExpWeightsState<Params>& state) {
  const double top = *std::max_element(state.weights.begin(), state.weights.end());
  if (top > kRenormalizeAbove) renormalize(state);
}

inline void check_update_args(std::size_t n, ArmId played, double reward) {
  if (played.value() >= n) {
    throw std::out_of_range("exponential weights: played index " + std::to_string(played.value()) +
                            " outside [0," + std::to_string(n) + ")");
  }
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw std::invalid_argument("exponential weights: reward outside [0,1]: " + std::to_string(reward));
  }
}

}  // namespace detail

/// EXP3: only the played weight moves, by exp(gamma * (r / p_played) / n).
inline void update(Exp3State& state, ArmId played, double reward) {
  const std::size_t n = state.size();
  detail::check_update_args(n, played, reward);
  const double p = probabilities(state)[played.value()];
  const double estimate = reward / p;
  state.weights[played.value()] *= std::exp(state.params.gamma * estimate / static_cast<double>(n));
  detail::renormalize_if_large(state);
}

/// EXP3.P: every weight moves by exp(eta * (r * 1{played} + beta) / p_i).
inline void update(Exp3PState& state, ArmId played, double reward) {
  const std::size_t n = state.size();
  detail::check_update_args(n, played, reward);
  const auto p = probabilities(state);
  for (std::size_t i = 0; i < n; ++i) {
    const double gain = (i == played.value() ? reward : 0.0) + state.params.beta;
    state.weights[i] *= std::exp(state.params.eta * gain / p[i]);
  }
  detail::renormalize_if_large(state);
}

/// EXP3.S: EXP3's factor on the played weight plus a fixed share
/// (e * alpha / n) * W of the pre-update total on every weight.
inline void update(Exp3SState& state, ArmId played, double reward) {
  const std::size_t n = state.size();
  detail::check_update_args(n, played, reward);
  const auto p = probabilities(state);
  double total = 0.0;
  for (double w : state.weights) total += w;
  const double share = std::numbers::e * state.params.alpha / static_cast<double>(n) * total;
  const double estimate = reward / p[played.value()];
  for (std::size_t i = 0; i < n; ++i) {
    const double factor = i == played.value()
                              ? std::exp(state.params.gamma * estimate / static_cast<double>(n))
                              : 1.0;
    state.weights[i] = state.weights[i] * factor + share;
  }
  detail::renormalize_if_large(state);
}

// -- default parameter choices -------------------------------------------------

namespace detail {

inline void check_count_horizon(std::size_t n, double horizon, const char* who) {
  if (n < 2) throw std::invalid_argument(std::string(who) + ": action count must be at least 2");
  if (!(horizon >= 1.0)) throw std::invalid_argument(std::string(who) + ": horizon must be at least 1");
}

inline double clamp_gamma(double g) { return std::min(1.0, g); }

}  // namespace detail

/// gamma = min(1, sqrt(n ln n / (2 horizon))).
inline double exp3_default_gamma(std::size_t n, double horizon) {
  detail::check_count_horizon(n, horizon, "exp3_default_gamma");
  const double nn = static_cast<double>(n);
  return detail::clamp_gamma(std::sqrt(nn * std::log(nn) / (2.0 * horizon)));
}

/// High-probability choice for confidence 1 - delta0.
inline Exp3PParams exp3p_default_params(std::size_t n, double horizon, double delta0) {
  detail::check_count_horizon(n, horizon, "exp3p_default_params");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw std::invalid_argument("exp3p_default_params: delta0 must lie in (0,1)");
  const double nn = static_cast<double>(n);
  Exp3PParams p;
  p.beta = std::sqrt(std::log(nn / delta0) / (nn * horizon));
  p.eta = 0.95 * std::sqrt(std::log(nn) / (nn * horizon));
  p.gamma = detail::clamp_gamma(1.05 * std::sqrt(nn * std::log(nn) / horizon));
  return p;
}

/// Tracking choice for benchmark sequences of hardness at most V.
inline Exp3SParams exp3s_default_params(std::size_t n, double horizon, double hardness_bound) {
  detail::check_count_horizon(n, horizon, "exp3s_default_params");
  if (!(hardness_bound >= 1.0)) throw std::invalid_argument("exp3s_default_params: V must be at least 1");
  const double nn = static_cast<double>(n);
  Exp3SParams p;
  p.gamma = detail::clamp_gamma(std::sqrt(nn * hardness_bound * std::log(nn * horizon) / horizon));
  p.alpha = 1.0 / horizon;
  return p;
}

// -- type-erased routine ------------------------------------------------------

enum class RoutineKind { Exp3, Exp3P, Exp3S };

inline const char* to_string(RoutineKind k) {
  switch (k) {
    case RoutineKind::Exp3: return "exp3";
    case RoutineKind::Exp3P: return "exp3p";
    case RoutineKind::Exp3S: return "exp3s";
  }
  return "?";
}

/// Kind plus every parameter any of the three routines reads.
struct RoutineSpec {
  RoutineKind kind = RoutineKind::Exp3;
  double gamma = 1.0;
  double eta = 0.0;
  double beta = 0.0;
  double alpha = 0.0;

  static RoutineSpec exp3(double gamma) { return {RoutineKind::Exp3, gamma, 0.0, 0.0, 0.0}; }
  static RoutineSpec exp3p(Exp3PParams p) { return {RoutineKind::Exp3P, p.gamma, p.eta, p.beta, 0.0}; }
  static RoutineSpec exp3s(Exp3SParams p) { return {RoutineKind::Exp3S, p.gamma, 0.0, 0.0, p.alpha}; }

  friend bool operator==(const RoutineSpec&, const RoutineSpec&) = default;
};

/// One of the three routines over n actions, with the last sampling
/// distribution cached between draw and update.
class ExpWeightsRoutine {
 public:
  ExpWeightsRoutine(const RoutineSpec& spec, std::size_t n) : state_(make_state(spec, n)) {}

  std::size_t size() const {
    return std::visit([](const auto& s) { return s.size(); }, state_);
  }

  std::vector<double> probabilities() const {
    return std::visit([](const auto& s) { return hlmc::probabilities(s); }, state_);
  }

  /// Draws an action with one uniform from `rng`.
  std::size_t draw(RngStream& rng) {
    const auto p = probabilities();
    return sample_index(p, rng.uniform());
  }

  void update(std::size_t played, double reward) {
    std::visit([&](auto& s) { hlmc::update(s, ArmId(played), reward); }, state_);
  }

  std::span<const double> weights() const {
    return std::visit([](const auto& s) { return std::span<const double>(s.weights); }, state_);
  }

 private:
  using State = std::variant<Exp3State, Exp3PState, Exp3SState>;

  static State make_state(const RoutineSpec& spec, std::size_t n) {
    switch (spec.kind) {
      case RoutineKind::Exp3: return Exp3State(n, Exp3Params{spec.gamma});
      case RoutineKind::Exp3P: return Exp3PState(n, Exp3PParams{spec.eta, spec.gamma, spec.beta});
      case RoutineKind::Exp3S: return Exp3SState(n, Exp3SParams{spec.gamma, spec.alpha});
    }
    throw std::invalid_argument("unknown routine kind");
  }

  State state_;
};

/// Standalone memory-unconstrained routine over all K arms; n words.
class FlatPolicy final : public Policy {
 public:
  FlatPolicy(const RoutineSpec& spec, std::size_t arms, MemoryLedger& ledger)
      : ledger_(&ledger), lease_(ledger, static_cast<std::int64_t>(arms)), routine_(spec, arms) {}

  ArmId select(Step t, RngStream& rng) override {
    if (t != last_ + 1) throw ContractViolation("FlatPolicy: expected step " + std::to_string(last_ + 1));
    pending_ = routine_.draw(rng);
    return ArmId(pending_);
  }

  void observe(ArmId arm, double reward, Step t) override {
    if (t != last_ + 1 || arm.value() != pending_) {
      throw ContractViolation("FlatPolicy: observe does not match the preceding select");
    }
    routine_.update(arm.value(), reward);
    last_ = t;
  }

  Footprint footprint() const override { return {static_cast<std::int64_t>(routine_.size()), true}; }
  const MemoryLedger& ledger() const override { return *ledger_; }

  const ExpWeightsRoutine& routine() const { return routine_; }

 private:
  MemoryLedger* ledger_;
  LedgerLease lease_;
  ExpWeightsRoutine routine_;
  std::size_t pending_ = 0;
  Step last_ = 0;
};

}  // namespace hlmc
