#pragma once

// Named policy configurations and the factory that turns them into Policy
// instances bound to a ledger.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/baselines.hpp"
#include "hlmc/core.hpp"
#include "hlmc/doubling.hpp"
#include "hlmc/exp_weights.hpp"
#include "hlmc/hierarchy.hpp"
#include "hlmc/hlmc_policy.hpp"
#include "hlmc/params.hpp"

namespace hlmc {

enum class PolicyKind { Exp3, Exp3P, Exp3S, Hlmc, UcbM, Exp3M };

enum class HlmcParams { WeakExpected, WeakHighProb, Shifting, ShiftingUnknownV, ThreeLevel, Explicit };

/// How the two-level arm partition is chosen.
///   sqrt:      N = ceil(sqrt K)
///   adaptive:  N from the memory budget M
///   min_depth: smallest uniform depth that fits M (1, 2 or 3 supported)
enum class PartitionRule { Sqrt, Adaptive, MinDepth };

struct PolicySpec {
  std::string name;
  PolicyKind kind = PolicyKind::Exp3;
  std::int64_t budget = 0;  // M in words; 0 means "whatever the policy declares"

  // flat routines and HLMC parameter rules
  double delta = 0.05;
  double hardness = 1.0;          // V used for tuning
  std::optional<double> gamma;    // flat EXP3 override

  HlmcParams params = HlmcParams::WeakExpected;
  PartitionRule partition = PartitionRule::Sqrt;
  // HlmcParams::Explicit
  std::vector<std::size_t> level_sizes;
  std::vector<Step> level_lengths;
  std::vector<RoutineSpec> level_routines;

  ShuffleMode shuffle = ShuffleMode::Once;
  bool doubling = false;  // run with horizon-free stages 1, 2, 4, ...
};

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Exp3: return "exp3";
    case PolicyKind::Exp3P: return "exp3p";
    case PolicyKind::Exp3S: return "exp3s";
    case PolicyKind::Hlmc: return "hlmc";
    case PolicyKind::UcbM: return "ucbm";
    case PolicyKind::Exp3M: return "exp3m";
  }
  return "?";
}

inline const char* to_string(HlmcParams p) {
  switch (p) {
    case HlmcParams::WeakExpected: return "weak_expected";
    case HlmcParams::WeakHighProb: return "weak_highprob";
    case HlmcParams::Shifting: return "shifting";
    case HlmcParams::ShiftingUnknownV: return "shifting_unknown_v";
    case HlmcParams::ThreeLevel: return "three_level";
    case HlmcParams::Explicit: return "explicit";
  }
  return "?";
}

inline const char* to_string(PartitionRule p) {
  switch (p) {
    case PartitionRule::Sqrt: return "sqrt";
    case PartitionRule::Adaptive: return "adaptive";
    case PartitionRule::MinDepth: return "min_depth";
  }
  return "?";
}

/// Ledger budget for a spec: M if given, otherwise unlimited.
inline std::int64_t ledger_budget(const PolicySpec& spec) {
  return spec.budget > 0 ? spec.budget : std::numeric_limits<std::int64_t>::max();
}

/// HLMC configuration a spec resolves to for K arms and horizon T.
inline HlmcConfig resolve_hlmc_config(const PolicySpec& spec, std::size_t arms, Step horizon) {
  switch (spec.params) {
    case HlmcParams::WeakExpected:
      switch (spec.partition) {
        case PartitionRule::Sqrt: return make_two_level_config(arms, horizon, params_weak_expected(horizon, arms));
        case PartitionRule::Adaptive: {
          if (spec.budget <= 0) throw std::invalid_argument("adaptive partition needs a memory budget M");
          const auto part = adaptive_two_level(spec.budget, arms);
          return make_two_level_config(arms, horizon, params_weak_expected(horizon, arms, part.group_size));
        }
        case PartitionRule::MinDepth: {
          if (spec.budget <= 0) throw std::invalid_argument("min_depth partition needs a memory budget M");
          const unsigned depth = min_depth(spec.budget, arms);
          if (depth == 1) {
            return make_flat_config(arms, horizon, RoutineSpec::exp3(exp3_default_gamma(arms, static_cast<double>(horizon))));
          }
          if (depth == 2) return make_two_level_config(arms, horizon, params_weak_expected(horizon, arms));
          if (depth == 3) return make_three_level_config(arms, horizon, params_threelevel(horizon, arms));
          throw std::invalid_argument("min_depth partition: depth " + std::to_string(depth) +
                                      " has no closed-form parameters; use explicit levels");
        }
      }
      break;
    case HlmcParams::WeakHighProb:
      return make_two_level_config(arms, horizon, params_weak_highprob(horizon, arms, spec.delta));
    case HlmcParams::Shifting:
      return make_two_level_config(arms, horizon, params_shifting(horizon, arms, spec.hardness));
    case HlmcParams::ShiftingUnknownV:
      return make_two_level_config(arms, horizon, params_shifting_unknown_v(horizon, arms));
    case HlmcParams::ThreeLevel:
      return make_three_level_config(arms, horizon, params_threelevel(horizon, arms));
    case HlmcParams::Explicit:
      return HlmcConfig(Hierarchy(arms, spec.level_sizes), EpochSchedule(horizon, spec.level_lengths),
                        spec.level_routines);
  }
  throw std::logic_error("resolve_hlmc_config: unhandled parameter rule");
}

namespace detail {

inline std::unique_ptr<Policy> make_known_horizon_policy(const PolicySpec& spec, std::size_t arms, Step horizon,
                                                         MemoryLedger& ledger) {
  const double h = static_cast<double>(horizon);
  switch (spec.kind) {
    case PolicyKind::Exp3:
      return std::make_unique<FlatPolicy>(RoutineSpec::exp3(spec.gamma.value_or(exp3_default_gamma(arms, h))), arms,
                                          ledger);
    case PolicyKind::Exp3P:
      return std::make_unique<FlatPolicy>(RoutineSpec::exp3p(exp3p_default_params(arms, h, spec.delta)), arms, ledger);
    case PolicyKind::Exp3S:
      return std::make_unique<FlatPolicy>(RoutineSpec::exp3s(exp3s_default_params(arms, h, spec.hardness)), arms,
                                          ledger);
    case PolicyKind::Hlmc:
      return std::make_unique<HlmcPolicy>(resolve_hlmc_config(spec, arms, horizon), ledger);
    case PolicyKind::UcbM: {
      if (spec.budget < 2) throw std::invalid_argument("ucbm needs a memory budget M >= 2");
      return std::make_unique<UcbMPolicy>(arms, static_cast<std::size_t>(spec.budget), spec.shuffle, ledger);
    }
    case PolicyKind::Exp3M: {
      if (spec.budget < 2) throw std::invalid_argument("exp3m needs a memory budget M >= 2");
      return std::make_unique<Exp3MPolicy>(arms, static_cast<std::size_t>(spec.budget), spec.shuffle, ledger);
    }
  }
  throw std::logic_error("make_policy: unhandled kind");
}

}  // namespace detail

/// Builds the policy described by `spec` for K arms and horizon T. With
/// `doubling` set, the horizon is not passed to the policy; each stage gets a
/// fresh instance tuned for its own length.
inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::size_t arms, Step horizon,
                                           MemoryLedger& ledger) {
  if (!spec.doubling) return detail::make_known_horizon_policy(spec, arms, horizon, ledger);
  PolicySpec inner = spec;
  inner.doubling = false;
  return std::make_unique<DoublingPolicy>(
      [inner, arms](Step stage, MemoryLedger& l) { return detail::make_known_horizon_policy(inner, arms, stage, l); },
      ledger);
}

}  // namespace hlmc
