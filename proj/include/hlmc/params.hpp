#pragma once

// Closed-form parameter choices for two- and three-level HLMC.
//
// Horizon-type quantities (epoch length, epoch counts) are rounded up with
// ceil_count; all learning rates are clamped to at most 1. A level that
// selects among a single unit gets gamma = 1, which makes its (trivial)
// distribution well defined without touching ln(1) = 0.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/exp_weights.hpp"
#include "hlmc/hierarchy.hpp"

namespace hlmc {

/// Two-level tuple shared by every weak/shifting parameterization.
struct TwoLevelParams {
  std::size_t group_size = 0;   // N: arms per group
  std::size_t group_count = 0;  // L: groups
  Step epoch_length = 0;        // Delta
  Step epochs = 0;              // S = ceil(T / Delta)
  RoutineSpec group;            // level-1 routine
  RoutineSpec arm;              // level-2 routine
  bool in_regime = true;        // false when the bound's assumptions fail (T < V K)
};

struct ThreeLevelParams {
  std::vector<std::size_t> sizes;  // (N_1, N_2, N_3)
  std::vector<Step> lengths;       // (S_1, S_2, S_3), product >= T
  std::vector<double> gammas;      // (gamma_1, gamma_2, gamma_3)
};

namespace detail {

inline double n_ln_n(std::size_t n) {
  const double x = static_cast<double>(n);
  return x * std::log(x);
}

/// sqrt(n ln n / (2 h)) clamped, or 1 for a single-unit level.
inline double exp3_level_gamma(std::size_t n, double horizon) {
  if (n < 2) return 1.0;
  return std::min(1.0, std::sqrt(n_ln_n(n) / (2.0 * horizon)));
}

inline void check_partition_args(Step horizon, std::size_t arms, const char* who) {
  if (horizon < 1) throw std::invalid_argument(std::string(who) + ": horizon must be at least 1");
  if (arms < 4) throw std::invalid_argument(std::string(who) + ": need K >= 4 so that N, L >= 2");
}

inline Step clamp_epoch(double raw, Step horizon) {
  return std::clamp<Step>(ceil_count(raw), 1, horizon);
}

inline std::size_t sqrt_group_size(std::size_t arms) { return ceil_root(arms, 2); }

}  // namespace detail

/// Expected weak regret, EXP3 at both levels, groups of `group_size` arms.
inline TwoLevelParams params_weak_expected(Step horizon, std::size_t arms, std::size_t group_size) {
  if (horizon < 1) throw std::invalid_argument("params_weak_expected: horizon must be at least 1");
  if (group_size < 1 || group_size > arms) throw std::invalid_argument("params_weak_expected: bad group size");
  TwoLevelParams p;
  p.group_size = group_size;
  p.group_count = (arms + group_size - 1) / group_size;
  if (p.group_count < 2) throw std::invalid_argument("params_weak_expected: need at least two groups");
  const double t = static_cast<double>(horizon);
  // N ln N / (L ln L) is formed first so equal N and L give exactly T.
  p.epoch_length = detail::clamp_epoch(std::sqrt(t * (detail::n_ln_n(p.group_size) / detail::n_ln_n(p.group_count))), horizon);
  p.epochs = (horizon + p.epoch_length - 1) / p.epoch_length;
  p.group = RoutineSpec::exp3(detail::exp3_level_gamma(p.group_count, static_cast<double>(p.epochs)));
  p.arm = RoutineSpec::exp3(detail::exp3_level_gamma(p.group_size, static_cast<double>(p.epoch_length)));
  return p;
}

/// Expected weak regret with N = ceil(sqrt K), L = ceil(K / N).
inline TwoLevelParams params_weak_expected(Step horizon, std::size_t arms) {
  detail::check_partition_args(horizon, arms, "params_weak_expected");
  return params_weak_expected(horizon, arms, detail::sqrt_group_size(arms));
}

/// High-probability weak regret, EXP3.P at both levels.
inline TwoLevelParams params_weak_highprob(Step horizon, std::size_t arms, double delta) {
  detail::check_partition_args(horizon, arms, "params_weak_highprob");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("params_weak_highprob: delta must lie in (0,1)");
  TwoLevelParams p;
  p.group_size = detail::sqrt_group_size(arms);
  p.group_count = (arms + p.group_size - 1) / p.group_size;
  const double t = static_cast<double>(horizon);
  const double n = static_cast<double>(p.group_size);
  const double l = static_cast<double>(p.group_count);
  const double k = static_cast<double>(arms);
  p.epoch_length = detail::clamp_epoch(std::sqrt(t * n * std::log(2.0 * k * t / delta) / (l * std::log(2.0 * l / delta))), horizon);
  p.epochs = (horizon + p.epoch_length - 1) / p.epoch_length;
  const double s = static_cast<double>(p.epochs);
  const double d = static_cast<double>(p.epoch_length);

  Exp3PParams g;
  g.beta = std::sqrt(std::log(2.0 * l / delta) / (l * s));
  g.eta = 0.95 * std::sqrt(std::log(l) / (l * s));
  g.gamma = std::min(1.0, 1.05 * std::sqrt(l * std::log(l) / s));
  Exp3PParams a;
  a.beta = std::sqrt(std::log(2.0 * k * s / delta) / (n * d));
  a.eta = 0.95 * std::sqrt(std::log(n) / (n * d));
  a.gamma = std::min(1.0, 1.05 * std::sqrt(n * std::log(n) / d));
  p.group = RoutineSpec::exp3p(g);
  p.arm = RoutineSpec::exp3p(a);
  return p;
}

namespace detail {

inline TwoLevelParams shifting_params(Step horizon, std::size_t arms, double hardness_bound, const char* who) {
  check_partition_args(horizon, arms, who);
  if (!(hardness_bound >= 1.0)) throw std::invalid_argument(std::string(who) + ": V must be at least 1");
  TwoLevelParams p;
  p.group_size = sqrt_group_size(arms);
  p.group_count = (arms + p.group_size - 1) / p.group_size;
  const double t = static_cast<double>(horizon);
  const double l = static_cast<double>(p.group_count);
  p.epoch_length = clamp_epoch(std::sqrt(t * n_ln_n(p.group_size) / (hardness_bound * l * std::log(t * l))), horizon);
  p.epochs = (horizon + p.epoch_length - 1) / p.epoch_length;
  const double s = static_cast<double>(p.epochs);
  Exp3SParams g;
  g.gamma = std::min(1.0, std::sqrt(hardness_bound * l * std::log(l * s) / s));
  g.alpha = 1.0 / s;
  p.group = RoutineSpec::exp3s(g);
  p.arm = RoutineSpec::exp3(exp3_level_gamma(p.group_size, static_cast<double>(p.epoch_length)));
  return p;
}

}  // namespace detail

/// Expected shifting regret with known hardness V: EXP3.S groups, EXP3 arms.
/// `in_regime` is false when T < V K (the bound is then not guaranteed).
inline TwoLevelParams params_shifting(Step horizon, std::size_t arms, double hardness_bound) {
  auto p = detail::shifting_params(horizon, arms, hardness_bound, "params_shifting");
  p.in_regime = static_cast<double>(horizon) >= hardness_bound * static_cast<double>(arms);
  return p;
}

/// Shifting regret with V unknown: the known-V choice with V set to 1.
inline TwoLevelParams params_shifting_unknown_v(Step horizon, std::size_t arms) {
  return detail::shifting_params(horizon, arms, 1.0, "params_shifting_unknown_v");
}

/// Three-level hierarchy with EXP3 everywhere.
///
/// S_i = ceil(T^{1/3} x_i^{2/3} / (prod_{j != i} x_j)^{1/3}) with
/// x_i = N_i ln N_i, which simplifies to ceil(x_i * cbrt(T / prod_j x_j)).
/// If the rounded product still falls short of T, S_3 grows until it covers.
inline ThreeLevelParams params_threelevel(Step horizon, std::size_t arms) {
  if (horizon < 1) throw std::invalid_argument("params_threelevel: horizon must be at least 1");
  if (arms < 8) throw std::invalid_argument("params_threelevel: need K >= 8");
  ThreeLevelParams p;
  const std::size_t outer = ceil_root(arms, 3);
  const std::size_t inner = (arms + outer * outer - 1) / (outer * outer);
  p.sizes = {outer, outer, inner};
  for (auto n : p.sizes) {
    if (n < 2) {
      throw std::invalid_argument("params_threelevel: K=" + std::to_string(arms) +
                                  " leaves a level with a single unit");
    }
  }
  double product = 1.0;
  for (auto n : p.sizes) product *= detail::n_ln_n(n);
  const double scale = std::cbrt(static_cast<double>(horizon) / product);
  p.lengths.resize(3);
  for (std::size_t i = 0; i < 3; ++i) p.lengths[i] = std::max<Step>(1, ceil_count(detail::n_ln_n(p.sizes[i]) * scale));
  while (p.lengths[0] * p.lengths[1] * p.lengths[2] < horizon) ++p.lengths[2];
  p.gammas.resize(3);
  for (std::size_t i = 0; i < 3; ++i) {
    p.gammas[i] = detail::exp3_level_gamma(p.sizes[i], static_cast<double>(p.lengths[i]));
  }
  return p;
}

}  // namespace hlmc
