#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/core.hpp"

namespace hlmc {

/// 200 evenly spaced steps plus every power of two, sorted, always ending at T.
inline std::vector<Step> default_checkpoints(Step horizon, std::int64_t linear_points = 200, bool powers_of_two = true) {
  if (horizon < 1) throw std::invalid_argument("default_checkpoints: horizon must be at least 1");
  std::vector<Step> out;
  for (std::int64_t k = 1; k <= linear_points; ++k) {
    const Step t = (horizon * k) / linear_points;
    if (t >= 1) out.push_back(t);
  }
  if (powers_of_two) {
    for (Step t = 1; t <= horizon; t *= 2) out.push_back(t);
  }
  out.push_back(horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

inline void check_checkpoints(const std::vector<Step>& checkpoints, Step horizon) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > horizon || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw std::invalid_argument("checkpoints must be strictly increasing within [1, T]");
    }
  }
}

}  // namespace detail

/// Prefix best-arm totals max_i sum_{tau <= t} r_{i,tau} at each checkpoint.
inline std::vector<double> weak_benchmark(const RewardModel& model, const std::vector<Step>& checkpoints) {
  detail::check_checkpoints(checkpoints, model.horizon());
  std::vector<double> totals(model.arms(), 0.0);
  std::vector<double> column(model.arms());
  std::vector<double> out;
  out.reserve(checkpoints.size());
  std::size_t next = 0;
  for (Step t = 1; next < checkpoints.size(); ++t) {
    model.rewards_at(t, column);
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += column[i];
    if (t == checkpoints[next]) {
      out.push_back(*std::max_element(totals.begin(), totals.end()));
      ++next;
    }
  }
  return out;
}

/// Best cumulative reward over arm sequences of hardness at most V, at each
/// checkpoint, by dynamic programming over (step, arm, hardness):
///   f_v(t, i) = r_{i,t} + max(f_v(t-1, i), max_j f_{v-1}(t-1, j)).
/// The inner max over j is a single prefix maximum per v, so the cost is
/// O(T K V).
inline std::vector<double> shifting_benchmark(const RewardModel& model, std::int64_t hardness_bound,
                                              const std::vector<Step>& checkpoints) {
  if (hardness_bound < 1) throw std::invalid_argument("shifting_benchmark: V must be at least 1");
  detail::check_checkpoints(checkpoints, model.horizon());
  const std::size_t k = model.arms();
  const auto levels = static_cast<std::size_t>(hardness_bound);
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  // best[v][i]: best total ending on arm i using at most v+1 segments.
  std::vector<std::vector<double>> best(levels, std::vector<double>(k, 0.0));
  std::vector<double> column(k);
  std::vector<double> level_max(levels);
  std::vector<double> out;
  out.reserve(checkpoints.size());
  std::size_t next = 0;
  for (Step t = 1; next < checkpoints.size(); ++t) {
    model.rewards_at(t, column);
    if (t == 1) {
      for (auto& row : best) row = column;
    } else {
      for (std::size_t v = 0; v < levels; ++v) level_max[v] = *std::max_element(best[v].begin(), best[v].end());
      for (std::size_t v = levels; v-- > 0;) {
        const double switch_in = v == 0 ? kNone : level_max[v - 1];
        for (std::size_t i = 0; i < k; ++i) best[v][i] = column[i] + std::max(best[v][i], switch_in);
      }
    }
    if (t == checkpoints[next]) {
      out.push_back(*std::max_element(best.back().begin(), best.back().end()));
      ++next;
    }
  }
  return out;
}

/// Cumulative reward of the played arms at each checkpoint.
inline std::vector<double> policy_reward(const RunTrace& trace, const std::vector<Step>& checkpoints) {
  detail::check_checkpoints(checkpoints, static_cast<Step>(trace.plays.size()));
  std::vector<double> out;
  out.reserve(checkpoints.size());
  double total = 0.0;
  std::size_t next = 0;
  for (const auto& p : trace.plays) {
    total += p.reward;
    if (next < checkpoints.size() && p.t == checkpoints[next]) {
      out.push_back(total);
      ++next;
    }
  }
  return out;
}

/// Weak regret (prefix best fixed arm minus policy reward) at each checkpoint.
inline std::vector<double> weak_regret(const RunTrace& trace, const RewardModel& model,
                                       const std::vector<Step>& checkpoints) {
  const auto bench = weak_benchmark(model, checkpoints);
  const auto got = policy_reward(trace, checkpoints);
  std::vector<double> out(bench.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bench[i] - got[i];
  return out;
}

// -- theoretical bounds -------------------------------------------------------

enum class BoundKind { WeakExpected, WeakHighProb, Shifting, ShiftingUnknownV, ThreeLevel };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::WeakExpected: return "weak_expected";
    case BoundKind::WeakHighProb: return "weak_highprob";
    case BoundKind::Shifting: return "shifting";
    case BoundKind::ShiftingUnknownV: return "shifting_unknown_v";
    case BoundKind::ThreeLevel: return "three_level";
  }
  return "?";
}

inline BoundKind bound_kind_from_string(const std::string& s) {
  for (auto k : {BoundKind::WeakExpected, BoundKind::WeakHighProb, BoundKind::Shifting, BoundKind::ShiftingUnknownV,
                 BoundKind::ThreeLevel}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown bound kind '" + s + "'");
}

struct BoundArgs {
  double horizon = 1.0;
  double arms = 2.0;
  double hardness = 1.0;  // V
  double delta = 0.05;
};

/// Closed-form bound value; `in_regime` is false when the arguments fall
/// outside the regime the bound was proved for.
struct BoundValue {
  double value = 0.0;
  bool in_regime = true;
  std::string note;
};

inline BoundValue theoretical_bound(BoundKind kind, const BoundArgs& a) {
  BoundValue b;
  const double t = a.horizon;
  const double k = a.arms;
  const double v = a.hardness;
  auto flag = [&](const std::string& why) {
    b.in_regime = false;
    if (!b.note.empty()) b.note += "; ";
    b.note += why;
  };
  if (!(t >= 1.0)) flag("T < 1");
  if (!(k >= 2.0)) flag("K < 2");
  const double t34 = std::pow(t, 0.75);
  const double k14 = std::pow(k, 0.25);
  switch (kind) {
    case BoundKind::WeakExpected:
      b.value = (4.0 + 2.0 * std::numbers::sqrt2) * t34 * k14 * std::sqrt(std::log(k));
      break;
    case BoundKind::WeakHighProb:
      if (!(a.delta > 0.0 && a.delta < 1.0)) flag("delta outside (0,1)");
      b.value = 12.5 * t34 * k14 * std::sqrt(std::log(2.0 * k * t / a.delta));
      break;
    case BoundKind::Shifting:
      if (!(v >= 1.0)) flag("V < 1");
      if (t < v * k) flag("T < V K");
      b.value = (6.0 * std::numbers::sqrt2 + 1.0) * t34 * std::pow(v, 0.25) * k14 * std::sqrt(std::log(k * t));
      break;
    case BoundKind::ShiftingUnknownV:
      if (!(v >= 1.0)) flag("V < 1");
      b.value = std::numbers::sqrt2 * (v + 5.0) * t34 * k14 * std::sqrt(std::log(k * t));
      break;
    case BoundKind::ThreeLevel:
      if (k < 8.0) flag("K < 8");
      b.value = 12.0 * std::pow(t, 5.0 / 6.0) * std::pow(k, 1.0 / 6.0) * std::sqrt(std::log(k));
      break;
  }
  if (!std::isfinite(b.value)) flag("bound is not finite");
  return b;
}

}  // namespace hlmc
