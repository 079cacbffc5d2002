#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/core.hpp"

namespace hlmc {

/// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Closed step interval [first, last] inside [1, T].
struct StepInterval {
  Step first = 1;
  Step last = 1;

  Step length() const { return last - first + 1; }
  friend bool operator==(const StepInterval&, const StepInterval&) = default;
};

/// Contiguous groups of `group_size` over [0, count); only the last may be short.
inline std::vector<IndexRange> partition_arms(std::size_t count, std::size_t group_size) {
  if (group_size < 1) throw std::invalid_argument("partition_arms: group size must be at least 1");
  if (count < 1) throw std::invalid_argument("partition_arms: need at least one arm");
  std::vector<IndexRange> groups;
  groups.reserve((count + group_size - 1) / group_size);
  for (std::size_t b = 0; b < count; b += group_size) {
    groups.push_back({b, std::min(b + group_size, count)});
  }
  return groups;
}

/// Epochs [1 + D(s-1), min(D s, T)] tiling [1, T].
inline std::vector<StepInterval> partition_time(Step horizon, Step epoch_length) {
  if (epoch_length < 1) throw std::invalid_argument("partition_time: epoch length must be at least 1");
  if (horizon < 1) throw std::invalid_argument("partition_time: horizon must be at least 1");
  std::vector<StepInterval> epochs;
  epochs.reserve(static_cast<std::size_t>((horizon + epoch_length - 1) / epoch_length));
  for (Step first = 1; first <= horizon; first += epoch_length) {
    epochs.push_back({first, std::min(first + epoch_length - 1, horizon)});
  }
  return epochs;
}

/// Smallest n >= 1 with n^degree >= value, computed in integers.
inline std::size_t ceil_root(std::size_t value, unsigned degree) {
  if (degree == 0) throw std::invalid_argument("ceil_root: degree must be positive");
  if (value <= 1) return 1;
  auto reaches = [&](std::size_t n) {
    std::size_t acc = 1;
    for (unsigned i = 0; i < degree; ++i) {
      if (acc > value / n) return true;  // acc * n would exceed value
      acc *= n;
      if (acc >= value) return true;
    }
    return false;
  };
  auto guess = static_cast<std::size_t>(std::pow(static_cast<double>(value), 1.0 / degree));
  if (guess < 1) guess = 1;
  while (guess > 1 && reaches(guess - 1)) --guess;
  while (!reaches(guess)) ++guess;
  return guess;
}

/// Smallest integer >= v, treating values within a relative 1e-9 of an
/// integer as that integer so closed-form ratios that are exact in real
/// arithmetic do not round up through floating-point noise.
inline std::int64_t ceil_count(double v) {
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(v));
}

/// Ceiling of log2(k), with ceil_log2(1) == 0.
inline unsigned ceil_log2(std::size_t k) {
  unsigned d = 0;
  std::size_t span = 1;
  while (span < k) {
    span <<= 1;
    ++d;
  }
  return d;
}

/// D-level nested partition of K arms.
///
/// Level 1 is the outermost (group) level and level D selects individual
/// arms. Units at level D are arms; level-d units are grouped N_d at a time
/// into level-(d-1) units, contiguous, last group possibly short. The root
/// (level 0) must hold every level-1 unit, so the stored level widths are the
/// realized maximum group sizes and the level-1 width is the number of
/// level-1 units.
class Hierarchy {
 public:
  Hierarchy(std::size_t arms, std::vector<std::size_t> level_sizes) : arms_(arms) {
    if (arms < 1) throw std::invalid_argument("Hierarchy: need at least one arm");
    if (level_sizes.empty()) throw std::invalid_argument("Hierarchy: need at least one level");
    const std::size_t depth = level_sizes.size();
    if (depth > std::max(1u, ceil_log2(arms))) {
      throw std::invalid_argument("Hierarchy: depth " + std::to_string(depth) + " exceeds ceil(log2 K) for K=" +
                                  std::to_string(arms));
    }
    for (auto n : level_sizes) {
      if (n < 1) throw std::invalid_argument("Hierarchy: level sizes must be positive");
    }
    unit_counts_.assign(depth + 1, 0);
    unit_counts_[depth] = arms;
    for (std::size_t d = depth; d >= 2; --d) {
      unit_counts_[d - 1] = (unit_counts_[d] + level_sizes[d - 1] - 1) / level_sizes[d - 1];
    }
    if (unit_counts_[1] > level_sizes[0]) {
      throw std::invalid_argument("Hierarchy: product of level sizes " + describe(level_sizes) +
                                  " does not cover " + std::to_string(arms) + " arms");
    }
    unit_counts_[0] = 1;
    widths_.resize(depth);
    widths_[0] = unit_counts_[1];
    for (std::size_t d = 2; d <= depth; ++d) widths_[d - 1] = std::min(level_sizes[d - 1], unit_counts_[d]);
  }

  /// Uniform sizes ceil(K^{1/D}) at every level.
  static Hierarchy uniform(std::size_t arms, unsigned depth) {
    return Hierarchy(arms, std::vector<std::size_t>(depth, ceil_root(arms, depth)));
  }

  /// Two-level hierarchy with groups of `group_size` arms.
  static Hierarchy two_level(std::size_t arms, std::size_t group_size) {
    return Hierarchy(arms, {(arms + group_size - 1) / group_size, group_size});
  }

  std::size_t arms() const { return arms_; }
  std::size_t depth() const { return widths_.size(); }

  /// Realized width N_d of level d (1-based): the largest number of
  /// subunits any level-(d-1) unit owns.
  std::size_t width(std::size_t level) const { return widths_.at(level - 1); }
  const std::vector<std::size_t>& widths() const { return widths_; }

  /// Number of units at level d (level 0 is the root, level D the arms).
  std::size_t unit_count(std::size_t level) const { return unit_counts_.at(level); }

  /// Level-d children of level-(d-1) unit `parent`.
  IndexRange children(std::size_t level, std::size_t parent) const {
    if (level < 1 || level > depth()) throw std::out_of_range("Hierarchy::children: bad level");
    const std::size_t stride = level == 1 ? unit_counts_[1] : widths_[level - 1];
    const std::size_t begin = parent * stride;
    if (begin >= unit_counts_[level]) throw std::out_of_range("Hierarchy::children: bad parent");
    return {begin, std::min(begin + stride, unit_counts_[level])};
  }

  /// Arms covered by level-d unit `unit`.
  IndexRange arms_of(std::size_t level, std::size_t unit) const {
    IndexRange r{unit, unit + 1};
    for (std::size_t d = level + 1; d <= depth(); ++d) {
      const std::size_t first = children(d, r.begin).begin;
      const std::size_t last = children(d, r.end - 1).end;
      r = {first, last};
    }
    return r;
  }

  friend bool operator==(const Hierarchy&, const Hierarchy&) = default;

 private:
  static std::string describe(const std::vector<std::size_t>& sizes) {
    std::string s = "(";
    for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
    return s + ")";
  }

  std::size_t arms_;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> unit_counts_;
};

/// Words held while every level keeps one live state: sum of level widths.
inline std::int64_t memory_footprint(const Hierarchy& h) {
  return std::accumulate(h.widths().begin(), h.widths().end(), std::int64_t{0},
                         [](std::int64_t a, std::size_t b) { return a + static_cast<std::int64_t>(b); });
}

/// Nested time partition: level-d intervals have length prod_{j>d} S_j, so
/// level D advances every step and level 1 intervals are the epochs.
class EpochSchedule {
 public:
  EpochSchedule(Step horizon, std::vector<Step> level_counts) : horizon_(horizon), counts_(std::move(level_counts)) {
    if (horizon < 1) throw std::invalid_argument("EpochSchedule: horizon must be at least 1");
    if (counts_.empty()) throw std::invalid_argument("EpochSchedule: need at least one level");
    for (Step s : counts_) {
      if (s < 1) throw std::invalid_argument("EpochSchedule: level lengths must be positive");
    }
    lengths_.assign(counts_.size(), 1);
    for (std::size_t d = counts_.size() - 1; d-- > 0;) {
      lengths_[d] = saturating_mul(lengths_[d + 1], counts_[d + 1]);
    }
    if (saturating_mul(lengths_[0], counts_[0]) < horizon) {
      throw std::invalid_argument("EpochSchedule: product of level lengths does not cover the horizon");
    }
  }

  /// Two-level schedule with epochs of `epoch_length` steps.
  static EpochSchedule two_level(Step horizon, Step epoch_length) {
    return EpochSchedule(horizon, {(horizon + epoch_length - 1) / epoch_length, epoch_length});
  }

  Step horizon() const { return horizon_; }
  std::size_t depth() const { return counts_.size(); }

  /// S_d: level-d intervals per level-(d-1) interval.
  Step count(std::size_t level) const { return counts_.at(level - 1); }
  const std::vector<Step>& counts() const { return counts_; }

  /// Steps in one full level-d interval.
  Step interval_length(std::size_t level) const { return lengths_.at(level - 1); }

  bool starts_interval(std::size_t level, Step t) const { return (t - 1) % interval_length(level) == 0; }
  bool ends_interval(std::size_t level, Step t) const { return t % interval_length(level) == 0 || t == horizon_; }

  /// All level-d intervals, truncated at the horizon.
  std::vector<StepInterval> intervals(std::size_t level) const { return partition_time(horizon_, interval_length(level)); }

  friend bool operator==(const EpochSchedule&, const EpochSchedule&) = default;

 private:
  static Step saturating_mul(Step a, Step b) {
    constexpr Step cap = std::numeric_limits<Step>::max() / 2;
    if (a != 0 && b > cap / a) return cap;
    return a * b;
  }

  Step horizon_;
  std::vector<Step> counts_;
  std::vector<Step> lengths_;
};

/// D*(M) = min{D : D * ceil(K^{1/D}) <= M}, searched up to ceil(log2 K).
inline unsigned min_depth(std::int64_t budget, std::size_t arms) {
  if (arms < 1) throw std::invalid_argument("min_depth: need at least one arm");
  const unsigned max_depth = std::max(1u, ceil_log2(arms));
  for (unsigned d = 1; d <= max_depth; ++d) {
    if (static_cast<std::int64_t>(d * ceil_root(arms, d)) <= budget) return d;
  }
  throw InfeasibleBudget("min_depth: no hierarchy over " + std::to_string(arms) + " arms fits in " +
                         std::to_string(budget) + " words");
}

struct TwoLevelPartition {
  std::size_t group_size = 0;   // N
  std::size_t group_count = 0;  // L
};

/// Budget-adaptive two-level partition N = ceil((M - sqrt(M^2 - 4K)) / 2).
inline TwoLevelPartition adaptive_two_level(std::int64_t budget, std::size_t arms) {
  const double m = static_cast<double>(budget);
  const double k = static_cast<double>(arms);
  if (arms < 1 || m * m < 4.0 * k) {
    throw InfeasibleBudget("adaptive_two_level: budget " + std::to_string(budget) + " is below 2*sqrt(K) for K=" +
                           std::to_string(arms));
  }
  auto n = static_cast<std::size_t>(std::max<std::int64_t>(1, ceil_count((m - std::sqrt(m * m - 4.0 * k)) / 2.0)));
  TwoLevelPartition p{n, (arms + n - 1) / n};
  if (static_cast<std::int64_t>(p.group_size + p.group_count) > budget) {
    throw InfeasibleBudget("adaptive_two_level: partition N+L exceeds the budget");
  }
  return p;
}

}  // namespace hlmc
