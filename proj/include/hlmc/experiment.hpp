#pragma once

// Monte Carlo experiment runner: one adversary, several named policies,
// R replications each, regret curves aggregated at checkpoints.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hlmc/adversaries.hpp"
#include "hlmc/core.hpp"
#include "hlmc/oracles.hpp"
#include "hlmc/policy_factory.hpp"

namespace hlmc {

enum class AdversaryKind { SubphaseCycler, BlinkingArm, ShiftingPhases, Bernoulli };

inline const char* to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::SubphaseCycler: return "subphase_cycler";
    case AdversaryKind::BlinkingArm: return "blinking_arm";
    case AdversaryKind::ShiftingPhases: return "shifting_phases";
    case AdversaryKind::Bernoulli: return "bernoulli";
  }
  return "?";
}

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::SubphaseCycler;
  std::size_t arms = 100;
  std::size_t budget = 20;       // M of the phase grid (cycler, blinking)
  double epsilon = 1e-4;         // blinking
  std::size_t group_size = 0;    // N for shifting phases; 0 means ceil(sqrt K)
  std::int64_t phases = 10;      // V for shifting phases
  std::vector<double> means;     // bernoulli; arms is taken from its size
};

/// `seed` only matters for adversaries that draw randomness (they use stream 0).
inline std::unique_ptr<RewardModel> make_adversary(const AdversarySpec& spec, Step horizon, std::uint64_t seed) {
  switch (spec.kind) {
    case AdversaryKind::SubphaseCycler: return std::make_unique<SubphaseCycler>(spec.arms, spec.budget, horizon);
    case AdversaryKind::BlinkingArm:
      return std::make_unique<BlinkingArm>(spec.arms, spec.budget, horizon, spec.epsilon);
    case AdversaryKind::ShiftingPhases: {
      const std::size_t n = spec.group_size > 0 ? spec.group_size : ceil_root(spec.arms, 2);
      return std::make_unique<ShiftingPhases>(spec.arms, n, spec.phases, horizon);
    }
    case AdversaryKind::Bernoulli: return std::make_unique<BernoulliRewards>(spec.means, horizon, seed);
  }
  throw std::logic_error("make_adversary: unhandled kind");
}

struct RegretNotion {
  bool shifting = false;
  std::int64_t hardness = 1;  // V for the shifting benchmark
};

struct ExperimentConfig {
  AdversarySpec adversary;
  std::vector<PolicySpec> policies;
  Step horizon = 100000;
  int replications = 10;
  std::uint64_t seed = 1;
  RegretNotion regret;
  std::vector<Step> checkpoints;  // empty: default_checkpoints(T)
  unsigned threads = 0;           // 0: hardware concurrency
  std::string out;                // CSV path; empty means stdout
};

struct RegretPoint {
  Step t = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct RegretCurve {
  std::string policy;
  std::vector<RegretPoint> points;
  std::vector<double> final_regret;  // per replication, in replication order
  std::int64_t peak_words = 0;       // max over replications
  Footprint footprint;

  double final_mean() const { return points.empty() ? 0.0 : points.back().mean; }
};

struct ExperimentResult {
  std::vector<Step> checkpoints;
  std::vector<double> benchmark;  // best comparator reward at each checkpoint
  std::vector<RegretCurve> curves;
};

/// Mean and sample standard deviation (n - 1); the deviation is 0 for n = 1.
inline std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

/// Runs fn(0..count-1) on up to `threads` workers. The first exception thrown
/// by any task is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

inline void validate(const ExperimentConfig& c) {
  if (c.horizon < 1) throw std::invalid_argument("T must be at least 1");
  if (c.replications < 1) throw std::invalid_argument("runs must be at least 1");
  if (c.policies.empty()) throw std::invalid_argument("no policies configured");
  if (c.regret.hardness < 1) throw std::invalid_argument("regret V must be at least 1");
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    const auto& name = c.policies[i].name;
    if (name.empty()) throw std::invalid_argument("policy names must be non-empty");
    if (name.find_first_of(",\"\n\r") != std::string::npos) {
      throw std::invalid_argument("policy name '" + name + "' contains a CSV metacharacter");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (c.policies[j].name == name) throw std::invalid_argument("duplicate policy name '" + name + "'");
    }
  }
}

/// Replication r of every policy uses RNG stream r + 1 of the root seed;
/// stream 0 is reserved for the adversary. Results are reduced in
/// replication order, so the thread count never changes the output.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const Step horizon = config.horizon;
  const auto model = make_adversary(config.adversary, horizon, config.seed);
  const std::size_t arms = model->arms();

  ExperimentResult result;
  result.checkpoints = config.checkpoints.empty() ? default_checkpoints(horizon) : config.checkpoints;
  result.benchmark = config.regret.shifting
                         ? shifting_benchmark(*model, config.regret.hardness, result.checkpoints)
                         : weak_benchmark(*model, result.checkpoints);

  const auto reps = static_cast<std::size_t>(config.replications);
  for (const auto& spec : config.policies) {
    // Declared footprint is checked against M before any replication runs.
    {
      MemoryLedger probe(std::numeric_limits<std::int64_t>::max());
      const auto p = make_policy(spec, arms, horizon, probe);
      if (!spec.doubling && spec.budget > 0 && p->footprint().words > spec.budget) {
        throw BudgetViolation("policy '" + spec.name + "' declares " + std::to_string(p->footprint().words) +
                              " words but its budget is M=" + std::to_string(spec.budget));
      }
    }
    std::vector<std::vector<double>> regret(reps);
    std::vector<std::int64_t> peaks(reps, 0);
    std::vector<Footprint> claims(reps);
    parallel_for(reps, config.threads, [&](std::size_t r) {
      MemoryLedger ledger(ledger_budget(spec));
      RngStream rng(config.seed, r + 1);
      RunTrace trace;
      std::unique_ptr<Policy> policy;
      try {
        policy = make_policy(spec, arms, horizon, ledger);
        trace = play(*policy, *model, rng);
      } catch (const BudgetViolation& e) {
        throw BudgetViolation("policy '" + spec.name + "', replication " + std::to_string(r) + ": " + e.what());
      }
      audit_footprint(*policy);
      const auto got = policy_reward(trace, result.checkpoints);
      regret[r].resize(got.size());
      for (std::size_t i = 0; i < got.size(); ++i) regret[r][i] = result.benchmark[i] - got[i];
      peaks[r] = trace.peak_words;
      claims[r] = policy->footprint();
    });

    RegretCurve curve;
    curve.policy = spec.name;
    curve.footprint = claims.front();
    curve.peak_words = *std::max_element(peaks.begin(), peaks.end());
    std::vector<double> column(reps);
    for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
      for (std::size_t r = 0; r < reps; ++r) column[r] = regret[r][i];
      const auto [mean, sd] = mean_and_std(column);
      curve.points.push_back({result.checkpoints[i], mean, sd});
    }
    for (std::size_t r = 0; r < reps; ++r) curve.final_regret.push_back(regret[r].back());
    result.curves.push_back(std::move(curve));
  }
  return result;
}

/// %.9g rendering used for every float in CSV output.
inline std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_regret_csv(std::ostream& os, const ExperimentResult& result) {
  os << "t,policy,mean_regret,std_regret\n";
  for (const auto& curve : result.curves) {
    for (const auto& p : curve.points) {
      os << p.t << ',' << curve.policy << ',' << format_g9(p.mean) << ',' << format_g9(p.std) << '\n';
    }
  }
}

}  // namespace hlmc
