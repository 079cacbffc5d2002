#pragma once

// Multi-agent channel selection against a circulating jammer. Every agent
// runs its own policy instance with its own ledger and RNG stream; the
// payoff engine settles each round once all agents have chosen.

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlmc/core.hpp"
#include "hlmc/experiment.hpp"
#include "hlmc/oracles.hpp"
#include "hlmc/policy_factory.hpp"

namespace hlmc {

struct SpectrumConfig {
  std::size_t agents = 100;
  std::size_t channels = 20;
  std::int64_t budget = 10;  // M per agent
  Step horizon = 10000;
  Step jam_phase = 0;        // 0: max(1, T / (2K))
  double pool_value = 10.0;  // split among occupants of the unjammed channel
  double solo_value = 1.0;   // paid to a lone occupant of a jammed channel
  std::vector<PolicySpec> policies;  // one population per entry
  int replications = 5;
  std::uint64_t seed = 1;
  std::vector<Step> checkpoints;
  unsigned threads = 0;
  std::string out;

  Step effective_jam_phase() const {
    return jam_phase > 0 ? jam_phase : std::max<Step>(1, horizon / (2 * static_cast<Step>(channels)));
  }
};

/// All channels but one are jammed; the free channel advances by one every
/// `phase` steps, cycling through 0..K-1.
class JammerSchedule {
 public:
  JammerSchedule(std::size_t channels, Step phase) : channels_(channels), phase_(phase) {
    if (channels < 2) throw std::invalid_argument("JammerSchedule: need at least two channels");
    if (phase < 1) throw std::invalid_argument("JammerSchedule: phase length must be at least 1");
  }

  std::size_t channels() const { return channels_; }
  Step phase() const { return phase_; }
  std::size_t unjammed_channel(Step t) const {
    return static_cast<std::size_t>(((t - 1) / phase_) % static_cast<Step>(channels_));
  }

 private:
  std::size_t channels_;
  Step phase_;
};

/// Unscaled payoffs for one round. Occupants of the unjammed channel share
/// `pool` evenly; on a jammed channel a lone occupant gets `solo` and two or
/// more collide and get nothing.
inline std::vector<double> payoff_round(std::span<const ArmId> choices, Step t, const JammerSchedule& jammer,
                                        double pool = 10.0, double solo = 1.0) {
  std::vector<std::size_t> occupancy(jammer.channels(), 0);
  for (ArmId c : choices) {
    if (c.value() >= jammer.channels()) throw std::out_of_range("payoff_round: channel out of range");
    ++occupancy[c.value()];
  }
  const std::size_t free_channel = jammer.unjammed_channel(t);
  std::vector<double> out(choices.size());
  for (std::size_t a = 0; a < choices.size(); ++a) {
    const std::size_t c = choices[a].value();
    if (c == free_channel) {
      out[a] = pool / static_cast<double>(occupancy[c]);
    } else {
      out[a] = occupancy[c] == 1 ? solo : 0.0;
    }
  }
  return out;
}

struct SpectrumCurve {
  std::string policy;
  std::vector<RegretPoint> points;  // mean / std of per-agent average reward
  std::int64_t peak_words = 0;      // max over agents and replications
};

struct SpectrumResult {
  std::vector<Step> checkpoints;
  std::vector<SpectrumCurve> curves;
};

inline void validate(const SpectrumConfig& c) {
  if (c.agents < 1) throw std::invalid_argument("agents must be at least 1");
  if (c.channels < 2) throw std::invalid_argument("K must be at least 2");
  if (c.horizon < 1) throw std::invalid_argument("T must be at least 1");
  if (c.jam_phase < 0) throw std::invalid_argument("P must be at least 1");
  if (c.replications < 1) throw std::invalid_argument("runs must be at least 1");
  if (!(c.pool_value > 0.0)) throw std::invalid_argument("pool value must be positive");
  if (!(c.solo_value >= 0.0 && c.solo_value <= c.pool_value)) {
    throw std::invalid_argument("solo value must lie in [0, pool value]");
  }
  if (c.policies.empty()) throw std::invalid_argument("no policies configured");
  for (const auto& p : c.policies) {
    if (p.name.empty() || p.name.find_first_of(",\"\n\r") != std::string::npos) {
      throw std::invalid_argument("bad policy name '" + p.name + "'");
    }
  }
}

/// Agent a in replication r draws from stream (r << 32) | a. Policies see
/// rewards divided by the pool value; reported averages are unscaled.
/// The reported deviation pools all agents of all replications.
inline SpectrumResult run_spectrum(const SpectrumConfig& config) {
  validate(config);
  const JammerSchedule jammer(config.channels, config.effective_jam_phase());
  const Step horizon = config.horizon;
  SpectrumResult result;
  result.checkpoints = config.checkpoints.empty() ? default_checkpoints(horizon) : config.checkpoints;
  const auto& cps = result.checkpoints;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] < 1 || cps[i] > horizon || (i > 0 && cps[i] <= cps[i - 1])) {
      throw std::invalid_argument("checkpoints must be strictly increasing within [1, T]");
    }
  }
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t agents = config.agents;

  for (const auto& base : config.policies) {
    PolicySpec spec = base;
    if (spec.budget <= 0) spec.budget = config.budget;
    // averages[r][i * agents + a]: agent a's average reward at checkpoint i
    std::vector<std::vector<double>> averages(reps);
    std::vector<std::int64_t> peaks(reps, 0);
    parallel_for(reps, config.threads, [&](std::size_t r) {
      std::vector<std::unique_ptr<MemoryLedger>> ledgers;
      std::vector<std::unique_ptr<Policy>> pols;
      std::vector<RngStream> rngs;
      for (std::size_t a = 0; a < agents; ++a) {
        ledgers.push_back(std::make_unique<MemoryLedger>(ledger_budget(spec)));
        try {
          pols.push_back(make_policy(spec, config.channels, horizon, *ledgers.back()));
        } catch (const BudgetViolation& e) {
          throw BudgetViolation("policy '" + spec.name + "', agent " + std::to_string(a) + ": " + e.what());
        }
        rngs.emplace_back(config.seed, (static_cast<std::uint64_t>(r) << 32) | a);
      }
      std::vector<ArmId> choices(agents);
      std::vector<double> total(agents, 0.0);
      auto& out = averages[r];
      out.reserve(cps.size() * agents);
      std::size_t next = 0;
      for (Step t = 1; next < cps.size(); ++t) {
        try {
          for (std::size_t a = 0; a < agents; ++a) choices[a] = pols[a]->select(t, rngs[a]);
          const auto pay = payoff_round(choices, t, jammer, config.pool_value, config.solo_value);
          for (std::size_t a = 0; a < agents; ++a) {
            pols[a]->observe(choices[a], pay[a] / config.pool_value, t);
            total[a] += pay[a];
          }
        } catch (const BudgetViolation& e) {
          throw BudgetViolation("policy '" + spec.name + "', replication " + std::to_string(r) + ": " + e.what());
        }
        if (t == cps[next]) {
          for (std::size_t a = 0; a < agents; ++a) out.push_back(total[a] / static_cast<double>(t));
          ++next;
        }
      }
      for (const auto& p : pols) {
        audit_footprint(*p);
        peaks[r] = std::max(peaks[r], p->ledger().peak_words());
      }
    });

    SpectrumCurve curve;
    curve.policy = spec.name;
    curve.peak_words = *std::max_element(peaks.begin(), peaks.end());
    std::vector<double> pooled(reps * agents);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      for (std::size_t r = 0; r < reps; ++r) {
        for (std::size_t a = 0; a < agents; ++a) pooled[r * agents + a] = averages[r][i * agents + a];
      }
      const auto [mean, sd] = mean_and_std(pooled);
      curve.points.push_back({cps[i], mean, sd});
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumResult& result) {
  os << "t,policy,mean_avg_reward,std_avg_reward\n";
  for (const auto& curve : result.curves) {
    for (const auto& p : curve.points) {
      os << p.t << ',' << curve.policy << ',' << format_g9(p.mean) << ',' << format_g9(p.std) << '\n';
    }
  }
}

}  // namespace hlmc
