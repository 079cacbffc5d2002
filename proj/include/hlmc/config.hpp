#pragma once

// JSON configuration for experiments and spectrum runs. Every object is
// checked against its list of known keys, so a misspelled field is an error
// rather than a silently ignored default.

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hlmc/experiment.hpp"
#include "hlmc/hlmc_policy.hpp"
#include "hlmc/policy_factory.hpp"
#include "hlmc/spectrum.hpp"

namespace hlmc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

namespace detail {

inline void expect_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

inline void reject_unknown(const Json& j, const std::string& where, std::initializer_list<std::string_view> known) {
  expect_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

template <typename T>
T field(const Json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <typename T>
T required(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return field<T>(j, key, where, T{});
}

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const E (&values)[N], const std::string& where) {
  for (E v : values) {
    if (s == to_string(v)) return v;
  }
  std::string allowed;
  for (E v : values) allowed += std::string(allowed.empty() ? "" : ", ") + to_string(v);
  throw ConfigError(where + ": '" + s + "' is not one of " + allowed);
}

inline std::int64_t positive(std::int64_t v, const std::string& what) {
  if (v < 1) throw ConfigError(what + " must be at least 1");
  return v;
}

}  // namespace detail

// -- routines and policies ----------------------------------------------------

inline RoutineSpec routine_from_json(const Json& j, const std::string& where) {
  using namespace detail;
  reject_unknown(j, where, {"kind", "gamma", "eta", "beta", "alpha"});
  constexpr RoutineKind kinds[] = {RoutineKind::Exp3, RoutineKind::Exp3P, RoutineKind::Exp3S};
  RoutineSpec r;
  r.kind = parse_enum(required<std::string>(j, "kind", where), kinds, where + ".kind");
  r.gamma = required<double>(j, "gamma", where);
  r.eta = field<double>(j, "eta", where, 0.0);
  r.beta = field<double>(j, "beta", where, 0.0);
  r.alpha = field<double>(j, "alpha", where, 0.0);
  if (!(r.gamma > 0.0 && r.gamma <= 1.0)) throw ConfigError(where + ".gamma must lie in (0,1]");
  return r;
}

inline Json routine_to_json(const RoutineSpec& r) {
  Json j{{"kind", to_string(r.kind)}, {"gamma", r.gamma}};
  if (r.kind == RoutineKind::Exp3P) {
    j["eta"] = r.eta;
    j["beta"] = r.beta;
  }
  if (r.kind == RoutineKind::Exp3S) j["alpha"] = r.alpha;
  return j;
}

inline PolicySpec policy_from_json(const Json& j, const std::string& where) {
  using namespace detail;
  reject_unknown(j, where,
                 {"name", "kind", "M", "delta", "V", "gamma", "params", "partition", "levels", "lengths", "routines",
                  "shuffle", "doubling"});
  constexpr PolicyKind kinds[] = {PolicyKind::Exp3, PolicyKind::Exp3P, PolicyKind::Exp3S,
                                  PolicyKind::Hlmc, PolicyKind::UcbM,  PolicyKind::Exp3M};
  constexpr HlmcParams params[] = {HlmcParams::WeakExpected, HlmcParams::WeakHighProb, HlmcParams::Shifting,
                                   HlmcParams::ShiftingUnknownV, HlmcParams::ThreeLevel, HlmcParams::Explicit};
  constexpr PartitionRule partitions[] = {PartitionRule::Sqrt, PartitionRule::Adaptive, PartitionRule::MinDepth};
  constexpr ShuffleMode shuffles[] = {ShuffleMode::None, ShuffleMode::Once, ShuffleMode::PerPhase};

  PolicySpec p;
  p.name = required<std::string>(j, "name", where);
  const std::string here = where + "[" + p.name + "]";
  p.kind = parse_enum(required<std::string>(j, "kind", here), kinds, here + ".kind");
  p.budget = field<std::int64_t>(j, "M", here, 0);
  if (p.budget < 0) throw ConfigError(here + ".M must be non-negative");
  p.delta = field<double>(j, "delta", here, 0.05);
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw ConfigError(here + ".delta must lie in (0,1)");
  p.hardness = field<double>(j, "V", here, 1.0);
  if (!(p.hardness >= 1.0)) throw ConfigError(here + ".V must be at least 1");
  if (j.contains("gamma")) {
    p.gamma = field<double>(j, "gamma", here, 0.0);
    if (!(*p.gamma > 0.0 && *p.gamma <= 1.0)) throw ConfigError(here + ".gamma must lie in (0,1]");
  }
  p.params = parse_enum(field<std::string>(j, "params", here, "weak_expected"), params, here + ".params");
  p.partition = parse_enum(field<std::string>(j, "partition", here, "sqrt"), partitions, here + ".partition");
  p.level_sizes = field<std::vector<std::size_t>>(j, "levels", here, {});
  p.level_lengths = field<std::vector<Step>>(j, "lengths", here, {});
  if (j.contains("routines")) {
    if (!j.at("routines").is_array()) throw ConfigError(here + ".routines: expected an array");
    for (std::size_t i = 0; i < j.at("routines").size(); ++i) {
      p.level_routines.push_back(routine_from_json(j.at("routines")[i], here + ".routines[" + std::to_string(i) + "]"));
    }
  }
  if (p.params == HlmcParams::Explicit &&
      (p.level_sizes.empty() || p.level_sizes.size() != p.level_lengths.size() ||
       p.level_sizes.size() != p.level_routines.size())) {
    throw ConfigError(here + ": explicit params need levels, lengths and routines of equal, non-zero length");
  }
  p.shuffle = parse_enum(field<std::string>(j, "shuffle", here, "once"), shuffles, here + ".shuffle");
  p.doubling = field<bool>(j, "doubling", here, false);
  return p;
}

inline Json policy_to_json(const PolicySpec& p) {
  Json j{{"name", p.name}, {"kind", to_string(p.kind)}};
  if (p.budget > 0) j["M"] = p.budget;
  switch (p.kind) {
    case PolicyKind::Exp3:
      if (p.gamma) j["gamma"] = *p.gamma;
      break;
    case PolicyKind::Exp3P: j["delta"] = p.delta; break;
    case PolicyKind::Exp3S: j["V"] = p.hardness; break;
    case PolicyKind::Hlmc:
      j["params"] = to_string(p.params);
      if (p.params == HlmcParams::Explicit) {
        j["levels"] = p.level_sizes;
        j["lengths"] = p.level_lengths;
        j["routines"] = Json::array();
        for (const auto& r : p.level_routines) j["routines"].push_back(routine_to_json(r));
      } else {
        j["partition"] = to_string(p.partition);
        if (p.params == HlmcParams::WeakHighProb) j["delta"] = p.delta;
        if (p.params == HlmcParams::Shifting) j["V"] = p.hardness;
      }
      break;
    case PolicyKind::UcbM:
    case PolicyKind::Exp3M: j["shuffle"] = to_string(p.shuffle); break;
  }
  if (p.doubling) j["doubling"] = true;
  return j;
}

/// Explicit-parameter policy JSON for a resolved HLMC configuration.
inline Json hlmc_config_to_json(const HlmcConfig& c) {
  Json j{{"kind", "hlmc"}, {"params", "explicit"}};
  j["levels"] = Json::array();
  j["lengths"] = c.schedule.counts();
  j["routines"] = Json::array();
  // Level sizes are the declared per-level widths; realized widths can only be smaller.
  for (std::size_t d = 1; d <= c.depth(); ++d) j["levels"].push_back(c.hierarchy.width(d));
  for (const auto& r : c.levels) j["routines"].push_back(routine_to_json(r));
  return j;
}

// -- adversaries and experiments ----------------------------------------------

inline AdversarySpec adversary_from_json(const Json& j) {
  using namespace detail;
  const std::string where = "adversary";
  reject_unknown(j, where, {"kind", "K", "M", "epsilon", "N", "V", "means"});
  constexpr AdversaryKind kinds[] = {AdversaryKind::SubphaseCycler, AdversaryKind::BlinkingArm,
                                     AdversaryKind::ShiftingPhases, AdversaryKind::Bernoulli};
  AdversarySpec a;
  a.kind = parse_enum(required<std::string>(j, "kind", where), kinds, where + ".kind");
  a.means = field<std::vector<double>>(j, "means", where, {});
  if (a.kind == AdversaryKind::Bernoulli) {
    if (a.means.empty()) throw ConfigError("adversary.means is required for bernoulli");
    a.arms = a.means.size();
  } else {
    a.arms = static_cast<std::size_t>(positive(required<std::int64_t>(j, "K", where), "adversary.K"));
  }
  a.budget = static_cast<std::size_t>(field<std::int64_t>(j, "M", where, 20));
  a.epsilon = field<double>(j, "epsilon", where, 1e-4);
  a.group_size = static_cast<std::size_t>(field<std::int64_t>(j, "N", where, 0));
  a.phases = positive(field<std::int64_t>(j, "V", where, 10), "adversary.V");
  return a;
}

inline Json adversary_to_json(const AdversarySpec& a) {
  Json j{{"kind", to_string(a.kind)}};
  switch (a.kind) {
    case AdversaryKind::SubphaseCycler: j["K"] = a.arms; j["M"] = a.budget; break;
    case AdversaryKind::BlinkingArm: j["K"] = a.arms; j["M"] = a.budget; j["epsilon"] = a.epsilon; break;
    case AdversaryKind::ShiftingPhases:
      j["K"] = a.arms;
      if (a.group_size > 0) j["N"] = a.group_size;
      j["V"] = a.phases;
      break;
    case AdversaryKind::Bernoulli: j["means"] = a.means; break;
  }
  return j;
}

inline std::vector<PolicySpec> policies_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("policies: expected a non-empty array");
  std::vector<PolicySpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(policy_from_json(j[i], "policies[" + std::to_string(i) + "]"));
  return out;
}

inline ExperimentConfig experiment_from_json(const Json& j) {
  using namespace detail;
  reject_unknown(j, "config", {"T", "runs", "seed", "threads", "out", "checkpoints", "regret", "adversary", "policies"});
  ExperimentConfig c;
  c.horizon = positive(required<std::int64_t>(j, "T", "config"), "T");
  c.replications = static_cast<int>(positive(field<std::int64_t>(j, "runs", "config", 10), "runs"));
  c.seed = field<std::uint64_t>(j, "seed", "config", 1);
  c.threads = field<unsigned>(j, "threads", "config", 0);
  c.out = field<std::string>(j, "out", "config", "");
  c.checkpoints = field<std::vector<Step>>(j, "checkpoints", "config", {});
  if (j.contains("regret")) {
    const auto& r = j.at("regret");
    reject_unknown(r, "regret", {"notion", "V"});
    const auto notion = required<std::string>(r, "notion", "regret");
    if (notion != "weak" && notion != "shifting") throw ConfigError("regret.notion must be 'weak' or 'shifting'");
    c.regret.shifting = notion == "shifting";
    c.regret.hardness = positive(field<std::int64_t>(r, "V", "regret", 1), "regret.V");
  }
  if (!j.contains("adversary")) throw ConfigError("config: missing field 'adversary'");
  c.adversary = adversary_from_json(j.at("adversary"));
  if (!j.contains("policies")) throw ConfigError("config: missing field 'policies'");
  c.policies = policies_from_json(j.at("policies"));
  return c;
}

inline Json experiment_to_json(const ExperimentConfig& c) {
  Json j{{"T", c.horizon}, {"runs", c.replications}, {"seed", c.seed}};
  if (c.threads != 0) j["threads"] = c.threads;
  if (!c.out.empty()) j["out"] = c.out;
  if (!c.checkpoints.empty()) j["checkpoints"] = c.checkpoints;
  j["regret"] = c.regret.shifting ? Json{{"notion", "shifting"}, {"V", c.regret.hardness}} : Json{{"notion", "weak"}};
  j["adversary"] = adversary_to_json(c.adversary);
  j["policies"] = Json::array();
  for (const auto& p : c.policies) j["policies"].push_back(policy_to_json(p));
  return j;
}

inline SpectrumConfig spectrum_from_json(const Json& j) {
  using namespace detail;
  reject_unknown(j, "config",
                 {"agents", "K", "M", "T", "P", "pool_value", "solo_value", "runs", "seed", "threads", "out",
                  "checkpoints", "policies"});
  SpectrumConfig c;
  c.agents = static_cast<std::size_t>(positive(field<std::int64_t>(j, "agents", "config", 100), "agents"));
  c.channels = static_cast<std::size_t>(field<std::int64_t>(j, "K", "config", 20));
  if (c.channels < 2) throw ConfigError("K must be at least 2");
  c.budget = positive(field<std::int64_t>(j, "M", "config", 10), "M");
  c.horizon = positive(required<std::int64_t>(j, "T", "config"), "T");
  c.jam_phase = field<std::int64_t>(j, "P", "config", 0);
  if (j.contains("P")) positive(c.jam_phase, "P");
  c.pool_value = field<double>(j, "pool_value", "config", 10.0);
  c.solo_value = field<double>(j, "solo_value", "config", 1.0);
  c.replications = static_cast<int>(positive(field<std::int64_t>(j, "runs", "config", 5), "runs"));
  c.seed = field<std::uint64_t>(j, "seed", "config", 1);
  c.threads = field<unsigned>(j, "threads", "config", 0);
  c.out = field<std::string>(j, "out", "config", "");
  c.checkpoints = field<std::vector<Step>>(j, "checkpoints", "config", {});
  if (!j.contains("policies")) throw ConfigError("config: missing field 'policies'");
  c.policies = policies_from_json(j.at("policies"));
  return c;
}

/// Reads and parses a JSON file; I/O and syntax problems become ConfigError.
inline Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace hlmc
