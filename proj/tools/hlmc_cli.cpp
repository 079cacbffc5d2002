#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hlmc/hlmc.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitRegime = 4;

struct Overrides {
  std::optional<std::int64_t> horizon, arms, budget, hardness, runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--T", o.horizon, "horizon");
  cmd->add_option("--K", o.arms, "number of arms (channels for spectrum)");
  cmd->add_option("--M", o.budget, "memory budget in words");
  cmd->add_option("--V", o.hardness, "hardness bound");
  cmd->add_option("--runs", o.runs, "replications");
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--out", o.out, "CSV output path (default stdout)");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

void apply(const Overrides& o, hlmc::ExperimentConfig& c) {
  if (o.horizon) c.horizon = *o.horizon;
  if (o.arms) {
    if (c.adversary.kind == hlmc::AdversaryKind::Bernoulli) {
      throw hlmc::ConfigError("--K cannot resize a bernoulli adversary; edit its means");
    }
    c.adversary.arms = static_cast<std::size_t>(*o.arms);
  }
  if (o.budget) {
    c.adversary.budget = static_cast<std::size_t>(*o.budget);
    for (auto& p : c.policies) {
      if (p.budget > 0) p.budget = *o.budget;
    }
  }
  if (o.hardness) {
    c.regret.hardness = *o.hardness;
    c.adversary.phases = *o.hardness;
    for (auto& p : c.policies) p.hardness = static_cast<double>(*o.hardness);
  }
  if (o.runs) c.replications = static_cast<int>(*o.runs);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.threads) c.threads = *o.threads;
}

void apply(const Overrides& o, hlmc::SpectrumConfig& c) {
  if (o.horizon) c.horizon = *o.horizon;
  if (o.arms) c.channels = static_cast<std::size_t>(*o.arms);
  if (o.budget) c.budget = *o.budget;
  if (o.hardness) throw hlmc::ConfigError("--V does not apply to spectrum runs");
  if (o.runs) c.replications = static_cast<int>(*o.runs);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.threads) c.threads = *o.threads;
}

template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    std::ostringstream os;
    write(os);
    std::fwrite(os.str().data(), 1, os.str().size(), stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw hlmc::ConfigError("cannot write '" + path + "'");
  write(f);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

/// Rows are steps, columns are arms; blank lines and '#' lines are skipped.
hlmc::MatrixRewardModel read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hlmc::ConfigError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw hlmc::ConfigError("matrix line " + std::to_string(rows.size() + 1) + ": bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw hlmc::ConfigError("matrix file '" + path + "' has no rows");
  try {
    return hlmc::MatrixRewardModel(std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw hlmc::ConfigError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical bandit learning under memory budgets"};
  app.require_subcommand(1);

  Overrides run_over, spec_over;
  std::string run_config, spec_config;
  auto* run = app.add_subcommand("run", "run a regret experiment from a JSON config");
  run->add_option("--config", run_config, "experiment config (JSON)")->required();
  add_overrides(run, run_over);

  auto* spectrum = app.add_subcommand("spectrum", "run the multi-agent channel access simulation");
  spectrum->add_option("--config", spec_config, "spectrum config (JSON)")->required();
  add_overrides(spectrum, spec_over);

  std::string matrix;
  std::int64_t oracle_v = 1;
  auto* oracle = app.add_subcommand("oracle", "weak and shifting benchmarks of a stored reward matrix");
  oracle->add_option("--matrix", matrix, "CSV, one row per step, one column per arm")->required();
  oracle->add_option("--V", oracle_v, "hardness bound for the shifting benchmark")->check(CLI::PositiveNumber);

  std::optional<std::string> kind;
  double bt = 0, bk = 0, bv = 1, bdelta = 0.05;
  auto* bounds = app.add_subcommand("bounds", "closed-form regret bounds");
  bounds->add_option("--kind", kind, "weak_expected|weak_highprob|shifting|shifting_unknown_v|three_level (default all)");
  bounds->add_option("--T", bt, "horizon")->required();
  bounds->add_option("--K", bk, "number of arms")->required();
  bounds->add_option("--V", bv, "hardness bound");
  bounds->add_option("--delta", bdelta, "failure probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      auto cfg = hlmc::experiment_from_json(hlmc::load_json_file(run_config));
      apply(run_over, cfg);
      const auto result = hlmc::run_experiment(cfg);
      emit(cfg.out, [&](std::ostream& os) { hlmc::write_regret_csv(os, result); });
      for (const auto& c : result.curves) {
        std::fprintf(stderr, "%s: final mean regret %s, ledger peak %lld words\n", c.policy.c_str(),
                     hlmc::format_g9(c.final_mean()).c_str(), static_cast<long long>(c.peak_words));
      }
    } else if (*spectrum) {
      auto cfg = hlmc::spectrum_from_json(hlmc::load_json_file(spec_config));
      apply(spec_over, cfg);
      const auto result = hlmc::run_spectrum(cfg);
      emit(cfg.out, [&](std::ostream& os) { hlmc::write_spectrum_csv(os, result); });
    } else if (*oracle) {
      const auto model = read_matrix(matrix);
      const auto cps = hlmc::default_checkpoints(model.horizon());
      const auto weak = hlmc::weak_benchmark(model, cps);
      const auto shift = hlmc::shifting_benchmark(model, oracle_v, cps);
      emit("", [&](std::ostream& os) {
        os << "t,weak_benchmark,shifting_benchmark\n";
        for (std::size_t i = 0; i < cps.size(); ++i) {
          os << cps[i] << ',' << hlmc::format_g9(weak[i]) << ',' << hlmc::format_g9(shift[i]) << '\n';
        }
      });
    } else if (*bounds) {
      std::vector<hlmc::BoundKind> kinds;
      if (kind) {
        kinds.push_back(hlmc::bound_kind_from_string(*kind));
      } else {
        kinds = {hlmc::BoundKind::WeakExpected, hlmc::BoundKind::WeakHighProb, hlmc::BoundKind::Shifting,
                 hlmc::BoundKind::ShiftingUnknownV, hlmc::BoundKind::ThreeLevel};
      }
      bool all_in_regime = true;
      std::ostringstream os;
      os << "kind,value,in_regime\n";
      for (auto k : kinds) {
        const auto b = hlmc::theoretical_bound(k, {bt, bk, bv, bdelta});
        os << hlmc::to_string(k) << ',' << hlmc::format_g9(b.value) << ',' << (b.in_regime ? 1 : 0) << '\n';
        if (!b.in_regime) {
          all_in_regime = false;
          std::fprintf(stderr, "%s: out of regime (%s)\n", hlmc::to_string(k), b.note.c_str());
        }
      }
      emit("", [&](std::ostream& o) { o << os.str(); });
      if (!all_in_regime) return kExitRegime;
    }
  } catch (const hlmc::BudgetViolation& e) {
    std::fprintf(stderr, "ledger budget violation: %s\n", e.what());
    return kExitBudget;
  } catch (const hlmc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
