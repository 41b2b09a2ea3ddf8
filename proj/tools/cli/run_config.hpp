#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdqn/agents/trainer.hpp"
#include "cdqn/eval/fqe.hpp"
#include "cdqn/mdp/impute.hpp"
#include "cdqn/mdp/split.hpp"
#include "cdqn/sim/simulator.hpp"

namespace cdqn::cli {

// Run configuration file (JSON):
//
//   {
//     "format": "cdqn-run", "version": 1,
//     "seed": 0,                  global seed
//     "n_runs": 5,                training runs per algorithm
//     "output_dir": "cdqn-out",
//     "workers": 0,               parallel runs; 0 = hardware concurrency
//     "data_format": "bin",       "bin" or "csv" episode files
//     "ood_percentile": 0.01,
//     "physician_baseline": true, report the logged-action policy alongside the agents
//     "algorithms": ["bc", "conformal_dqn", "cql", "ddqn"],
//     "sim": {...}, "split": {...}, "impute": {...}, "fqe": {...},
//     "agents": {"defaults": {...}, "ddqn": {...}, "conformal_dqn": {...}, "cql": {...}, "bc": {...}}
//   }
//
// Every key is optional. Agent settings layer as built-in defaults, then
// "defaults", then the algorithm's own object. The sim and split seeds derive
// from the global seed unless the sim section sets one; the seed of training
// run r is derive_seed(seed, r).
struct RunConfig {
  std::uint64_t seed = 0;
  int n_runs = 5;
  std::filesystem::path output_dir = "cdqn-out";
  int workers = 0;
  std::string data_format = "bin";
  double ood_percentile = 0.01;
  bool physician_baseline = true;
  std::vector<agents::Algorithm> algorithms{agents::Algorithm::kBc, agents::Algorithm::kConformalDqn,
                                            agents::Algorithm::kCql, agents::Algorithm::kDdqn};
  sim::SimConfig sim;
  bool sim_seed_explicit = false;
  mdp::SplitRatios split;
  mdp::ImputeOptions impute;
  eval::FqeConfig fqe;
  std::map<agents::Algorithm, agents::AgentConfig> agents;

  const agents::AgentConfig& agent(agents::Algorithm algorithm) const;
  std::uint64_t run_seed(int run) const;
  std::uint64_t sim_seed() const;
  std::uint64_t split_seed() const;
  int worker_count() const;
  void validate() const;
};

/// Built-in agent defaults: CQL trains at 1e-4, everything else at 1e-3.
agents::AgentConfig default_agent_config(agents::Algorithm algorithm);

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace cdqn::cli
