#include "cli/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "cdqn/config_json.hpp"
#include "cdqn/error.hpp"
#include "cdqn/rng.hpp"

namespace cdqn::cli {

using config::Json;

namespace {

constexpr const char* kFormat = "cdqn-run";
constexpr int kVersion = 1;

const agents::Algorithm kAllAlgorithms[] = {agents::Algorithm::kDdqn, agents::Algorithm::kConformalDqn,
                                            agents::Algorithm::kCql, agents::Algorithm::kBc};

}  // namespace

agents::AgentConfig default_agent_config(agents::Algorithm algorithm) {
  agents::AgentConfig c;
  c.algorithm = algorithm;
  if (algorithm == agents::Algorithm::kCql) c.learning_rate = 1e-4;
  return c;
}

const agents::AgentConfig& RunConfig::agent(agents::Algorithm algorithm) const {
  auto it = agents.find(algorithm);
  if (it == agents.end()) throw ConfigError("no agent settings for " + std::string(agents::to_string(algorithm)));
  return it->second;
}

std::uint64_t RunConfig::run_seed(int run) const { return derive_seed(seed, static_cast<std::uint64_t>(run)); }

std::uint64_t RunConfig::sim_seed() const { return sim_seed_explicit ? sim.seed : derive_seed(seed, "sim"); }

std::uint64_t RunConfig::split_seed() const { return derive_seed(seed, "split"); }

int RunConfig::worker_count() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void RunConfig::validate() const {
  if (n_runs < 1) throw ConfigError("n_runs must be positive");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (data_format != "bin" && data_format != "csv") throw ConfigError("data_format must be \"bin\" or \"csv\"");
  if (!(ood_percentile >= 0.0 && ood_percentile < 0.5)) throw ConfigError("ood_percentile must lie in [0, 0.5)");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
  try {
    sim.validate();
    split.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  fqe.validate();
  for (auto a : algorithms) {
    const auto& c = agent(a);
    c.validate();
    if (c.state_dim != mdp::kStateDim) throw ConfigError("agent state_dim must be 44 for simulator data");
    if (c.n_actions != mdp::kNumActions) throw ConfigError("agent n_actions must be 343 for simulator data");
  }
  if (fqe.encoding == eval::ActionEncoding::kOneHot && fqe.n_actions != mdp::kNumActions) {
    throw ConfigError("fqe n_actions must be 343 for simulator data");
  }
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  config::ObjectReader r(j, "run");
  std::string format = kFormat;
  int version = kVersion;
  std::string out = cfg.output_dir.string();
  std::vector<std::string> algorithms;
  r.read("format", format).read("version", version);
  if (format != kFormat) throw ConfigError("run config format must be \"cdqn-run\"");
  if (version != kVersion) throw ConfigError("unsupported run config version " + std::to_string(version));
  r.read("seed", cfg.seed)
      .read("n_runs", cfg.n_runs)
      .read("output_dir", out)
      .read("workers", cfg.workers)
      .read("data_format", cfg.data_format)
      .read("ood_percentile", cfg.ood_percentile)
      .read("physician_baseline", cfg.physician_baseline)
      .read("algorithms", algorithms);
  cfg.output_dir = out;
  if (r.has("algorithms")) {
    cfg.algorithms.clear();
    for (const auto& name : algorithms) {
      const auto a = agents::parse_algorithm(name);
      if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), a) != cfg.algorithms.end()) {
        throw ConfigError("algorithm '" + name + "' listed twice");
      }
      cfg.algorithms.push_back(a);
    }
    std::sort(cfg.algorithms.begin(), cfg.algorithms.end(),
              [](auto x, auto y) { return agents::to_string(x) < agents::to_string(y); });
  }

  for (const char* key : {"sim", "split", "impute", "fqe", "agents"}) r.mark(key);
  if (r.has("sim")) {
    cfg.sim = config::sim_config_from_json(r.at("sim"));
    cfg.sim_seed_explicit = r.at("sim").contains("seed");
  }
  if (r.has("split")) cfg.split = config::split_ratios_from_json(r.at("split"));
  if (r.has("impute")) cfg.impute = config::impute_options_from_json(r.at("impute"));
  if (r.has("fqe")) cfg.fqe = config::fqe_config_from_json(r.at("fqe"));

  Json defaults = Json::object();
  Json per_algorithm = Json::object();
  if (r.has("agents")) {
    config::ObjectReader ar(r.at("agents"), "agents");
    for (const char* key : {"defaults", "ddqn", "conformal_dqn", "cql", "bc"}) ar.mark(key);
    ar.finish();
    per_algorithm = r.at("agents");
    if (per_algorithm.contains("defaults")) defaults = per_algorithm["defaults"];
    if (defaults.contains("algorithm")) throw ConfigError("agents.defaults must not set algorithm");
  }
  for (auto a : kAllAlgorithms) {
    const std::string name(agents::to_string(a));
    agents::AgentConfig c = config::agent_config_from_json(defaults, default_agent_config(a));
    if (per_algorithm.contains(name)) {
      const Json& own = per_algorithm[name];
      if (own.is_object() && own.contains("algorithm") && own["algorithm"] != name) {
        throw ConfigError("agents." + name + ".algorithm must be \"" + name + "\"");
      }
      c = config::agent_config_from_json(own, c);
    }
    cfg.agents[a] = c;
  }
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

Json to_json(const RunConfig& cfg) {
  Json algorithms = Json::array();
  for (auto a : cfg.algorithms) algorithms.push_back(agents::to_string(a));
  Json agents_json = Json::object();
  for (const auto& [a, c] : cfg.agents) agents_json[std::string(agents::to_string(a))] = config::to_json(c);
  Json sim = config::to_json(cfg.sim);
  sim["seed"] = cfg.sim_seed();
  return Json{{"format", kFormat},
              {"version", kVersion},
              {"seed", cfg.seed},
              {"n_runs", cfg.n_runs},
              {"output_dir", cfg.output_dir.string()},
              {"workers", cfg.workers},
              {"data_format", cfg.data_format},
              {"ood_percentile", cfg.ood_percentile},
              {"physician_baseline", cfg.physician_baseline},
              {"algorithms", algorithms},
              {"sim", sim},
              {"split", config::to_json(cfg.split)},
              {"impute", config::to_json(cfg.impute)},
              {"fqe", config::to_json(cfg.fqe)},
              {"agents", agents_json}};
}

}  // namespace cdqn::cli
