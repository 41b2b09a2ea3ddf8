#include "cdqn/agents/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

#include "cdqn/config_json.hpp"
#include "cdqn/error.hpp"
#include "cdqn/nn/checkpoint.hpp"

namespace cdqn::agents {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "cdqn-agent";
constexpr int kVersion = 1;

void check_architecture(const nn::DenseNetwork& net, const AgentConfig& cfg, const std::string& file) {
  if (net.layer_sizes() != layer_sizes(cfg.state_dim, cfg.hidden_layers, cfg.n_actions)) {
    throw IoError(file + " does not match the architecture recorded in agent.json");
  }
}

}  // namespace

void write_history_csv(const fs::path& path, const std::vector<TrainingRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "step,loss,td,regularizer,logit_l2\n";
  for (const auto& r : history) {
    out << r.step << ',' << r.loss << ',' << r.td << ',' << r.regularizer << ',' << r.logit_l2 << '\n';
  }
  if (!out) throw IoError("failed to write " + path.string());
}

void save_agent(const fs::path& dir, const TrainedAgent& agent) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  config::Json networks = config::Json::array();
  if (agent.q) {
    nn::save_network(dir / "q.net", agent.q->prediction);
    nn::save_network(dir / "q_target.net", agent.q->target);
    networks.push_back("q.net");
    networks.push_back("q_target.net");
  }
  if (agent.policy) {
    nn::save_network(dir / "policy.net", agent.policy->net);
    networks.push_back("policy.net");
  }
  write_history_csv(dir / "history.csv", agent.history);

  config::Json doc{{"format", kFormat},
                   {"version", kVersion},
                   {"config", config::to_json(agent.config)},
                   {"networks", networks},
                   {"steps", agent.history.size()}};
  std::ofstream out(dir / "agent.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "agent.json").string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed to write " + (dir / "agent.json").string());
}

TrainedAgent load_agent(const fs::path& dir) {
  const fs::path meta = dir / "agent.json";
  std::ifstream in(meta);
  if (!in) throw IoError("missing agent checkpoint " + meta.string());
  config::Json doc;
  try {
    doc = config::Json::parse(in);
    if (doc.at("format") != kFormat) throw IoError(meta.string() + " is not an agent checkpoint");
    if (doc.at("version") != kVersion) throw IoError("unsupported agent checkpoint version");
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed " + meta.string() + ": " + e.what());
  }

  TrainedAgent agent;
  try {
    agent.config = config::agent_config_from_json(doc.at("config"));
  } catch (const ConfigError& e) {
    throw IoError("invalid config in " + meta.string() + ": " + e.what());
  }
  const AgentConfig& cfg = agent.config;
  if (uses_q_network(cfg.algorithm)) {
    QNetworkPair pair{nn::load_network(dir / "q.net"), nn::load_network(dir / "q_target.net"), cfg.sync_interval};
    check_architecture(pair.prediction, cfg, "q.net");
    check_architecture(pair.target, cfg, "q_target.net");
    agent.q = std::move(pair);
  }
  if (uses_policy_network(cfg.algorithm)) {
    PolicyNet policy{nn::load_network(dir / "policy.net")};
    check_architecture(policy.net, cfg, "policy.net");
    agent.policy = std::move(policy);
  }
  return agent;
}

}  // namespace cdqn::agents
