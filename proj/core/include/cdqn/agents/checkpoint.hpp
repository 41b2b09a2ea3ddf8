#pragma once

#include <filesystem>

#include "cdqn/agents/trainer.hpp"

namespace cdqn::agents {

// Agent checkpoint directory:
//   agent.json       format tag, version, AgentConfig, list of network files
//   q.net            prediction Q-network   (ddqn, cql, conformal_dqn)
//   q_target.net     target Q-network       (ddqn, cql, conformal_dqn)
//   policy.net       behavioral policy net  (conformal_dqn, bc)
//   history.csv      step,loss,td,regularizer,logit_l2

void save_agent(const std::filesystem::path& dir, const TrainedAgent& agent);
TrainedAgent load_agent(const std::filesystem::path& dir);

void write_history_csv(const std::filesystem::path& path, const std::vector<TrainingRecord>& history);

}  // namespace cdqn::agents
