#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdqn/agents/networks.hpp"
#include "cdqn/agents/transition_set.hpp"
#include "cdqn/error.hpp"

namespace cdqn::agents {

enum class Algorithm { kDdqn, kConformalDqn, kCql, kBc };

std::string_view to_string(Algorithm algorithm) noexcept;
/// Accepts "ddqn", "conformal_dqn", "cql", "bc"; throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

bool uses_q_network(Algorithm algorithm) noexcept;
bool uses_policy_network(Algorithm algorithm) noexcept;

struct AgentConfig {
  Algorithm algorithm = Algorithm::kConformalDqn;
  double learning_rate = 1e-3;
  double gamma = 0.75;
  int batch_size = 256;
  int max_steps = 30000;
  int sync_interval = 5000;
  double cql_weight = 0.1;
  double logit_l2_coeff = 1e-3;
  double alpha = 0.15;
  std::vector<int> hidden_layers{256, 256};
  int state_dim = 44;
  int n_actions = 343;
  std::uint64_t seed = 0;
  double divergence_threshold = 1e6;

  void validate() const;
};

struct TrainingRecord {
  int step = 0;
  double loss = 0.0;         // total objective of the step
  double td = 0.0;           // TD term (0 for bc)
  double regularizer = 0.0;  // CQL penalty or NLL, depending on the algorithm
  double logit_l2 = 0.0;
};

struct TrainedAgent {
  AgentConfig config;
  std::optional<QNetworkPair> q;      // ddqn, cql, conformal_dqn
  std::optional<PolicyNet> policy;    // conformal_dqn, bc
  std::vector<TrainingRecord> history;
};

/// Raised when a training loss exceeds the divergence threshold or becomes
/// non-finite; carries the history up to and including the failing step.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::vector<TrainingRecord> history)
      : NumericError(what), history_(std::move(history)) {}

  const std::vector<TrainingRecord>& history() const noexcept { return history_; }

 private:
  std::vector<TrainingRecord> history_;
};

/// Offline training on logged transitions with seeded uniform minibatches.
/// Network initialization and batch sampling use independent sub-streams of
/// cfg.seed, so identical seeds reproduce identical parameters.
TrainedAgent train(const TransitionSet& data, const AgentConfig& cfg);

}  // namespace cdqn::agents
