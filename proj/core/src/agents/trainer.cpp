#include "cdqn/agents/trainer.hpp"

#include <cmath>
#include <string>

#include "cdqn/agents/losses.hpp"
#include "cdqn/nn/adam.hpp"

namespace cdqn::agents {

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::kDdqn: return "ddqn";
    case Algorithm::kConformalDqn: return "conformal_dqn";
    case Algorithm::kCql: return "cql";
    case Algorithm::kBc: return "bc";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kDdqn, Algorithm::kConformalDqn, Algorithm::kCql, Algorithm::kBc}) {
    if (name == to_string(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected ddqn, conformal_dqn, cql or bc)");
}

bool uses_q_network(Algorithm algorithm) noexcept { return algorithm != Algorithm::kBc; }

bool uses_policy_network(Algorithm algorithm) noexcept {
  return algorithm == Algorithm::kConformalDqn || algorithm == Algorithm::kBc;
}

void AgentConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be finite and >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(cql_weight >= 0.0)) throw ConfigError("cql_weight must be non-negative");
  if (!(logit_l2_coeff >= 0.0)) throw ConfigError("logit_l2_coeff must be non-negative");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (max_steps < 0) throw ConfigError("max_steps must be non-negative");
  if (sync_interval < 1) throw ConfigError("sync_interval must be positive");
  if (state_dim < 1 || n_actions < 1) throw ConfigError("state_dim and n_actions must be positive");
  for (int h : hidden_layers) {
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  }
  if (!(divergence_threshold > 0.0)) throw ConfigError("divergence_threshold must be positive");
}

TrainedAgent train(const TransitionSet& data, const AgentConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) throw DataError("training set is empty");
  data.validate();
  if (data.state_dim() != cfg.state_dim) {
    throw ShapeError("training states have " + std::to_string(data.state_dim()) + " features, config expects " +
                     std::to_string(cfg.state_dim));
  }
  for (int a : data.actions) {
    if (a < 0 || a >= cfg.n_actions) throw DomainError("logged action outside [0, n_actions)");
  }

  const auto sizes = layer_sizes(cfg.state_dim, cfg.hidden_layers, cfg.n_actions);
  TrainedAgent agent;
  agent.config = cfg;
  if (uses_q_network(cfg.algorithm)) {
    agent.q = QNetworkPair::create(sizes, derive_seed(cfg.seed, "q-network"), cfg.sync_interval);
  }
  if (uses_policy_network(cfg.algorithm)) {
    agent.policy = PolicyNet{nn::init_network(sizes, derive_seed(cfg.seed, "policy-network"))};
  }

  nn::AdamState q_opt;
  nn::AdamState p_opt;
  if (agent.q) q_opt = nn::AdamState::for_network(agent.q->prediction);
  if (agent.policy) p_opt = nn::AdamState::for_network(agent.policy->net);

  Rng batch_rng(derive_seed(cfg.seed, "batches"));
  agent.history.reserve(static_cast<std::size_t>(cfg.max_steps));

  for (int step = 1; step <= cfg.max_steps; ++step) {
    const TransitionSet batch = sample_batch(data, static_cast<std::size_t>(cfg.batch_size), batch_rng);
    TrainingRecord record;
    record.step = step;

    try {
    switch (cfg.algorithm) {
      case Algorithm::kDdqn: {
        LossResult td = td_loss(batch, *agent.q, cfg.gamma);
        record.td = td.loss;
        record.loss = td.loss;
        nn::adam_step(agent.q->prediction, td.grads, q_opt, cfg.learning_rate);
        break;
      }
      case Algorithm::kCql: {
        // One forward pass serves both the TD and the CQL terms.
        const Vector targets = ddqn_target(batch, *agent.q, cfg.gamma);
        nn::ForwardCache cache;
        const Matrix q = agent.q->prediction.forward(batch.states, cache);
        Matrix td_grad;
        Matrix cql_grad;
        record.td = detail::td_terms(q, batch.actions, targets, td_grad);
        record.regularizer = detail::cql_terms(q, batch.actions, cfg.cql_weight, cql_grad);
        record.loss = record.td + record.regularizer;
        if (std::isfinite(record.loss)) {
          nn::adam_step(agent.q->prediction, agent.q->prediction.backward(cache, td_grad + cql_grad), q_opt,
                        cfg.learning_rate);
        }
        break;
      }
      case Algorithm::kConformalDqn: {
        CompositeLoss loss = composite_loss(batch, *agent.q, *agent.policy, cfg.gamma, cfg.logit_l2_coeff);
        record.td = loss.td;
        record.regularizer = loss.nll;
        record.logit_l2 = loss.l2;
        record.loss = loss.total;
        if (std::isfinite(record.loss)) {
          nn::adam_step(agent.q->prediction, loss.q_grads, q_opt, cfg.learning_rate);
          nn::adam_step(agent.policy->net, loss.p_grads, p_opt, cfg.learning_rate);
        }
        break;
      }
      case Algorithm::kBc: {
        LossResult nll = nll_loss(batch, *agent.policy);
        record.regularizer = nll.loss;
        record.loss = nll.loss;
        nn::adam_step(agent.policy->net, nll.grads, p_opt, cfg.learning_rate);
        break;
      }
    }
    } catch (const NumericError& e) {
      agent.history.push_back(record);
      throw DivergenceError(std::string("training diverged at step ") + std::to_string(step) + ": " + e.what(),
                            std::move(agent.history));
    }
    agent.history.push_back(record);

    if (!std::isfinite(record.loss) || record.loss > cfg.divergence_threshold) {
      throw DivergenceError("training diverged at step " + std::to_string(step) + " (loss " +
                                std::to_string(record.loss) + ")",
                            std::move(agent.history));
    }
    if (agent.q && step % cfg.sync_interval == 0) agent.q->sync();
  }
  return agent;
}

}  // namespace cdqn::agents
