#include "cdqn/config_json.hpp"

#include <algorithm>
#include <string>

#include "cdqn/error.hpp"

namespace cdqn::config {

ObjectReader::ObjectReader(const Json& j, std::string context) : j_(j), context_(std::move(context)) {
  if (!j_.is_object()) throw ConfigError(context_ + " must be a JSON object");
}

const Json& ObjectReader::at(const char* key) const {
  auto it = j_.find(key);
  if (it == j_.end()) throw ConfigError(context_ + "." + key + " is required");
  return *it;
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(known_.begin(), known_.end(), it.key()) == known_.end()) {
      throw ConfigError("unknown key " + context_ + "." + it.key());
    }
  }
}

void ObjectReader::throw_type_error(const char* key) const {
  throw ConfigError(context_ + "." + key + " has the wrong type");
}

Json to_json(const agents::AgentConfig& cfg) {
  return Json{{"algorithm", agents::to_string(cfg.algorithm)},
              {"learning_rate", cfg.learning_rate},
              {"gamma", cfg.gamma},
              {"batch_size", cfg.batch_size},
              {"max_steps", cfg.max_steps},
              {"sync_interval", cfg.sync_interval},
              {"cql_weight", cfg.cql_weight},
              {"logit_l2_coeff", cfg.logit_l2_coeff},
              {"alpha", cfg.alpha},
              {"hidden_layers", cfg.hidden_layers},
              {"state_dim", cfg.state_dim},
              {"n_actions", cfg.n_actions},
              {"seed", cfg.seed},
              {"divergence_threshold", cfg.divergence_threshold}};
}

agents::AgentConfig agent_config_from_json(const Json& j, agents::AgentConfig cfg) {
  ObjectReader r(j, "agent");
  std::string algorithm(agents::to_string(cfg.algorithm));
  r.read("algorithm", algorithm)
      .read("learning_rate", cfg.learning_rate)
      .read("gamma", cfg.gamma)
      .read("batch_size", cfg.batch_size)
      .read("max_steps", cfg.max_steps)
      .read("sync_interval", cfg.sync_interval)
      .read("cql_weight", cfg.cql_weight)
      .read("logit_l2_coeff", cfg.logit_l2_coeff)
      .read("alpha", cfg.alpha)
      .read("hidden_layers", cfg.hidden_layers)
      .read("state_dim", cfg.state_dim)
      .read("n_actions", cfg.n_actions)
      .read("seed", cfg.seed)
      .read("divergence_threshold", cfg.divergence_threshold)
      .finish();
  cfg.algorithm = agents::parse_algorithm(algorithm);
  cfg.validate();
  return cfg;
}

Json to_json(const sim::SimConfig& cfg) {
  return Json{{"n_patients", cfg.n_patients},
              {"horizon", cfg.horizon},
              {"expert_noise", cfg.expert_noise},
              {"observation_noise", cfg.observation_noise},
              {"mortality_steepness", cfg.mortality_steepness},
              {"seed", cfg.seed},
              {"intermediate_reward_weight", cfg.intermediate_reward_weight},
              {"initial_severity_mean", cfg.initial_severity_mean},
              {"initial_severity_sd", cfg.initial_severity_sd},
              {"tail_probability", cfg.tail_probability},
              {"initial_severity_tail_sd", cfg.initial_severity_tail_sd},
              {"responsiveness_min", cfg.responsiveness_min},
              {"heal_rate", cfg.heal_rate},
              {"harm_rate", cfg.harm_rate},
              {"tolerance", cfg.tolerance},
              {"process_noise", cfg.process_noise},
              {"missing_rates", cfg.missing_rates},
              {"single_transition", cfg.single_transition}};
}

sim::SimConfig sim_config_from_json(const Json& j, sim::SimConfig cfg) {
  ObjectReader r(j, "sim");
  r.read("n_patients", cfg.n_patients)
      .read("horizon", cfg.horizon)
      .read("expert_noise", cfg.expert_noise)
      .read("observation_noise", cfg.observation_noise)
      .read("mortality_steepness", cfg.mortality_steepness)
      .read("seed", cfg.seed)
      .read("intermediate_reward_weight", cfg.intermediate_reward_weight)
      .read("initial_severity_mean", cfg.initial_severity_mean)
      .read("initial_severity_sd", cfg.initial_severity_sd)
      .read("tail_probability", cfg.tail_probability)
      .read("initial_severity_tail_sd", cfg.initial_severity_tail_sd)
      .read("responsiveness_min", cfg.responsiveness_min)
      .read("heal_rate", cfg.heal_rate)
      .read("harm_rate", cfg.harm_rate)
      .read("tolerance", cfg.tolerance)
      .read("process_noise", cfg.process_noise)
      .read("single_transition", cfg.single_transition);
  r.mark("missing_rates");
  if (r.has("missing_rates")) {
    const Json& rates = r.at("missing_rates");
    if (!rates.is_array() || rates.size() != cfg.missing_rates.size()) {
      throw ConfigError("sim.missing_rates must be an array of 44 numbers");
    }
    for (std::size_t i = 0; i < cfg.missing_rates.size(); ++i) {
      if (!rates[i].is_number()) throw ConfigError("sim.missing_rates must be an array of 44 numbers");
      cfg.missing_rates[i] = rates[i].get<double>();
    }
  }
  r.finish();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

Json to_json(const mdp::SplitRatios& ratios) {
  return Json{{"train", ratios.train},
              {"validation", ratios.validation},
              {"calibration", ratios.calibration},
              {"test", ratios.test}};
}

mdp::SplitRatios split_ratios_from_json(const Json& j, mdp::SplitRatios ratios) {
  ObjectReader(j, "split")
      .read("train", ratios.train)
      .read("validation", ratios.validation)
      .read("calibration", ratios.calibration)
      .read("test", ratios.test)
      .finish();
  try {
    ratios.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return ratios;
}

Json to_json(const mdp::ImputeOptions& options) {
  return Json{{"neighbors", options.neighbors},
              {"knn_limit", options.knn_limit},
              {"removal_limit", options.removal_limit},
              {"max_donors", options.max_donors}};
}

mdp::ImputeOptions impute_options_from_json(const Json& j, mdp::ImputeOptions options) {
  ObjectReader(j, "impute")
      .read("neighbors", options.neighbors)
      .read("knn_limit", options.knn_limit)
      .read("removal_limit", options.removal_limit)
      .read("max_donors", options.max_donors)
      .finish();
  if (options.neighbors < 1) throw ConfigError("impute.neighbors must be positive");
  if (!(options.knn_limit >= 0.0 && options.knn_limit <= options.removal_limit && options.removal_limit <= 1.0)) {
    throw ConfigError("impute limits must satisfy 0 <= knn_limit <= removal_limit <= 1");
  }
  if (options.max_donors < 1) throw ConfigError("impute.max_donors must be positive");
  return options;
}

Json to_json(const eval::FqeConfig& cfg) {
  return Json{{"gamma", cfg.gamma},
              {"iterations", cfg.iterations},
              {"steps_per_iteration", cfg.steps_per_iteration},
              {"learning_rate", cfg.learning_rate},
              {"batch_size", cfg.batch_size},
              {"hidden_layers", cfg.hidden_layers},
              {"n_actions", cfg.n_actions},
              {"encoding", eval::to_string(cfg.encoding)},
              {"clip_targets", cfg.clip_targets},
              {"sparse_rewards", cfg.sparse_rewards},
              {"seed", cfg.seed},
              {"divergence_threshold", cfg.divergence_threshold}};
}

eval::FqeConfig fqe_config_from_json(const Json& j, eval::FqeConfig cfg) {
  ObjectReader r(j, "fqe");
  std::string encoding(eval::to_string(cfg.encoding));
  r.read("gamma", cfg.gamma)
      .read("iterations", cfg.iterations)
      .read("steps_per_iteration", cfg.steps_per_iteration)
      .read("learning_rate", cfg.learning_rate)
      .read("batch_size", cfg.batch_size)
      .read("hidden_layers", cfg.hidden_layers)
      .read("n_actions", cfg.n_actions)
      .read("encoding", encoding)
      .read("clip_targets", cfg.clip_targets)
      .read("sparse_rewards", cfg.sparse_rewards)
      .read("seed", cfg.seed)
      .read("divergence_threshold", cfg.divergence_threshold)
      .finish();
  cfg.encoding = eval::parse_action_encoding(encoding);
  cfg.validate();
  return cfg;
}

}  // namespace cdqn::config
