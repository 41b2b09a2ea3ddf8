#pragma once

#include <nlohmann/json.hpp>

#include "cdqn/agents/trainer.hpp"
#include "cdqn/eval/fqe.hpp"
#include "cdqn/mdp/impute.hpp"
#include "cdqn/mdp/split.hpp"
#include "cdqn/sim/simulator.hpp"

namespace cdqn::config {

using Json = nlohmann::json;

// Every *_from_json starts from `base` and overrides the keys present in the
// object. Unknown keys and wrongly typed values raise ConfigError; the result
// is validated before it is returned.

Json to_json(const agents::AgentConfig& cfg);
agents::AgentConfig agent_config_from_json(const Json& j, agents::AgentConfig base = {});

Json to_json(const sim::SimConfig& cfg);
sim::SimConfig sim_config_from_json(const Json& j, sim::SimConfig base = {});

Json to_json(const mdp::SplitRatios& ratios);
mdp::SplitRatios split_ratios_from_json(const Json& j, mdp::SplitRatios base = {});

Json to_json(const mdp::ImputeOptions& options);
mdp::ImputeOptions impute_options_from_json(const Json& j, mdp::ImputeOptions base = {});

Json to_json(const eval::FqeConfig& cfg);
eval::FqeConfig fqe_config_from_json(const Json& j, eval::FqeConfig base = {});

/// Key-by-key reader for a JSON object that rejects keys it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string context);

  template <class T>
  ObjectReader& read(const char* key, T& out) {
    known_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return *this;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw_type_error(key);
    }
    return *this;
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const;
  void mark(const char* key) { known_.push_back(key); }

  /// Throws ConfigError naming the first unexpected key.
  void finish() const;

 private:
  [[noreturn]] void throw_type_error(const char* key) const;

  const Json& j_;
  std::string context_;
  std::vector<std::string> known_;
};

}  // namespace cdqn::config
