#include "cdqn/mdp/reward.hpp"

#include "cdqn/error.hpp"

namespace cdqn::mdp {

double intermediate_reward(const StateVector& current, const StateVector& next, double weight,
                           const SeverityProxy& proxy) {
  if (!(weight > 0.0)) throw ConfigError("intermediate reward weight must be positive");
  const double range = proxy.max_score() - proxy.min_score();
  if (!(range > 0.0)) throw ConfigError("severity proxy has a degenerate score range");
  return weight * (proxy.score(current) - proxy.score(next)) / range;
}

}  // namespace cdqn::mdp
