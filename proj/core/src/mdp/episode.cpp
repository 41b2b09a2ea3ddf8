#include "cdqn/mdp/episode.hpp"

#include <cmath>
#include <string>

#include "cdqn/error.hpp"
#include "cdqn/mdp/reward.hpp"

namespace cdqn::mdp {

const StateVector& Episode::initial_state() const {
  if (windows.empty()) throw DataError("episode " + std::to_string(patient_id) + " has no windows");
  return windows.front().state;
}

Transition Episode::transition(std::size_t t) const {
  const Window& w = windows.at(t);
  const StateVector& next = w.done || t + 1 >= windows.size() ? w.state : windows[t + 1].state;
  return Transition{w.state, encode_action(w.action), w.reward, next, w.done};
}

void Episode::validate(double intermediate_reward_bound) const {
  const std::string who = "episode " + std::to_string(patient_id) + ": ";
  if (windows.empty()) throw DataError(who + "no windows");
  if (windows.size() > static_cast<std::size_t>(kHorizon)) throw DataError(who + "more than 18 windows");
  for (std::size_t t = 0; t < windows.size(); ++t) {
    const Window& w = windows[t];
    if (!w.action.in_range()) throw DataError(who + "action out of range at window " + std::to_string(t));
    const bool last = t + 1 == windows.size();
    if (w.done != last) throw DataError(who + "exactly the final window must be terminal");
    if (last) {
      if (w.reward != terminal_reward(survived_90d)) throw DataError(who + "terminal reward disagrees with outcome");
    } else if (!(std::abs(w.reward) <= intermediate_reward_bound)) {
      throw DataError(who + "intermediate reward out of bounds at window " + std::to_string(t));
    }
  }
}

}  // namespace cdqn::mdp
