#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cdqn/mdp/action.hpp"
#include "cdqn/mdp/state.hpp"

namespace cdqn::mdp {

/// One logged window: the state observed, the action taken, and the reward
/// received for the transition out of this window.
struct Window {
  StateVector state;
  ActionTriple action;
  double reward = 0.0;
  bool done = false;
};

struct Transition {
  StateVector state;
  ActionIndex action{0};
  double reward = 0.0;
  StateVector next_state;
  bool done = false;
};

struct Episode {
  std::uint64_t patient_id = 0;
  std::vector<Window> windows;
  bool survived_90d = false;

  std::size_t size() const noexcept { return windows.size(); }
  const StateVector& initial_state() const;

  /// Transition out of window t. The next state of the terminal window is its
  /// own state; it never enters a learning target.
  Transition transition(std::size_t t) const;

  /// Throws DataError if the episode is empty, longer than kHorizon, has an
  /// invalid action, or does not end in exactly one terminal window whose
  /// reward matches the survival outcome.
  void validate(double intermediate_reward_bound) const;
};

}  // namespace cdqn::mdp
