#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "cdqn/mdp/episode.hpp"
#include "cdqn/mdp/reward.hpp"
#include "cdqn/rng.hpp"

namespace fixture {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Episode of `length` windows with states filled by `value(t, j)`.
template <typename F>
cdqn::mdp::Episode make_episode(std::uint64_t id, int length, bool survived, F value) {
  cdqn::mdp::Episode ep;
  ep.patient_id = id;
  ep.survived_90d = survived;
  for (int t = 0; t < length; ++t) {
    cdqn::mdp::Window w;
    for (int j = 0; j < cdqn::mdp::kStateDim; ++j) {
      w.state.values[j] = value(t, j);
      w.state.missing[j] = std::isnan(w.state.values[j]);
    }
    w.action = {t % 7, (t + 1) % 7, (t + 2) % 7};
    w.done = t + 1 == length;
    w.reward = w.done ? cdqn::mdp::terminal_reward(survived) : 0.0;
    ep.windows.push_back(w);
  }
  return ep;
}

inline std::vector<cdqn::mdp::Episode> random_episodes(std::uint64_t seed, int n, int length) {
  cdqn::Rng rng(seed);
  std::vector<cdqn::mdp::Episode> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(make_episode(static_cast<std::uint64_t>(i), length, rng.bernoulli(0.7),
                               [&](int, int) { return rng.normal(); }));
  }
  return out;
}

}  // namespace fixture
