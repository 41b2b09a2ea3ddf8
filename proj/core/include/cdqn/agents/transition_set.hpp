#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cdqn/mdp/episode.hpp"
#include "cdqn/nn/network.hpp"
#include "cdqn/rng.hpp"

namespace cdqn::agents {

using nn::Matrix;
using nn::Vector;

/// Flattened logged transitions, one per column. Also serves as a minibatch.
struct TransitionSet {
  Matrix states;       // state_dim x N
  std::vector<int> actions;
  Vector rewards;
  Matrix next_states;  // state_dim x N; equals `states` on terminal columns
  std::vector<std::uint8_t> done;
  std::vector<int> next_actions;  // logged action of the next window, -1 when done

  std::size_t size() const noexcept { return actions.size(); }
  int state_dim() const noexcept { return static_cast<int>(states.rows()); }

  /// Throws ShapeError on inconsistent member sizes.
  void validate() const;

  TransitionSet subset(std::span<const std::size_t> columns) const;

  /// Copy with every non-terminal reward set to zero (terminal +-1 kept).
  TransitionSet with_sparse_rewards() const;

  static TransitionSet from_episodes(std::span<const mdp::Episode> episodes);
};

Vector to_vector(const mdp::StateVector& state);

/// Initial states of the episodes, one per column.
Matrix initial_states(std::span<const mdp::Episode> episodes);

/// Uniform sampling with replacement; the whole set, in order, when
/// batch_size >= data.size().
TransitionSet sample_batch(const TransitionSet& data, std::size_t batch_size, Rng& rng);

}  // namespace cdqn::agents
