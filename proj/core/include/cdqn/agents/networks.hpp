#pragma once

#include <cstdint>
#include <vector>

#include "cdqn/nn/network.hpp"

namespace cdqn::agents {

/// state_dim, hidden..., n_actions.
std::vector<int> layer_sizes(int state_dim, const std::vector<int>& hidden, int n_actions);

/// Prediction and target Q-networks with identical architectures.
struct QNetworkPair {
  nn::DenseNetwork prediction;
  nn::DenseNetwork target;
  int sync_interval = 5000;

  /// Fresh prediction network; the target starts as an exact copy.
  static QNetworkPair create(const std::vector<int>& sizes, std::uint64_t seed, int sync_interval);

  void sync() { nn::copy_weights(prediction, target); }
};

/// Behavioral probability network P(a|s): logits -> softmax.
struct PolicyNet {
  nn::DenseNetwork net;

  nn::Matrix logits(const nn::Matrix& states) const { return net.forward(states); }
  nn::Matrix probabilities(const nn::Matrix& states) const;
  nn::Vector probabilities(const nn::Vector& state) const;
};

}  // namespace cdqn::agents
