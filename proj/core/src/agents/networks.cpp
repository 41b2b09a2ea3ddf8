#include "cdqn/agents/networks.hpp"

#include "cdqn/nn/ops.hpp"

namespace cdqn::agents {

std::vector<int> layer_sizes(int state_dim, const std::vector<int>& hidden, int n_actions) {
  std::vector<int> sizes;
  sizes.reserve(hidden.size() + 2);
  sizes.push_back(state_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(n_actions);
  return sizes;
}

QNetworkPair QNetworkPair::create(const std::vector<int>& sizes, std::uint64_t seed, int sync_interval) {
  QNetworkPair pair;
  pair.prediction = nn::init_network(sizes, seed);
  pair.target = pair.prediction;
  pair.sync_interval = sync_interval;
  return pair;
}

nn::Matrix PolicyNet::probabilities(const nn::Matrix& states) const {
  return nn::softmax_columns(net.forward(states));
}

nn::Vector PolicyNet::probabilities(const nn::Vector& state) const { return nn::softmax(net.forward(state)); }

}  // namespace cdqn::agents
