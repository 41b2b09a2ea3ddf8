#include "cdqn/nn/adam.hpp"

#include <cmath>
#include <string>

#include "cdqn/error.hpp"

namespace cdqn::nn {

AdamState AdamState::for_network(const DenseNetwork& net) {
  AdamState state;
  state.first_moment = net.zero_gradients();
  state.second_moment = net.zero_gradients();
  return state;
}

void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state, double learning_rate) {
  const std::size_t layers = net.num_layers();
  if (grads.weights.size() != layers || grads.biases.size() != layers ||
      state.first_moment.weights.size() != layers || state.second_moment.weights.size() != layers) {
    throw ShapeError("gradient/optimizer layer count does not match the network");
  }
  for (std::size_t k = 0; k < layers; ++k) {
    const Matrix& w = net.weights(k);
    if (grads.weights[k].rows() != w.rows() || grads.weights[k].cols() != w.cols() ||
        grads.biases[k].size() != w.rows() || state.first_moment.weights[k].rows() != w.rows() ||
        state.first_moment.weights[k].cols() != w.cols()) {
      throw ShapeError("gradient shape mismatch at layer " + std::to_string(k));
    }
    if (!grads.weights[k].allFinite() || !grads.biases[k].allFinite()) {
      throw NumericError("non-finite gradient at layer " + std::to_string(k), k);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.epsilon;

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + eps);
  };

  for (std::size_t k = 0; k < layers; ++k) {
    update(net.weights(k), grads.weights[k], state.first_moment.weights[k], state.second_moment.weights[k]);
    update(net.biases(k), grads.biases[k], state.first_moment.biases[k], state.second_moment.biases[k]);
  }
}

}  // namespace cdqn::nn
