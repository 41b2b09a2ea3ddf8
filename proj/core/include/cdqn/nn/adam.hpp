#pragma once

#include <cstdint>

#include "cdqn/nn/network.hpp"

namespace cdqn::nn {

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_network(const DenseNetwork& net);
};

/// Bias-corrected Adam update of `net` in place. Throws NumericError naming
/// the first layer with a non-finite gradient; nothing is modified in that case.
void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state, double learning_rate);

}  // namespace cdqn::nn
