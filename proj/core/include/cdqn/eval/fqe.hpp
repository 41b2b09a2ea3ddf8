#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "cdqn/agents/trainer.hpp"
#include "cdqn/agents/transition_set.hpp"
#include "cdqn/nn/network.hpp"

namespace cdqn::eval {

using nn::Matrix;
using nn::Vector;

/// How the evaluated action enters the FQE network input.
enum class ActionEncoding {
  kOneHot,    // n_actions indicator columns
  kFactored,  // 3 x 7 indicators over (vt, peep, fio2); requires 343 actions
};

std::string_view to_string(ActionEncoding encoding) noexcept;
ActionEncoding parse_action_encoding(std::string_view name);

struct FqeConfig {
  double gamma = 1.0;
  int iterations = 20;
  int steps_per_iteration = 250;
  double learning_rate = 1e-3;
  int batch_size = 256;
  std::vector<int> hidden_layers{64, 64};
  int n_actions = 343;
  ActionEncoding encoding = ActionEncoding::kFactored;
  bool clip_targets = true;     // regression targets clipped to [-1, 1]
  bool sparse_rewards = true;   // zero every non-terminal reward before fitting
  std::uint64_t seed = 0;
  double divergence_threshold = 1e6;

  void validate() const;
};

/// Fitted action-value function Q(s, a) -> scalar.
struct FqeModel {
  nn::DenseNetwork net;
  ActionEncoding encoding = ActionEncoding::kFactored;
  int n_actions = 343;
  int state_dim = 0;
  bool clip_outputs = true;  // clamp values to [-1, 1], set from FqeConfig::clip_targets

  /// One value per column of `states`, paired with actions[i].
  Vector values(const Matrix& states, const std::vector<int>& actions) const;
  double value(const Vector& state, int action) const;
};

/// Network input rows: state features followed by the action encoding.
Matrix encode_inputs(const Matrix& states, const std::vector<int>& actions, ActionEncoding encoding, int n_actions);
int encoding_width(ActionEncoding encoding, int n_actions);

/// Deterministic policy evaluated on a batch of states (one per column).
using BatchPolicy = std::function<std::vector<int>(const Matrix& states)>;

/// Iterative regression Q_k(s, a) <- r + gamma * Q_{k-1}(s', next_actions)
/// on logged transitions; terminal targets are r alone. `next_actions[i]` is
/// the evaluated policy's action at next_states column i (ignored when done).
/// The network is trained continuously; each iteration regresses on targets
/// from a frozen copy of the previous iterate.
FqeModel fqe_train(const agents::TransitionSet& data, const std::vector<int>& next_actions, const FqeConfig& cfg);

/// Same, with next actions computed by `policy`.
FqeModel fqe_train(const agents::TransitionSet& data, const BatchPolicy& policy, const FqeConfig& cfg);

/// Evaluates the logged (behavioral) actions: next actions are the logged
/// actions of the following windows.
FqeModel fqe_train_logged(const agents::TransitionSet& data, const FqeConfig& cfg);

}  // namespace cdqn::eval
