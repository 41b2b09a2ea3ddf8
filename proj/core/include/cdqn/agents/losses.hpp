#pragma once

#include <span>

#include "cdqn/agents/networks.hpp"
#include "cdqn/agents/transition_set.hpp"

namespace cdqn::agents {

struct LossResult {
  double loss = 0.0;
  nn::Gradients grads;
};

/// Double-DQN regression targets: r for terminal transitions, otherwise
/// r + gamma * Q_target(s', argmax_a Q_prediction(s', a)).
Vector ddqn_target(const TransitionSet& batch, const QNetworkPair& pair, double gamma);

/// Mean squared TD error against ddqn_target; gradients reach only
/// Q_prediction(s_t, a_t) (targets are constants).
LossResult td_loss(const TransitionSet& batch, const QNetworkPair& pair, double gamma);

/// weight * mean_s [logsumexp_a Q(s, a) - Q(s, a_data)].
double cql_penalty(const TransitionSet& batch, const nn::DenseNetwork& qnet, double weight);
LossResult cql_penalty_with_gradient(const TransitionSet& batch, const nn::DenseNetwork& qnet, double weight);

/// Mean negative log-likelihood of the logged actions under the policy net.
LossResult nll_loss(const TransitionSet& batch, const PolicyNet& pnet);

/// coeff * mean over states of the summed squared logits.
double logit_l2(const TransitionSet& batch, const PolicyNet& pnet, double coeff);

struct CompositeLoss {
  double total = 0.0;
  double td = 0.0;
  double nll = 0.0;
  double l2 = 0.0;
  nn::Gradients q_grads;  // for pair.prediction
  nn::Gradients p_grads;  // for pnet.net
};

/// td_loss + nll_loss + logit_l2. The Q pair and the policy net share no
/// parameters, so each gradient set involves only its own terms.
CompositeLoss composite_loss(const TransitionSet& batch, const QNetworkPair& pair, const PolicyNet& pnet,
                             double gamma, double logit_l2_coeff);

/// argmax_a Q(s, a), ties to the lowest index.
int greedy_action(const nn::DenseNetwork& qnet, const Vector& state);
std::vector<int> greedy_actions(const nn::DenseNetwork& qnet, const Matrix& states);

namespace detail {

// Loss terms evaluated on precomputed network outputs, returning d loss / d output.
double td_terms(const Matrix& q_values, std::span<const int> actions, const Vector& targets, Matrix& output_grad);
double cql_terms(const Matrix& q_values, std::span<const int> actions, double weight, Matrix& output_grad);
double nll_terms(const Matrix& logits, std::span<const int> actions, Matrix& output_grad);
double l2_terms(const Matrix& logits, double coeff, Matrix& output_grad);

}  // namespace detail

}  // namespace cdqn::agents
