#include "cdqn/agents/losses.hpp"

#include <cmath>
#include <sstream>

#include "cdqn/error.hpp"
#include "cdqn/nn/ops.hpp"

namespace cdqn::agents {

namespace {

void require_batch(const TransitionSet& batch) {
  if (batch.size() == 0) throw DataError("empty batch");
  batch.validate();
}

void require_actions(std::span<const int> actions, Eigen::Index n_actions) {
  for (int a : actions) {
    if (a < 0 || a >= n_actions) throw DomainError("logged action outside the network's action range");
  }
}

}  // namespace

namespace detail {

double td_terms(const Matrix& q_values, std::span<const int> actions, const Vector& targets, Matrix& output_grad) {
  const auto n = static_cast<double>(actions.size());
  output_grad.setZero(q_values.rows(), q_values.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < q_values.cols(); ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    const double residual = q_values(a, i) - targets(i);
    loss += residual * residual;
    output_grad(a, i) = 2.0 * residual / n;
  }
  return loss / n;
}

double cql_terms(const Matrix& q_values, std::span<const int> actions, double weight, Matrix& output_grad) {
  const auto n = static_cast<double>(actions.size());
  const Vector lse = nn::logsumexp_columns(q_values);
  double total = 0.0;
  output_grad.resize(q_values.rows(), q_values.cols());
  for (Eigen::Index i = 0; i < q_values.cols(); ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    total += lse(i) - q_values(a, i);
    output_grad.col(i) = (weight / n) * (q_values.col(i).array() - lse(i)).exp();
    output_grad(a, i) -= weight / n;
  }
  return weight * total / n;
}

double nll_terms(const Matrix& logits, std::span<const int> actions, Matrix& output_grad) {
  const auto n = static_cast<double>(actions.size());
  const Vector lse = nn::logsumexp_columns(logits);
  double total = 0.0;
  output_grad.resize(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.cols(); ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    total += lse(i) - logits(a, i);
    output_grad.col(i) = (logits.col(i).array() - lse(i)).exp() / n;
    output_grad(a, i) -= 1.0 / n;
  }
  return total / n;
}

double l2_terms(const Matrix& logits, double coeff, Matrix& output_grad) {
  const auto n = static_cast<double>(logits.cols());
  output_grad = (2.0 * coeff / n) * logits;
  return coeff * logits.squaredNorm() / n;
}

}  // namespace detail

Vector ddqn_target(const TransitionSet& batch, const QNetworkPair& pair, double gamma) {
  require_batch(batch);
  const Matrix q_select = pair.prediction.forward(batch.next_states);
  const Matrix q_eval = pair.target.forward(batch.next_states);
  Vector targets = batch.rewards;
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    if (batch.done[static_cast<std::size_t>(i)]) continue;
    const Eigen::Index best = nn::argmax(q_select.col(i));
    targets(i) += gamma * q_eval(best, i);
  }
  return targets;
}

LossResult td_loss(const TransitionSet& batch, const QNetworkPair& pair, double gamma) {
  require_batch(batch);
  require_actions(batch.actions, pair.prediction.output_size());
  const Vector targets = ddqn_target(batch, pair, gamma);
  nn::ForwardCache cache;
  const Matrix q = pair.prediction.forward(batch.states, cache);
  Matrix output_grad;
  const double loss = detail::td_terms(q, batch.actions, targets, output_grad);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite TD loss on a batch of " << batch.size() << " (max |target| "
        << targets.cwiseAbs().maxCoeff() << ", max |Q| " << q.cwiseAbs().maxCoeff() << ")";
    throw NumericError(msg.str());
  }
  return {loss, pair.prediction.backward(cache, output_grad)};
}

double cql_penalty(const TransitionSet& batch, const nn::DenseNetwork& qnet, double weight) {
  require_batch(batch);
  require_actions(batch.actions, qnet.output_size());
  if (!(weight >= 0.0)) throw ConfigError("CQL weight must be non-negative");
  Matrix unused;
  return detail::cql_terms(qnet.forward(batch.states), batch.actions, weight, unused);
}

LossResult cql_penalty_with_gradient(const TransitionSet& batch, const nn::DenseNetwork& qnet, double weight) {
  require_batch(batch);
  require_actions(batch.actions, qnet.output_size());
  if (!(weight >= 0.0)) throw ConfigError("CQL weight must be non-negative");
  nn::ForwardCache cache;
  const Matrix q = qnet.forward(batch.states, cache);
  Matrix output_grad;
  const double penalty = detail::cql_terms(q, batch.actions, weight, output_grad);
  return {penalty, qnet.backward(cache, output_grad)};
}

LossResult nll_loss(const TransitionSet& batch, const PolicyNet& pnet) {
  require_batch(batch);
  require_actions(batch.actions, pnet.net.output_size());
  nn::ForwardCache cache;
  const Matrix logits = pnet.net.forward(batch.states, cache);
  Matrix output_grad;
  const double loss = detail::nll_terms(logits, batch.actions, output_grad);
  return {loss, pnet.net.backward(cache, output_grad)};
}

double logit_l2(const TransitionSet& batch, const PolicyNet& pnet, double coeff) {
  require_batch(batch);
  Matrix unused;
  return detail::l2_terms(pnet.net.forward(batch.states), coeff, unused);
}

CompositeLoss composite_loss(const TransitionSet& batch, const QNetworkPair& pair, const PolicyNet& pnet,
                             double gamma, double logit_l2_coeff) {
  CompositeLoss out;
  LossResult td = td_loss(batch, pair, gamma);
  out.td = td.loss;
  out.q_grads = std::move(td.grads);

  require_actions(batch.actions, pnet.net.output_size());
  nn::ForwardCache cache;
  const Matrix logits = pnet.net.forward(batch.states, cache);
  Matrix nll_grad;
  Matrix l2_grad;
  out.nll = detail::nll_terms(logits, batch.actions, nll_grad);
  out.l2 = detail::l2_terms(logits, logit_l2_coeff, l2_grad);
  out.p_grads = pnet.net.backward(cache, nll_grad + l2_grad);
  out.total = out.td + out.nll + out.l2;
  return out;
}

int greedy_action(const nn::DenseNetwork& qnet, const Vector& state) {
  return static_cast<int>(nn::argmax(qnet.forward(state)));
}

std::vector<int> greedy_actions(const nn::DenseNetwork& qnet, const Matrix& states) {
  const Matrix q = qnet.forward(states);
  std::vector<int> actions(static_cast<std::size_t>(q.cols()));
  for (Eigen::Index i = 0; i < q.cols(); ++i) actions[static_cast<std::size_t>(i)] = static_cast<int>(nn::argmax(q.col(i)));
  return actions;
}

}  // namespace cdqn::agents
