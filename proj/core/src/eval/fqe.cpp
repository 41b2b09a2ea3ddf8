#include "cdqn/eval/fqe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdqn/error.hpp"
#include "cdqn/mdp/action.hpp"
#include "cdqn/nn/adam.hpp"
#include "cdqn/rng.hpp"

namespace cdqn::eval {

std::string_view to_string(ActionEncoding encoding) noexcept {
  return encoding == ActionEncoding::kOneHot ? "one_hot" : "factored";
}

ActionEncoding parse_action_encoding(std::string_view name) {
  if (name == "one_hot") return ActionEncoding::kOneHot;
  if (name == "factored") return ActionEncoding::kFactored;
  throw ConfigError("unknown action encoding '" + std::string(name) + "' (expected one_hot or factored)");
}

void FqeConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("fqe gamma must lie in [0, 1]");
  if (iterations < 1 || steps_per_iteration < 1) throw ConfigError("fqe iterations and steps must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("fqe learning_rate must be >= 0");
  if (batch_size < 1) throw ConfigError("fqe batch_size must be positive");
  if (n_actions < 1) throw ConfigError("fqe n_actions must be positive");
  if (encoding == ActionEncoding::kFactored && n_actions != mdp::kNumActions) {
    throw ConfigError("factored action encoding needs exactly 343 actions");
  }
  for (int h : hidden_layers) {
    if (h < 1) throw ConfigError("fqe hidden layer sizes must be positive");
  }
  if (!(divergence_threshold > 0.0)) throw ConfigError("fqe divergence_threshold must be positive");
}

int encoding_width(ActionEncoding encoding, int n_actions) {
  return encoding == ActionEncoding::kOneHot ? n_actions : 3 * mdp::kLevels;
}

Matrix encode_inputs(const Matrix& states, const std::vector<int>& actions, ActionEncoding encoding, int n_actions) {
  if (static_cast<std::size_t>(states.cols()) != actions.size()) {
    throw ShapeError("encode_inputs: " + std::to_string(states.cols()) + " states but " +
                     std::to_string(actions.size()) + " actions");
  }
  const Eigen::Index d = states.rows();
  Matrix x = Matrix::Zero(d + encoding_width(encoding, n_actions), states.cols());
  x.topRows(d) = states;
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= n_actions) throw DomainError("action " + std::to_string(a) + " outside [0, n_actions)");
    if (encoding == ActionEncoding::kOneHot) {
      x(d + a, i) = 1.0;
    } else {
      const mdp::ActionTriple t = mdp::decode_action(a);
      x(d + t.vt, i) = 1.0;
      x(d + mdp::kLevels + t.peep, i) = 1.0;
      x(d + 2 * mdp::kLevels + t.fio2, i) = 1.0;
    }
  }
  return x;
}

Vector FqeModel::values(const Matrix& states, const std::vector<int>& actions) const {
  if (states.rows() != state_dim) throw ShapeError("FQE model expects " + std::to_string(state_dim) + " features");
  Vector v = net.forward(encode_inputs(states, actions, encoding, n_actions)).row(0).transpose();
  if (clip_outputs) v = v.cwiseMax(-1.0).cwiseMin(1.0);
  return v;
}

double FqeModel::value(const Vector& state, int action) const {
  return values(Matrix(state), std::vector<int>{action})(0);
}

FqeModel fqe_train(const agents::TransitionSet& raw, const std::vector<int>& next_actions, const FqeConfig& cfg) {
  cfg.validate();
  raw.validate();
  if (raw.size() == 0) throw DataError("FQE needs a non-empty transition set");
  if (next_actions.size() != raw.size()) throw ShapeError("FQE needs one next action per transition");

  const agents::TransitionSet data = cfg.sparse_rewards ? raw.with_sparse_rewards() : raw;
  const std::size_t n = data.size();

  // Terminal columns keep a valid placeholder action; their bootstrap term is dropped.
  std::vector<int> bootstrap_actions(next_actions);
  for (std::size_t i = 0; i < n; ++i) {
    if (data.done[i]) bootstrap_actions[i] = 0;
  }
  const Matrix inputs = encode_inputs(data.states, data.actions, cfg.encoding, cfg.n_actions);
  const Matrix next_inputs = encode_inputs(data.next_states, bootstrap_actions, cfg.encoding, cfg.n_actions);

  std::vector<int> sizes{static_cast<int>(inputs.rows())};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(1);

  FqeModel model{nn::init_network(sizes, derive_seed(cfg.seed, "fqe-network")), cfg.encoding, cfg.n_actions,
                 data.state_dim(), cfg.clip_targets};
  nn::DenseNetwork frozen = model.net;
  nn::AdamState opt = nn::AdamState::for_network(model.net);
  Rng rng(derive_seed(cfg.seed, "fqe-batches"));

  const bool full_batch = static_cast<std::size_t>(cfg.batch_size) >= n;
  const Eigen::Index b = full_batch ? static_cast<Eigen::Index>(n) : cfg.batch_size;
  Matrix batch_x(inputs.rows(), b);
  Vector batch_y(b);
  std::vector<agents::TrainingRecord> history;
  int global_step = 0;

  for (int it = 0; it < cfg.iterations; ++it) {
    nn::copy_weights(model.net, frozen);
    const Vector bootstrap = frozen.forward(next_inputs).row(0).transpose();
    Vector targets(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      double y = data.rewards(k);
      if (!data.done[i]) y += cfg.gamma * bootstrap(k);
      targets(k) = cfg.clip_targets ? std::clamp(y, -1.0, 1.0) : y;
    }

    for (int s = 0; s < cfg.steps_per_iteration; ++s) {
      ++global_step;
      if (full_batch) {
        batch_x = inputs;
        batch_y = targets;
      } else {
        for (Eigen::Index j = 0; j < b; ++j) {
          const auto c = static_cast<Eigen::Index>(rng.uniform_index(n));
          batch_x.col(j) = inputs.col(c);
          batch_y(j) = targets(c);
        }
      }
      nn::ForwardCache cache;
      const Matrix pred = model.net.forward(batch_x, cache);
      const Vector residual = pred.row(0).transpose() - batch_y;
      const double loss = residual.squaredNorm() / static_cast<double>(b);
      history.push_back({global_step, loss, loss, 0.0, 0.0});
      if (!std::isfinite(loss) || loss > cfg.divergence_threshold) {
        throw agents::DivergenceError("FQE diverged at step " + std::to_string(global_step), std::move(history));
      }
      const Matrix grad = (2.0 / static_cast<double>(b)) * residual.transpose();
      try {
        nn::adam_step(model.net, model.net.backward(cache, grad), opt, cfg.learning_rate);
      } catch (const NumericError& e) {
        throw agents::DivergenceError(std::string("FQE diverged: ") + e.what(), std::move(history));
      }
    }
  }
  return model;
}

FqeModel fqe_train(const agents::TransitionSet& data, const BatchPolicy& policy, const FqeConfig& cfg) {
  if (!policy) throw UsageError("FQE needs a policy");
  std::vector<int> next = policy(data.next_states);
  if (next.size() != data.size()) throw ShapeError("policy returned the wrong number of actions");
  return fqe_train(data, next, cfg);
}

FqeModel fqe_train_logged(const agents::TransitionSet& data, const FqeConfig& cfg) {
  std::vector<int> next(data.next_actions);
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (data.done[i]) next[i] = 0;
  }
  return fqe_train(data, next, cfg);
}

}  // namespace cdqn::eval
