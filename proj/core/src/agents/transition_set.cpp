#include "cdqn/agents/transition_set.hpp"

#include "cdqn/error.hpp"

namespace cdqn::agents {

void TransitionSet::validate() const {
  const auto n = static_cast<Eigen::Index>(actions.size());
  if (states.cols() != n || next_states.cols() != n || rewards.size() != n ||
      done.size() != actions.size() || next_actions.size() != actions.size() ||
      next_states.rows() != states.rows()) {
    throw ShapeError("transition set members have inconsistent sizes");
  }
}

TransitionSet TransitionSet::subset(std::span<const std::size_t> columns) const {
  TransitionSet out;
  const auto n = static_cast<Eigen::Index>(columns.size());
  out.states.resize(states.rows(), n);
  out.next_states.resize(states.rows(), n);
  out.rewards.resize(n);
  out.actions.resize(columns.size());
  out.done.resize(columns.size());
  out.next_actions.resize(columns.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(columns[static_cast<std::size_t>(i)]);
    if (c >= states.cols()) throw ShapeError("transition index out of range");
    out.states.col(i) = states.col(c);
    out.next_states.col(i) = next_states.col(c);
    out.rewards(i) = rewards(c);
    out.actions[static_cast<std::size_t>(i)] = actions[static_cast<std::size_t>(c)];
    out.done[static_cast<std::size_t>(i)] = done[static_cast<std::size_t>(c)];
    out.next_actions[static_cast<std::size_t>(i)] = next_actions[static_cast<std::size_t>(c)];
  }
  return out;
}

TransitionSet TransitionSet::with_sparse_rewards() const {
  TransitionSet out = *this;
  for (std::size_t i = 0; i < done.size(); ++i) {
    if (!done[i]) out.rewards(static_cast<Eigen::Index>(i)) = 0.0;
  }
  return out;
}

Vector to_vector(const mdp::StateVector& state) {
  return Eigen::Map<const Vector>(state.values.data(), static_cast<Eigen::Index>(state.values.size()));
}

TransitionSet TransitionSet::from_episodes(std::span<const mdp::Episode> episodes) {
  std::size_t total = 0;
  for (const auto& ep : episodes) total += ep.windows.size();
  TransitionSet out;
  const auto n = static_cast<Eigen::Index>(total);
  out.states.resize(mdp::kStateDim, n);
  out.next_states.resize(mdp::kStateDim, n);
  out.rewards.resize(n);
  out.actions.reserve(total);
  out.done.reserve(total);
  out.next_actions.reserve(total);
  Eigen::Index col = 0;
  for (const auto& ep : episodes) {
    for (std::size_t t = 0; t < ep.windows.size(); ++t) {
      const mdp::Transition tr = ep.transition(t);
      if (!tr.state.all_finite()) throw DataError("transition states must be imputed before training");
      out.states.col(col) = to_vector(tr.state);
      out.next_states.col(col) = to_vector(tr.next_state);
      out.rewards(col) = tr.reward;
      out.actions.push_back(tr.action.value());
      out.done.push_back(tr.done ? 1 : 0);
      out.next_actions.push_back(tr.done ? -1 : mdp::encode_action(ep.windows[t + 1].action).value());
      ++col;
    }
  }
  return out;
}

Matrix initial_states(std::span<const mdp::Episode> episodes) {
  Matrix out(mdp::kStateDim, static_cast<Eigen::Index>(episodes.size()));
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    out.col(static_cast<Eigen::Index>(e)) = to_vector(episodes[e].initial_state());
  }
  return out;
}

TransitionSet sample_batch(const TransitionSet& data, std::size_t batch_size, Rng& rng) {
  if (data.size() == 0) throw DataError("cannot sample from an empty transition set");
  if (batch_size >= data.size()) return data;
  std::vector<std::size_t> columns(batch_size);
  for (auto& c : columns) c = rng.uniform_index(data.size());
  return data.subset(columns);
}

}  // namespace cdqn::agents
