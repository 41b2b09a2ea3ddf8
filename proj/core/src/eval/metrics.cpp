#include "cdqn/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdqn/agents/transition_set.hpp"
#include "cdqn/error.hpp"
#include "cdqn/mdp/action.hpp"

namespace cdqn::eval {

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw DataError("mean_std of an empty list");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

MeanStd initial_value(const FqeModel& model, const BatchPolicy& policy, const Matrix& initial_states) {
  if (initial_states.cols() == 0) throw DataError("initial_value needs at least one initial state");
  if (!policy) throw UsageError("initial_value needs a policy");
  const Vector q = model.values(initial_states, policy(initial_states));
  return mean_std(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson: inputs differ in length");
  if (x.size() < 2) throw DataError("pearson: need at least two points");
  const MeanStd mx = mean_std(x);
  const MeanStd my = mean_std(y);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx.mean;
    const double dy = y[i] - my.mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DataError("pearson: correlation undefined for a constant variable");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double mortality_correlation(const FqeModel& model, std::span<const mdp::Episode> episodes) {
  if (episodes.size() < 2) throw DataError("mortality correlation needs at least two episodes");
  const Matrix s0 = agents::initial_states(episodes);
  std::vector<int> a0;
  std::vector<double> mortality;
  a0.reserve(episodes.size());
  for (const auto& ep : episodes) {
    a0.push_back(mdp::encode_action(ep.windows.front().action).value());
    mortality.push_back(ep.survived_90d ? 0.0 : 1.0);
  }
  const Vector q = model.values(s0, a0);
  return pearson(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), mortality);
}

namespace {

struct Binning {
  double lo = 0.0;
  double width = 0.0;
  int n_bins = 0;

  int bin_of(double v) const {
    const int k = static_cast<int>(std::floor((v - lo) / width));
    return std::clamp(k, 0, n_bins - 1);
  }
};

Binning make_binning(std::span<const double> values, int n_bins) {
  if (n_bins < 2) throw DataError("survival mapping needs at least two bins");
  if (values.empty()) throw DataError("survival mapping needs physician values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) throw DataError("survival mapping: non-finite physician value");
  if (!(*hi > *lo)) throw DataError("survival mapping: all physician values identical");
  return {*lo, (*hi - *lo) / n_bins, n_bins};
}

}  // namespace

std::vector<double> survival_bin_rates(std::span<const double> physician_values, const std::vector<bool>& survived,
                                       int n_bins) {
  if (physician_values.size() != survived.size()) throw DataError("survival mapping: inputs differ in length");
  const Binning bins = make_binning(physician_values, n_bins);
  std::vector<double> alive(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> total(static_cast<std::size_t>(n_bins), 0.0);
  for (std::size_t i = 0; i < physician_values.size(); ++i) {
    const auto k = static_cast<std::size_t>(bins.bin_of(physician_values[i]));
    total[k] += 1.0;
    if (survived[i]) alive[k] += 1.0;
  }
  std::vector<int> filled;
  std::vector<double> rates(static_cast<std::size_t>(n_bins), 0.0);
  for (int k = 0; k < n_bins; ++k) {
    const auto u = static_cast<std::size_t>(k);
    if (total[u] > 0.0) {
      rates[u] = alive[u] / total[u];
      filled.push_back(k);
    }
  }
  // The minimum and maximum always land in the first and last bins.
  for (std::size_t f = 0; f + 1 < filled.size(); ++f) {
    const int a = filled[f];
    const int b = filled[f + 1];
    for (int k = a + 1; k < b; ++k) {
      const double t = static_cast<double>(k - a) / static_cast<double>(b - a);
      rates[static_cast<std::size_t>(k)] =
          (1.0 - t) * rates[static_cast<std::size_t>(a)] + t * rates[static_cast<std::size_t>(b)];
    }
  }
  return rates;
}

double survival_mapping(std::span<const double> physician_values, const std::vector<bool>& survived,
                        double policy_value, int n_bins) {
  if (!std::isfinite(policy_value)) throw DataError("survival mapping: non-finite policy value");
  const std::vector<double> rates = survival_bin_rates(physician_values, survived, n_bins);
  const Binning bins = make_binning(physician_values, n_bins);
  return 100.0 * rates[static_cast<std::size_t>(bins.bin_of(policy_value))];
}

ActionHistogram action_distribution(std::span<const int> actions) {
  ActionHistogram h;
  for (int a : actions) {
    const mdp::ActionTriple t = mdp::decode_action(a);
    ++h.counts[0][static_cast<std::size_t>(t.vt)];
    ++h.counts[1][static_cast<std::size_t>(t.peep)];
    ++h.counts[2][static_cast<std::size_t>(t.fio2)];
    ++h.total;
  }
  return h;
}

ActionHistogram action_distribution(const BatchPolicy& policy, const Matrix& states) {
  if (!policy) throw UsageError("action_distribution needs a policy");
  const std::vector<int> actions = policy(states);
  if (actions.size() != static_cast<std::size_t>(states.cols())) {
    throw ShapeError("policy returned the wrong number of actions");
  }
  return action_distribution(actions);
}

namespace {

struct RegimeMeans {
  double max_q = 0.0;
  double policy_q = 0.0;
};

RegimeMeans regime_means(const OodAgent& agent, const Matrix& states) {
  const Matrix q = agent.q->forward(states);
  double max_sum = 0.0;
  double policy_sum = 0.0;
  std::vector<int> chosen;
  if (agent.selection) {
    chosen = agent.selection(states);
    if (chosen.size() != static_cast<std::size_t>(states.cols())) {
      throw ShapeError("selection returned the wrong number of actions");
    }
  }
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double best = q.col(i).maxCoeff();
    max_sum += best;
    if (agent.selection) {
      const int a = chosen[static_cast<std::size_t>(i)];
      if (a < 0 || a >= q.rows()) throw DomainError("selection returned an out-of-range action");
      policy_sum += q(a, i);
    } else {
      policy_sum += best;
    }
  }
  const double n = static_cast<double>(q.cols());
  return {max_sum / n, policy_sum / n};
}

}  // namespace

std::vector<OodRow> ood_q_comparison(const std::vector<OodAgent>& agents, const Matrix& id_states,
                                     const Matrix& ood_states) {
  if (id_states.cols() == 0 || ood_states.cols() == 0) throw DataError("ID and OOD state sets must be non-empty");
  std::vector<OodRow> rows;
  rows.reserve(agents.size());
  for (const auto& agent : agents) {
    if (agent.q == nullptr) throw UsageError("OOD comparison agent '" + agent.name + "' has no Q-network");
    const RegimeMeans id = regime_means(agent, id_states);
    const RegimeMeans ood = regime_means(agent, ood_states);
    OodRow row;
    row.name = agent.name;
    row.id_max_q = id.max_q;
    row.ood_max_q = ood.max_q;
    row.id_policy_q = id.policy_q;
    row.ood_policy_q = ood.policy_q;
    row.id_flag = id.max_q > kOverestimationThreshold;
    row.ood_flag = ood.max_q > kOverestimationThreshold;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cdqn::eval
