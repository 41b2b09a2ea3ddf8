#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cdqn/eval/fqe.hpp"
#include "cdqn/mdp/episode.hpp"

namespace cdqn::eval {

/// Mean and population standard deviation.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Throws DataError on empty input.
MeanStd mean_std(std::span<const double> values);

/// Q_fqe(s0, policy(s0)) over the initial states (one per column).
MeanStd initial_value(const FqeModel& model, const BatchPolicy& policy, const Matrix& initial_states);

/// Throws DataError on length mismatch, fewer than 2 points, or zero
/// variance in either variable.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson r between Q_fqe(s0, a0) with the logged initial action and the
/// 0/1 mortality indicator of each episode.
double mortality_correlation(const FqeModel& model, std::span<const mdp::Episode> episodes);

inline constexpr int kSurvivalBins = 10;

/// Equal-width binning of the physician initial values; the survival rate of
/// the bin holding `policy_value` as a percentage. Values outside the range
/// clamp to the edge bins; empty bins take rates linearly interpolated
/// between their nearest non-empty neighbours (or copied at the ends).
/// Throws DataError when all values coincide or inputs are misaligned.
double survival_mapping(std::span<const double> physician_values, const std::vector<bool>& survived,
                        double policy_value, int n_bins = kSurvivalBins);

/// Per-bin survival rates in [0, 1] after interpolation, for inspection.
std::vector<double> survival_bin_rates(std::span<const double> physician_values, const std::vector<bool>& survived,
                                       int n_bins = kSurvivalBins);

/// Level counts per ventilator dimension: [0] = vt, [1] = peep, [2] = fio2.
struct ActionHistogram {
  std::array<std::array<std::size_t, 7>, 3> counts{};
  std::size_t total = 0;
};

ActionHistogram action_distribution(std::span<const int> actions);
ActionHistogram action_distribution(const BatchPolicy& policy, const Matrix& states);

inline constexpr double kOverestimationThreshold = 1.0;

/// An agent for the ID/OOD comparison: greedy Q-network, optionally with
/// conformal filtering through a policy network and threshold.
struct OodAgent {
  std::string name;
  const nn::DenseNetwork* q = nullptr;
  BatchPolicy selection;  // empty: greedy argmax
};

struct OodRow {
  std::string name;
  double id_max_q = 0.0;     // mean over states of max_a Q(s, a)
  double ood_max_q = 0.0;
  double id_policy_q = 0.0;  // mean of Q(s, selection(s))
  double ood_policy_q = 0.0;
  bool id_flag = false;      // id_max_q > threshold
  bool ood_flag = false;
};

std::vector<OodRow> ood_q_comparison(const std::vector<OodAgent>& agents, const Matrix& id_states,
                                     const Matrix& ood_states);

}  // namespace cdqn::eval
