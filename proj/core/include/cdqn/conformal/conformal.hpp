#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "cdqn/agents/networks.hpp"
#include "cdqn/agents/transition_set.hpp"

namespace cdqn::conformal {

using nn::Matrix;
using nn::Vector;

/// Split-conformal calibration of the behavioral policy network.
struct CalibrationResult {
  std::vector<double> scores;  // ascending nonconformity scores
  double alpha = 0.15;
  double tau = 1.0;
  std::size_t n = 0;
};

/// 1 - P(action | state).
double nonconformity(const agents::PolicyNet& pnet, const Vector& state, int action);

/// ceil((n + 1)(1 - alpha)), evaluated with a 1e-9 guard so that products
/// such as 20 * 0.9 round to the intended integer.
std::size_t conformal_rank(std::size_t n, double alpha);

/// k-th smallest of `sorted_scores` for k = conformal_rank(n, alpha), or 1.0
/// when k > n. Throws DataError on an empty list.
double conformal_threshold(std::span<const double> sorted_scores, double alpha);

/// Sorts `scores` and applies conformal_threshold.
CalibrationResult calibrate_scores(std::vector<double> scores, double alpha);

/// Scores every calibration transition and computes tau.
CalibrationResult calibrate(const agents::PolicyNet& pnet, const agents::TransitionSet& calibration, double alpha);

/// Recomputes tau at a new alpha from the stored scores; no network access.
CalibrationResult retune_threshold(const CalibrationResult& result, double alpha);

/// {a : probs(a) >= 1 - tau}, ascending.
std::vector<int> confident_set(const Vector& probs, double tau);
std::vector<int> prediction_set(const agents::PolicyNet& pnet, const Vector& state, double tau);

/// argmax of q within confident_set(probs, tau), or the global argmax when
/// that set is empty; ties go to the lowest index.
int select_action(const Vector& q_values, const Vector& probs, double tau);
int select_action(const nn::DenseNetwork& qnet, const agents::PolicyNet& pnet, const Vector& state, double tau);
std::vector<int> select_actions(const nn::DenseNetwork& qnet, const agents::PolicyNet& pnet, const Matrix& states,
                                double tau);

/// Fraction of transitions whose logged action lies in the prediction set.
double empirical_coverage(const agents::PolicyNet& pnet, double tau, const agents::TransitionSet& test);

// Calibration artifact, JSON:
//   {"format": "cdqn-calibration", "version": 1, "alpha": .., "n": .., "tau": .., "scores": [...]}
void save_calibration(const std::filesystem::path& path, const CalibrationResult& result);
CalibrationResult load_calibration(const std::filesystem::path& path);

}  // namespace cdqn::conformal
