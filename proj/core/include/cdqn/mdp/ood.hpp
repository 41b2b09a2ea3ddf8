#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdqn/mdp/episode.hpp"

namespace cdqn::mdp {

struct OodSelection {
  std::vector<std::size_t> in_distribution;  // indices into the input episodes
  std::vector<std::size_t> ood;
  std::vector<double> lower;  // per-feature p quantile of initial states
  std::vector<double> upper;  // per-feature 1-p quantile
};

/// Linear-interpolation quantile (Hyndman-Fan type 7) of ascending `sorted`.
double quantile_sorted(std::span<const double> sorted, double q);

/// An episode is OOD when any initial feature lies strictly below the p
/// quantile or strictly above the 1-p quantile of that feature over all
/// episodes' initial states. Throws DataError on empty input.
OodSelection select_ood(std::span<const Episode> episodes, double percentile = 0.01);

}  // namespace cdqn::mdp
