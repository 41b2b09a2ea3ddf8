#pragma once

#include <cstdint>
#include <vector>

#include "cdqn/mdp/episode.hpp"

namespace cdqn::mdp {

struct SplitRatios {
  double train = 0.6;
  double validation = 0.1;
  double calibration = 0.1;
  double test = 0.2;

  void validate() const;
};

/// Patient-level partition; each split is sorted by patient id.
struct SplitDataset {
  std::vector<Episode> train;
  std::vector<Episode> validation;
  std::vector<Episode> calibration;
  std::vector<Episode> test;
};

/// Seeded Fisher-Yates shuffle of patients, then floor allocation of the
/// validation, calibration and test counts; the remainder goes to train.
/// Throws DataError for fewer than four patients or an empty split.
SplitDataset split_patients(std::vector<Episode> episodes, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace cdqn::mdp
