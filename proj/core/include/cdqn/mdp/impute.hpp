#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "cdqn/mdp/episode.hpp"

namespace cdqn::mdp {

enum class ImputeStrategy {
  kComplete,       // nothing missing
  kKnn,            // missing fraction below knn_limit
  kSampleAndHold,  // between knn_limit and removal_limit
  kRemoved,        // above removal_limit; column zeroed
};

std::string_view to_string(ImputeStrategy strategy) noexcept;

struct ImputeOptions {
  int neighbors = 5;
  double knn_limit = 0.30;
  double removal_limit = 0.95;
  /// Upper bound on the donor pool scanned for each KNN query. Donors are
  /// taken at an even stride over the eligible windows.
  std::size_t max_donors = 1000;
};

struct FeatureImputation {
  int feature = 0;
  double missing_fraction = 0.0;
  ImputeStrategy strategy = ImputeStrategy::kComplete;
  std::size_t filled = 0;
};

struct ImputationReport {
  std::vector<FeatureImputation> features;  // one entry per feature, in order

  std::vector<int> removed_features() const;
};

struct ImputationResult {
  std::vector<Episode> episodes;
  ImputationReport report;
};

/// Hierarchical imputation over the whole dataset:
///  * < knn_limit missing: mean of the k nearest windows (Euclidean distance
///    over the features that are never missing);
///  * knn_limit .. removal_limit: last observation carried forward within the
///    patient, dataset mean when nothing was observed yet;
///  * > removal_limit: the feature is dropped; its column is set to 0 so the
///    state keeps its width.
/// Throws DataError when every feature exceeds removal_limit.
ImputationResult impute(std::vector<Episode> episodes, const ImputeOptions& options = {});

}  // namespace cdqn::mdp
