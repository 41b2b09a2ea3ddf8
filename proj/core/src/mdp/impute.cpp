#include "cdqn/mdp/impute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "cdqn/error.hpp"

namespace cdqn::mdp {

std::string_view to_string(ImputeStrategy strategy) noexcept {
  switch (strategy) {
    case ImputeStrategy::kComplete: return "complete";
    case ImputeStrategy::kKnn: return "knn";
    case ImputeStrategy::kSampleAndHold: return "sample_and_hold";
    case ImputeStrategy::kRemoved: return "removed";
  }
  return "unknown";
}

std::vector<int> ImputationReport::removed_features() const {
  std::vector<int> removed;
  for (const auto& f : features) {
    if (f.strategy == ImputeStrategy::kRemoved) removed.push_back(f.feature);
  }
  return removed;
}

namespace {

constexpr std::size_t kDim = static_cast<std::size_t>(kStateDim);

// NaN marks a value still to be filled; the missing flags are provenance only.
bool is_missing(const StateVector& s, std::size_t j) { return std::isnan(s.values[j]); }

}  // namespace

ImputationResult impute(std::vector<Episode> episodes, const ImputeOptions& options) {
  if (options.neighbors < 1) throw ConfigError("KNN imputation needs at least one neighbor");
  if (!(options.knn_limit >= 0.0 && options.knn_limit <= options.removal_limit && options.removal_limit <= 1.0)) {
    throw ConfigError("imputation limits must satisfy 0 <= knn_limit <= removal_limit <= 1");
  }

  // Flat view of every window.
  std::vector<StateVector*> rows;
  for (auto& ep : episodes) {
    for (auto& w : ep.windows) rows.push_back(&w.state);
  }

  ImputationReport report;
  report.features.resize(kDim);
  std::array<double, kDim> means{};
  for (std::size_t j = 0; j < kDim; ++j) {
    std::size_t missing = 0;
    double sum = 0.0;
    for (const StateVector* s : rows) {
      if (is_missing(*s, j)) {
        ++missing;
      } else {
        sum += s->values[j];
      }
    }
    const std::size_t observed = rows.size() - missing;
    auto& entry = report.features[j];
    entry.feature = static_cast<int>(j);
    entry.missing_fraction = rows.empty() ? 0.0 : static_cast<double>(missing) / static_cast<double>(rows.size());
    means[j] = observed > 0 ? sum / static_cast<double>(observed) : 0.0;
    if (missing == 0) {
      entry.strategy = ImputeStrategy::kComplete;
    } else if (entry.missing_fraction > options.removal_limit) {
      entry.strategy = ImputeStrategy::kRemoved;
    } else if (entry.missing_fraction < options.knn_limit) {
      entry.strategy = ImputeStrategy::kKnn;
    } else {
      entry.strategy = ImputeStrategy::kSampleAndHold;
    }
  }
  if (rows.empty()) return {std::move(episodes), std::move(report)};

  std::vector<std::size_t> complete, knn, hold, removed;
  for (std::size_t j = 0; j < kDim; ++j) {
    switch (report.features[j].strategy) {
      case ImputeStrategy::kComplete: complete.push_back(j); break;
      case ImputeStrategy::kKnn: knn.push_back(j); break;
      case ImputeStrategy::kSampleAndHold: hold.push_back(j); break;
      case ImputeStrategy::kRemoved: removed.push_back(j); break;
    }
  }
  if (removed.size() == kDim) throw DataError("every feature exceeds the removal threshold; dataset unusable");

  // Sample-and-hold first: it only looks at the patient's own history.
  for (auto& ep : episodes) {
    for (std::size_t j : hold) {
      bool seen = false;
      double last = 0.0;
      for (auto& w : ep.windows) {
        if (is_missing(w.state, j)) {
          w.state.values[j] = seen ? last : means[j];
          ++report.features[j].filled;
        } else {
          seen = true;
          last = w.state.values[j];
        }
      }
    }
  }

  if (!knn.empty()) {
    auto needs_knn = [&](const StateVector& s) {
      return std::any_of(knn.begin(), knn.end(), [&](std::size_t j) { return is_missing(s, j); });
    };
    std::vector<std::size_t> eligible;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!needs_knn(*rows[r])) eligible.push_back(r);
    }
    std::vector<std::size_t> donors;
    if (eligible.size() <= options.max_donors) {
      donors = eligible;
    } else {
      for (std::size_t i = 0; i < options.max_donors; ++i) {
        donors.push_back(eligible[i * eligible.size() / options.max_donors]);
      }
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(options.neighbors), donors.size());

    std::vector<StateVector*> queries;
    for (StateVector* s : rows) {
      if (needs_knn(*s)) queries.push_back(s);
    }
    if (k == 0 || complete.empty()) {
      // No donors or no distance features: fall back to the dataset mean.
      for (StateVector* s : queries) {
        for (std::size_t j : knn) {
          if (is_missing(*s, j)) {
            s->values[j] = means[j];
            ++report.features[j].filled;
          }
        }
      }
    } else {
      // Squared distances |q|^2 + |d|^2 - 2 q.d over the complete features, in blocks.
      const auto dims = static_cast<Eigen::Index>(complete.size());
      const auto nd = static_cast<Eigen::Index>(donors.size());
      Eigen::MatrixXd donor_mat(dims, nd);
      for (Eigen::Index d = 0; d < nd; ++d) {
        const StateVector& donor = *rows[donors[static_cast<std::size_t>(d)]];
        for (Eigen::Index f = 0; f < dims; ++f) donor_mat(f, d) = donor.values[complete[static_cast<std::size_t>(f)]];
      }
      const Eigen::VectorXd donor_norms = donor_mat.colwise().squaredNorm().transpose();
      constexpr std::size_t kBlock = 512;
      std::vector<std::pair<double, std::size_t>> distances(donors.size());
      for (std::size_t begin = 0; begin < queries.size(); begin += kBlock) {
        const std::size_t count = std::min(kBlock, queries.size() - begin);
        Eigen::MatrixXd query_mat(dims, static_cast<Eigen::Index>(count));
        for (std::size_t q = 0; q < count; ++q) {
          for (Eigen::Index f = 0; f < dims; ++f) {
            query_mat(f, static_cast<Eigen::Index>(q)) = queries[begin + q]->values[complete[static_cast<std::size_t>(f)]];
          }
        }
        const Eigen::MatrixXd cross = donor_mat.transpose() * query_mat;
        for (std::size_t q = 0; q < count; ++q) {
          const auto qc = static_cast<Eigen::Index>(q);
          const double qn = query_mat.col(qc).squaredNorm();
          for (Eigen::Index d = 0; d < nd; ++d) {
            distances[static_cast<std::size_t>(d)] = {qn + donor_norms(d) - 2.0 * cross(d, qc),
                                                      static_cast<std::size_t>(d)};
          }
          std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k), distances.end());
          StateVector* s = queries[begin + q];
          for (std::size_t j : knn) {
            if (!is_missing(*s, j)) continue;
            double sum = 0.0;
            for (std::size_t n = 0; n < k; ++n) sum += rows[donors[distances[n].second]]->values[j];
            s->values[j] = sum / static_cast<double>(k);
            ++report.features[j].filled;
          }
        }
      }
    }
  }

  for (StateVector* s : rows) {
    for (std::size_t j : removed) {
      if (is_missing(*s, j)) ++report.features[j].filled;
      s->values[j] = 0.0;
    }
  }
  return {std::move(episodes), std::move(report)};
}

}  // namespace cdqn::mdp
