#include "cdqn/mdp/ood.hpp"

#include <algorithm>
#include <cmath>

#include "cdqn/error.hpp"

namespace cdqn::mdp {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

OodSelection select_ood(std::span<const Episode> episodes, double percentile) {
  if (episodes.empty()) throw DataError("OOD selection needs at least one episode");
  if (!(percentile >= 0.0 && percentile <= 0.5)) throw DomainError("OOD percentile must lie in [0, 0.5]");

  OodSelection out;
  out.lower.resize(kStateDim);
  out.upper.resize(kStateDim);
  std::vector<double> column(episodes.size());
  for (std::size_t j = 0; j < static_cast<std::size_t>(kStateDim); ++j) {
    for (std::size_t e = 0; e < episodes.size(); ++e) {
      column[e] = episodes[e].initial_state().values[j];
      if (!std::isfinite(column[e])) throw DataError("OOD selection requires imputed initial states");
    }
    std::sort(column.begin(), column.end());
    out.lower[j] = quantile_sorted(column, percentile);
    out.upper[j] = quantile_sorted(column, 1.0 - percentile);
  }
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& values = episodes[e].initial_state().values;
    bool tail = false;
    for (std::size_t j = 0; j < values.size() && !tail; ++j) {
      tail = values[j] < out.lower[j] || values[j] > out.upper[j];
    }
    (tail ? out.ood : out.in_distribution).push_back(e);
  }
  return out;
}

}  // namespace cdqn::mdp
