#pragma once

#include <vector>

#include "cdqn/mdp/state.hpp"

namespace cdqn::mdp {

/// One scored feature of the severity proxy.
struct SeverityTerm {
  int feature = 0;
  double reference = 0.0;  // healthy nominal value
  double scale = 1.0;      // one deviation unit
  double weight = 1.0;
};

/// Severity proxy standing in for a modified APACHE II score:
///
///   AP(s) = sum_i weight_i * min(|x_i - reference_i| / scale_i, clip_units)
///
/// bounded in [0, clip_units * sum_i weight_i].
class SeverityProxy {
 public:
  SeverityProxy(std::vector<SeverityTerm> terms, double clip_units);

  /// The ten-term table used by the simulator and the reward (see README).
  static const SeverityProxy& standard();

  double score(const StateVector& state) const;
  double min_score() const noexcept { return 0.0; }
  double max_score() const noexcept { return max_score_; }
  double clip_units() const noexcept { return clip_units_; }
  const std::vector<SeverityTerm>& terms() const noexcept { return terms_; }

 private:
  std::vector<SeverityTerm> terms_;
  double clip_units_;
  double max_score_;
};

/// severity_score with the standard proxy.
double severity_score(const StateVector& state);

}  // namespace cdqn::mdp
