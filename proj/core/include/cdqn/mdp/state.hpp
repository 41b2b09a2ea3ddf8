#pragma once

#include <array>

namespace cdqn::mdp {

/// Features per 4-hour window.
inline constexpr int kStateDim = 44;
/// Windows per episode (first 72 hours of ventilation).
inline constexpr int kHorizon = 18;

/// Patient state for one window. `missing[i]` records that feature i was not
/// observed; such values are NaN until imputation fills them, after which the
/// flag is kept as provenance.
struct StateVector {
  std::array<double, kStateDim> values{};
  std::array<bool, kStateDim> missing{};

  bool has_missing_values() const noexcept;
  bool all_finite() const noexcept;
  friend bool operator==(const StateVector&, const StateVector&) = default;
};

}  // namespace cdqn::mdp
