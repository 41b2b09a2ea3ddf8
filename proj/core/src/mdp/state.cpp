#include "cdqn/mdp/state.hpp"

#include <algorithm>
#include <cmath>

namespace cdqn::mdp {

bool StateVector::has_missing_values() const noexcept {
  return std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); });
}

bool StateVector::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace cdqn::mdp
