#include "cdqn/mdp/severity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdqn/error.hpp"

namespace cdqn::mdp {

SeverityProxy::SeverityProxy(std::vector<SeverityTerm> terms, double clip_units)
    : terms_(std::move(terms)), clip_units_(clip_units), max_score_(0.0) {
  if (terms_.empty()) throw ConfigError("severity proxy needs at least one term");
  if (!(clip_units_ > 0.0)) throw ConfigError("severity clip must be positive");
  for (const auto& term : terms_) {
    if (term.feature < 0 || term.feature >= kStateDim) {
      throw ConfigError("severity term feature " + std::to_string(term.feature) + " out of range");
    }
    if (!(term.scale > 0.0) || !(term.weight >= 0.0)) {
      throw ConfigError("severity scale must be positive and weight non-negative");
    }
    max_score_ += term.weight * clip_units_;
  }
}

const SeverityProxy& SeverityProxy::standard() {
  // Features are in standardized units; 0 is the healthy reference.
  static const SeverityProxy proxy(
      {
          {9, 0.0, 1.0, 4.0},
          {12, 0.0, 1.0, 3.0},
          {14, 0.0, 1.0, 3.0},
          {16, 0.0, 1.0, 2.0},
          {18, 0.0, 1.0, 2.0},
          {21, 0.0, 1.0, 2.0},
          {24, 0.0, 1.0, 1.0},
          {28, 0.0, 1.0, 1.0},
          {35, 0.0, 1.0, 1.0},
          {41, 0.0, 1.0, 1.0},
      },
      4.0);
  return proxy;
}

double SeverityProxy::score(const StateVector& state) const {
  double total = 0.0;
  for (const auto& term : terms_) {
    const double x = state.values[static_cast<std::size_t>(term.feature)];
    if (!std::isfinite(x)) {
      throw NumericError("severity score: feature " + std::to_string(term.feature) + " is not finite");
    }
    const double deviation = std::min(std::abs(x - term.reference) / term.scale, clip_units_);
    total += term.weight * deviation;
  }
  return total;
}

double severity_score(const StateVector& state) { return SeverityProxy::standard().score(state); }

}  // namespace cdqn::mdp
