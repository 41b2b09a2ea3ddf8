#include "cdqn/mdp/bins.hpp"

#include <cmath>
#include <limits>

#include "cdqn/error.hpp"
#include "cdqn/mdp/action.hpp"

namespace cdqn::mdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void BinSpec::validate() const {
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) throw ConfigError("bin edges for " + parameter + " must increase strictly");
  }
}

const BinSpec& tidal_volume_bins() {
  static const BinSpec bins{"Vt", "ml/kg", {0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, kInf}};
  return bins;
}

const BinSpec& peep_bins() {
  static const BinSpec bins{"PEEP", "cmH2O", {0.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0, kInf}};
  return bins;
}

const BinSpec& fio2_bins() {
  static const BinSpec bins{"FiO2", "%", {25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 100.0}};
  return bins;
}

int discretize_setting(double value, const BinSpec& bins) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError(bins.parameter + " setting must be finite and non-negative");
  }
  int level = 0;
  // Interior edges 1..6: reaching an edge moves the value into the upper bin.
  for (int i = 1; i < kLevels; ++i) {
    if (value >= bins.edges[static_cast<std::size_t>(i)]) level = i;
  }
  return level;
}

}  // namespace cdqn::mdp
