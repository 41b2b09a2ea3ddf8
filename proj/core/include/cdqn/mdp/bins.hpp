#pragma once

#include <array>
#include <string>

namespace cdqn::mdp {

/// Seven contiguous half-open intervals [edges[i], edges[i+1]) mapping a
/// physical ventilator setting to a level. Values below edges[0] fall in
/// level 0; values at or above edges[7] fall in level 6.
struct BinSpec {
  std::string parameter;
  std::string unit;
  std::array<double, 8> edges{};

  /// Throws ConfigError unless edges are strictly increasing.
  void validate() const;
};

/// Vt (ml/kg): [0,2.5) [2.5,5) [5,7.5) [7.5,10) [10,12.5) [12.5,15) [15,inf)
const BinSpec& tidal_volume_bins();
/// PEEP (cmH2O): [0,5) [5,7) [7,9) [9,11) [11,13) [13,15) [15,inf)
const BinSpec& peep_bins();
/// FiO2 (%): [25,30) [30,35) [35,40) [40,45) [45,50) [50,55) [55,100]
const BinSpec& fio2_bins();

/// Level in [0, 6] of `value`. Throws DomainError for negative or non-finite values.
int discretize_setting(double value, const BinSpec& bins);

}  // namespace cdqn::mdp
