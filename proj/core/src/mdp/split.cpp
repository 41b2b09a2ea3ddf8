#include "cdqn/mdp/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdqn/error.hpp"
#include "cdqn/rng.hpp"

namespace cdqn::mdp {

void SplitRatios::validate() const {
  for (double r : {train, validation, calibration, test}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("split ratios must lie in [0, 1]");
  }
  if (std::abs(train + validation + calibration + test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

namespace {

std::size_t floor_count(std::size_t n, double ratio) {
  // The slack absorbs representation error such as 0.1 * 30 = 3.0000000000000004
  // or 0.7 * 10 = 6.999999999999999.
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
}

}  // namespace

SplitDataset split_patients(std::vector<Episode> episodes, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  const std::size_t n = episodes.size();
  if (n < 4) throw DataError("need at least 4 patients to split, got " + std::to_string(n));

  const std::size_t n_val = floor_count(n, ratios.validation);
  const std::size_t n_cal = floor_count(n, ratios.calibration);
  const std::size_t n_test = floor_count(n, ratios.test);
  if (n_val + n_cal + n_test > n) throw DataError("split ratios over-allocate patients");
  const std::size_t n_train = n - n_val - n_cal - n_test;
  if (n_train == 0 || n_val == 0 || n_cal == 0 || n_test == 0) {
    throw DataError("under-populated split for " + std::to_string(n) + " patients: train " +
                    std::to_string(n_train) + ", validation " + std::to_string(n_val) + ", calibration " +
                    std::to_string(n_cal) + ", test " + std::to_string(n_test));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(order[i], order[j]);
  }

  SplitDataset out;
  auto take = [&](std::vector<Episode>& dest, std::size_t begin, std::size_t count) {
    dest.reserve(count);
    for (std::size_t i = begin; i < begin + count; ++i) dest.push_back(std::move(episodes[order[i]]));
    std::sort(dest.begin(), dest.end(),
              [](const Episode& a, const Episode& b) { return a.patient_id < b.patient_id; });
  };
  take(out.train, 0, n_train);
  take(out.validation, n_train, n_val);
  take(out.calibration, n_train + n_val, n_cal);
  take(out.test, n_train + n_val + n_cal, n_test);
  return out;
}

}  // namespace cdqn::mdp
