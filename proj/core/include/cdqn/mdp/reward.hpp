#pragma once

#include "cdqn/mdp/severity.hpp"
#include "cdqn/mdp/state.hpp"

namespace cdqn::mdp {

/// Default weight of the intermediate (severity-change) reward.
inline constexpr double kDefaultIntermediateRewardWeight = 0.5;

/// weight * (AP(s_t) - AP(s_next)) / (AP_max - AP_min); lies in [-weight, weight].
double intermediate_reward(const StateVector& current, const StateVector& next, double weight,
                           const SeverityProxy& proxy = SeverityProxy::standard());

/// +1 when the patient survives beyond 90 days, -1 otherwise.
constexpr double terminal_reward(bool survived_90d) noexcept { return survived_90d ? 1.0 : -1.0; }

}  // namespace cdqn::mdp
