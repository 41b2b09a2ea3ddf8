#include "cdqn/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cdqn/error.hpp"
#include "cdqn/mdp/reward.hpp"

namespace cdqn::sim {

namespace {

constexpr std::size_t kDim = static_cast<std::size_t>(mdp::kStateDim);

struct FeatureMap {
  std::array<double, kDim> offset{};
  std::array<double, kDim> load{};
};

// Scored severity features start at the healthy reference (0) for z = 0 and
// grow with z, so the severity proxy is non-decreasing in z without noise.
// The remaining features are centered affine maps with loads of either sign.
const FeatureMap& feature_map() {
  static const FeatureMap map = [] {
    FeatureMap m;
    std::array<bool, kDim> scored{};
    for (const auto& term : mdp::SeverityProxy::standard().terms()) scored[static_cast<std::size_t>(term.feature)] = true;
    for (std::size_t j = 0; j < kDim; ++j) {
      if (scored[j]) {
        m.load[j] = 2.5 + 0.1 * static_cast<double>(j % 5);
        m.offset[j] = 0.0;
      } else {
        const double sign = (j % 3 == 1) ? -1.0 : 1.0;
        m.load[j] = sign * (1.5 + 0.25 * static_cast<double>(j % 4));
        m.offset[j] = -0.45 * m.load[j];
      }
    }
    return m;
  }();
  return map;
}

}  // namespace

std::array<double, mdp::kStateDim> SimConfig::default_missing_rates() {
  std::array<double, mdp::kStateDim> rates{};
  for (std::size_t j : {30, 31, 32, 33, 34, 36}) rates[j] = 0.10;
  for (std::size_t j : {38, 39, 40, 42}) rates[j] = 0.50;
  return rates;
}

void SimConfig::validate() const {
  if (horizon != mdp::kHorizon) throw ConfigError("simulator horizon must be 18 windows");
  if (!(expert_noise >= 0.0 && expert_noise <= 1.0)) throw ConfigError("expert_noise must lie in [0, 1]");
  if (!(observation_noise >= 0.0)) throw ConfigError("observation_noise must be non-negative");
  if (!(process_noise >= 0.0)) throw ConfigError("process_noise must be non-negative");
  if (!std::isfinite(mortality_steepness)) throw ConfigError("mortality_steepness must be finite");
  if (!(intermediate_reward_weight > 0.0)) throw ConfigError("intermediate_reward_weight must be positive");
  if (!(responsiveness_min > 0.0 && responsiveness_min <= 1.0)) throw ConfigError("responsiveness_min must lie in (0, 1]");
  if (!(tail_probability >= 0.0 && tail_probability <= 1.0)) throw ConfigError("tail_probability must lie in [0, 1]");
  if (tolerance < 0 || tolerance >= 18) throw ConfigError("tolerance must lie in [0, 17]");
  for (double r : missing_rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("missing rates must lie in [0, 1]");
  }
}

mdp::ActionTriple ideal_action_for(double severity) noexcept {
  if (severity < 0.3) return {2, 0, 1};
  if (severity < 0.6) return {2, 1, 3};
  return {3, 3, 6};
}

mdp::StateVector observe(const SimConfig& cfg, double severity, Rng& rng) {
  const FeatureMap& map = feature_map();
  mdp::StateVector s;
  for (std::size_t j = 0; j < kDim; ++j) {
    s.values[j] = map.offset[j] + map.load[j] * severity;
    if (cfg.observation_noise > 0.0) s.values[j] += cfg.observation_noise * rng.normal();
  }
  return s;
}

void apply_missingness(const SimConfig& cfg, mdp::StateVector& state, Rng& rng) {
  for (std::size_t j = 0; j < kDim; ++j) {
    if (cfg.missing_rates[j] > 0.0 && rng.bernoulli(cfg.missing_rates[j])) {
      state.values[j] = std::numeric_limits<double>::quiet_NaN();
      state.missing[j] = true;
    }
  }
}

PatientLatent sample_latent(const SimConfig& cfg, Rng& rng) {
  PatientLatent latent;
  const double sd = rng.bernoulli(cfg.tail_probability) ? cfg.initial_severity_tail_sd : cfg.initial_severity_sd;
  latent.severity = std::clamp(cfg.initial_severity_mean + sd * rng.normal(), 0.0, 1.0);
  latent.responsiveness = 1.0 - (1.0 - cfg.responsiveness_min) * rng.uniform();
  latent.ideal_action = ideal_action_for(latent.severity);
  return latent;
}

std::pair<PatientLatent, mdp::StateVector> sample_patient(const SimConfig& cfg, Rng& rng) {
  const PatientLatent latent = sample_latent(cfg, rng);
  mdp::StateVector state = observe(cfg, latent.severity, rng);
  apply_missingness(cfg, state, rng);
  return {latent, state};
}

double severity_drift(const SimConfig& cfg, const PatientLatent& latent, const mdp::ActionTriple& action) {
  if (!action.in_range()) throw DomainError("action levels outside [0, 6]");
  const int d = mdp::l1_distance(action, latent.ideal_action);
  if (d <= cfg.tolerance) {
    return -cfg.heal_rate * latent.responsiveness *
           (1.0 - static_cast<double>(d) / static_cast<double>(cfg.tolerance + 1));
  }
  return cfg.harm_rate * static_cast<double>(d - cfg.tolerance) / static_cast<double>(18 - cfg.tolerance);
}

std::pair<PatientLatent, mdp::StateVector> step_dynamics(const SimConfig& cfg, const PatientLatent& latent,
                                                         const mdp::ActionTriple& action, Rng& rng) {
  PatientLatent next = latent;
  double z = latent.severity + severity_drift(cfg, latent, action);
  if (cfg.process_noise > 0.0) z += cfg.process_noise * rng.normal();
  next.severity = std::clamp(z, 0.0, 1.0);
  next.ideal_action = ideal_action_for(next.severity);
  return {next, observe(cfg, next.severity, rng)};
}

mdp::ActionTriple behavior_policy(const PatientLatent& latent, double expert_noise, Rng& rng) {
  if (rng.bernoulli(expert_noise)) {
    const auto i = static_cast<int>(rng.uniform_index(mdp::kNumActions));
    return mdp::decode_action(i);
  }
  mdp::ActionTriple a = latent.ideal_action;
  const auto component = rng.uniform_index(3);
  const int delta = static_cast<int>(rng.uniform_index(3)) - 1;
  int& level = component == 0 ? a.vt : (component == 1 ? a.peep : a.fio2);
  level = std::clamp(level + delta, 0, mdp::kLevels - 1);
  return a;
}

double death_probability(double final_severity, double steepness) noexcept {
  return 1.0 / (1.0 + std::exp(-steepness * (final_severity - 0.5)));
}

bool mortality_outcome(double final_severity, double steepness, Rng& rng) {
  return rng.bernoulli(death_probability(final_severity, steepness));
}

std::uint64_t patient_seed(std::uint64_t seed, std::size_t patient_index) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(patient_index));
}

mdp::Episode generate_patient(const SimConfig& cfg, std::size_t patient_index) {
  Rng rng(patient_seed(cfg.seed, patient_index));
  mdp::Episode ep;
  ep.patient_id = patient_index;

  PatientLatent latent = sample_latent(cfg, rng);
  // Rewards are computed from the unmasked observations; windows store the masked ones.
  mdp::StateVector full = observe(cfg, latent.severity, rng);
  for (int t = 0; t < cfg.horizon; ++t) {
    mdp::Window w;
    w.state = full;
    apply_missingness(cfg, w.state, rng);
    w.action = behavior_policy(latent, cfg.expert_noise, rng);
    auto [next_latent, next_full] = step_dynamics(cfg, latent, w.action, rng);
    if (t + 1 < cfg.horizon) w.reward = mdp::intermediate_reward(full, next_full, cfg.intermediate_reward_weight);
    ep.windows.push_back(w);
    latent = next_latent;
    full = next_full;
  }
  ep.survived_90d = !mortality_outcome(latent.severity, cfg.mortality_steepness, rng);
  if (cfg.single_transition) ep.windows.resize(1);
  ep.windows.back().done = true;
  ep.windows.back().reward = mdp::terminal_reward(ep.survived_90d);
  return ep;
}

std::vector<mdp::Episode> generate_dataset(const SimConfig& cfg) {
  cfg.validate();
  std::vector<mdp::Episode> episodes;
  episodes.reserve(cfg.n_patients);
  for (std::size_t i = 0; i < cfg.n_patients; ++i) episodes.push_back(generate_patient(cfg, i));
  return episodes;
}

}  // namespace cdqn::sim
