#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "cdqn/mdp/action.hpp"
#include "cdqn/mdp/episode.hpp"
#include "cdqn/mdp/state.hpp"
#include "cdqn/rng.hpp"

namespace cdqn::sim {

/// Synthetic ICU-ventilation generator. Every observed feature is an affine
/// map of the latent severity z plus Gaussian noise:
///
///   x_j = offset_j + load_j * z + observation_noise * eps_j
///
/// Severity dynamics for action a and ideal action a*, d = L1(a, a*):
///
///   d <= tolerance:  dz = -heal_rate * responsiveness * (1 - d / (tolerance + 1))
///   d >  tolerance:  dz = +harm_rate * (d - tolerance) / (18 - tolerance)
///   z' = clamp(z + dz + process_noise * eps, 0, 1)
///
/// Outcome: P(death within 90 days) = 1 / (1 + exp(-steepness * (z_T - 0.5))).
struct SimConfig {
  std::size_t n_patients = 1000;
  int horizon = mdp::kHorizon;
  double expert_noise = 0.15;
  double observation_noise = 0.25;
  double mortality_steepness = 9.6;
  std::uint64_t seed = 0;

  double intermediate_reward_weight = 0.5;

  // Initial severity: N(mean, sd), replaced with probability tail_probability
  // by N(mean, tail_sd); clamped to [0, 1].
  double initial_severity_mean = 0.45;
  double initial_severity_sd = 0.12;
  double tail_probability = 0.10;
  double initial_severity_tail_sd = 0.30;
  double responsiveness_min = 0.2;  // responsiveness ~ U(responsiveness_min, 1]

  double heal_rate = 0.02;
  double harm_rate = 0.05;
  int tolerance = 2;
  double process_noise = 0.01;

  /// Per-feature missing-completely-at-random rates.
  std::array<double, mdp::kStateDim> missing_rates = default_missing_rates();

  /// Emit only the first window of each patient (terminal, carrying the
  /// outcome of the full rollout): one exchangeable transition per patient.
  bool single_transition = false;

  void validate() const;

  /// A few features at 10% (KNN band) and a few at 50% (sample-and-hold band).
  static std::array<double, mdp::kStateDim> default_missing_rates();
};

struct PatientLatent {
  double severity = 0.0;
  double responsiveness = 1.0;
  mdp::ActionTriple ideal_action;
};

/// State-dependent target settings by severity band.
mdp::ActionTriple ideal_action_for(double severity) noexcept;

/// Noise-free feature map plus observation noise (no missingness).
mdp::StateVector observe(const SimConfig& cfg, double severity, Rng& rng);

/// Marks entries missing (NaN value, flag set) at the configured rates.
void apply_missingness(const SimConfig& cfg, mdp::StateVector& state, Rng& rng);

/// Draws initial severity and responsiveness.
PatientLatent sample_latent(const SimConfig& cfg, Rng& rng);

/// sample_latent followed by the first observation, missingness applied.
std::pair<PatientLatent, mdp::StateVector> sample_patient(const SimConfig& cfg, Rng& rng);

/// Deterministic part of the severity update (the formula above without process noise).
double severity_drift(const SimConfig& cfg, const PatientLatent& latent, const mdp::ActionTriple& action);

/// Applies one window of dynamics and returns the next latent and its
/// (noisy, unmasked) observation.
std::pair<PatientLatent, mdp::StateVector> step_dynamics(const SimConfig& cfg, const PatientLatent& latent,
                                                         const mdp::ActionTriple& action, Rng& rng);

/// Noisy expert: with probability 1 - expert_noise the ideal action with one
/// random component moved by -1, 0 or +1 (clamped); otherwise uniform.
mdp::ActionTriple behavior_policy(const PatientLatent& latent, double expert_noise, Rng& rng);

double death_probability(double final_severity, double steepness) noexcept;

/// True when the patient dies within 90 days.
bool mortality_outcome(double final_severity, double steepness, Rng& rng);

/// Per-patient stream seed: derive_seed(seed, patient_index).
std::uint64_t patient_seed(std::uint64_t seed, std::size_t patient_index) noexcept;

/// Rolls out one patient under the behavior policy.
mdp::Episode generate_patient(const SimConfig& cfg, std::size_t patient_index);

/// Policy-driven rollout used for ground-truth contrasts; returns final severity.
template <typename Policy>
double rollout_final_severity(const SimConfig& cfg, std::size_t patient_index, Policy&& policy);

std::vector<mdp::Episode> generate_dataset(const SimConfig& cfg);

template <typename Policy>
double rollout_final_severity(const SimConfig& cfg, std::size_t patient_index, Policy&& policy) {
  Rng rng(patient_seed(cfg.seed, patient_index));
  auto [latent, state] = sample_patient(cfg, rng);
  for (int t = 0; t < cfg.horizon; ++t) {
    const mdp::ActionTriple action = policy(latent, state, rng);
    auto next = step_dynamics(cfg, latent, action, rng);
    latent = next.first;
    state = next.second;
  }
  return latent.severity;
}

}  // namespace cdqn::sim
