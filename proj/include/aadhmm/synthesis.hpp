#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aadhmm/emission.hpp"

namespace aadhmm {

/// True attended speaker per window.
struct AttentionTrajectory {
  std::vector<int> states;
  double window_length = 1.0;

  std::size_t n_windows() const { return states.size(); }
  /// Window indices whose state differs from the previous window.
  std::vector<std::size_t> switch_indices() const;
};

/// Emission model the synthetic suites start from: calibrated to 58.2%
/// per-window accuracy for two speakers.
EmissionModel baseline_emission();

struct SynthesisConfig {
  int n_states = 2;
  double trial_length = 600.0;    // s
  double window_length = 1.0;     // s
  double switch_interval = 300.0; // s
  EmissionModel emission = baseline_emission();
  /// Attended draws are shifted by alpha * (mu_att - mu_unatt).
  double alpha_shift = 0.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on any violated constraint.
  void validate() const;
  std::size_t n_windows() const;
};

struct SyntheticTrial {
  AttentionTrajectory truth;
  ScoreSeries scores;
};

/// Scheduled switches every switch_interval seconds. The initial speaker is
/// uniform and each switch moves to a uniformly chosen different speaker.
/// Window t belongs to the block containing its midpoint.
AttentionTrajectory generate_trajectory(const SynthesisConfig& config);

/// Independent two-Gaussian draws in atanh space given the trajectory, then tanh.
ScoreSeries sample_scores(const AttentionTrajectory& trajectory, const SynthesisConfig& config);

/// Lower-level form without range checks on alpha; draws from `seed`.
ScoreSeries sample_scores(const AttentionTrajectory& trajectory, int n_states,
                          const EmissionModel& emission, double alpha_shift,
                          std::uint64_t seed);

SyntheticTrial simulate(const SynthesisConfig& config);

/// P(argmax_j atanh x_j = attended) for mu_unatt = 0, sigma = 1, mu_att = dprime
/// with n_states speakers, by quadrature.
double argmax_accuracy(double dprime, int n_states);

/// EmissionModel(d', 0, 1) whose per-window argmax accuracy equals target.
/// Throws std::invalid_argument unless 1/N < target < 1.
EmissionModel calibrate_dprime(double target_accuracy, int n_states);

/// Decorrelated child seed (splitmix64 of base ^ stream).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace aadhmm
