#include "aadhmm/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace aadhmm {

namespace {

constexpr std::uint64_t kTrajectoryStream = 0x7472616a;  // "traj"
constexpr std::uint64_t kScoreStream = 0x73636f72;       // "scor"

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

std::vector<std::size_t> AttentionTrajectory::switch_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t < states.size(); ++t) {
    if (states[t] != states[t - 1]) out.push_back(t);
  }
  return out;
}

EmissionModel baseline_emission() {
  static const EmissionModel model = calibrate_dprime(0.582, 2);
  return model;
}

void SynthesisConfig::validate() const {
  if (n_states < 2) throw std::invalid_argument("n_states must be at least 2");
  if (!(window_length > 0.0)) throw std::invalid_argument("window_length must be positive");
  if (!(switch_interval >= window_length)) {
    throw std::invalid_argument("switch_interval must be at least window_length");
  }
  if (!(trial_length >= switch_interval)) {
    throw std::invalid_argument("trial_length must be at least switch_interval");
  }
  if (!(alpha_shift >= -0.5 && alpha_shift <= 5.0)) {
    throw std::invalid_argument("alpha_shift must lie in [-0.5, 5], got " +
                                std::to_string(alpha_shift));
  }
}

std::size_t SynthesisConfig::n_windows() const {
  return static_cast<std::size_t>(std::floor(trial_length / window_length + 1e-9));
}

AttentionTrajectory generate_trajectory(const SynthesisConfig& config) {
  config.validate();
  std::mt19937_64 rng(derive_seed(config.seed, kTrajectoryStream));
  std::uniform_int_distribution<int> initial(0, config.n_states - 1);
  std::uniform_int_distribution<int> other(0, config.n_states - 2);

  AttentionTrajectory out;
  out.window_length = config.window_length;
  out.states.resize(config.n_windows());
  int state = initial(rng);
  long block = 0;
  for (std::size_t t = 0; t < out.states.size(); ++t) {
    const double midpoint = (static_cast<double>(t) + 0.5) * config.window_length;
    const auto b = static_cast<long>(std::floor(midpoint / config.switch_interval));
    while (block < b) {
      const int r = other(rng);
      state = r >= state ? r + 1 : r;
      ++block;
    }
    out.states[t] = state;
  }
  return out;
}

ScoreSeries sample_scores(const AttentionTrajectory& trajectory, int n_states,
                          const EmissionModel& emission, double alpha_shift,
                          std::uint64_t seed) {
  if (n_states < 2) throw std::invalid_argument("n_states must be at least 2");
  std::mt19937_64 rng(derive_seed(seed, kScoreStream));
  std::normal_distribution<double> unit(0.0, 1.0);
  const double shift = alpha_shift * (emission.mu_attended() - emission.mu_unattended());
  const auto n = static_cast<std::size_t>(n_states);

  Matrix scores(trajectory.n_windows(), n);
  for (std::size_t t = 0; t < trajectory.n_windows(); ++t) {
    const int attended = trajectory.states[t];
    if (attended < 0 || attended >= n_states) {
      throw std::out_of_range("trajectory state out of range at window " + std::to_string(t));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const bool is_attended = j == static_cast<std::size_t>(attended);
      double z = (is_attended ? emission.mu_attended() : emission.mu_unattended()) +
                 emission.sigma() * unit(rng);
      if (is_attended) z += shift;
      scores(t, j) = std::tanh(z);
    }
  }
  return ScoreSeries(std::move(scores), trajectory.window_length);
}

ScoreSeries sample_scores(const AttentionTrajectory& trajectory, const SynthesisConfig& config) {
  config.validate();
  return sample_scores(trajectory, config.n_states, config.emission, config.alpha_shift,
                       config.seed);
}

SyntheticTrial simulate(const SynthesisConfig& config) {
  auto truth = generate_trajectory(config);
  auto scores = sample_scores(truth, config);
  return {std::move(truth), std::move(scores)};
}

double argmax_accuracy(double dprime, int n_states) {
  if (n_states < 2) throw std::invalid_argument("n_states must be at least 2");
  if (n_states == 2) return normal_cdf(dprime / std::numbers::sqrt2);
  // integral of phi(z) * Phi(z + d')^(N-1) dz, composite Simpson on [-12, 12].
  constexpr int kIntervals = 4000;
  constexpr double kLo = -12.0, kHi = 12.0;
  const double h = (kHi - kLo) / kIntervals;
  double sum = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double z = kLo + h * i;
    const double f = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) *
                     std::pow(normal_cdf(z + dprime), n_states - 1);
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * f;
  }
  return sum * h / 3.0;
}

EmissionModel calibrate_dprime(double target_accuracy, int n_states) {
  if (n_states < 2) throw std::invalid_argument("n_states must be at least 2");
  const double chance = 1.0 / n_states;
  if (!(target_accuracy > chance) || !(target_accuracy < 1.0)) {
    throw std::invalid_argument("target accuracy must lie in (" + std::to_string(chance) +
                                ", 1), got " + std::to_string(target_accuracy));
  }
  double lo = 0.0, hi = 1.0;
  while (argmax_accuracy(hi, n_states) < target_accuracy) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) throw std::invalid_argument("target accuracy too close to 1");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (argmax_accuracy(mid, n_states) < target_accuracy ? lo : hi) = mid;
  }
  const double dprime = 0.5 * (lo + hi);
  return EmissionModel(dprime, 0.0, 1.0);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base ^ (stream * 0x9e3779b97f4a7c15ULL);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace aadhmm
