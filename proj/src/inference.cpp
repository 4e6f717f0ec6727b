#include "aadhmm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aadhmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dimensions(const TransitionModel& transition, const LogEmissionSeries& log_b) {
  if (log_b.n_states() != transition.n_states()) {
    throw std::invalid_argument("log emissions have " + std::to_string(log_b.n_states()) +
                                " states but the chain has " +
                                std::to_string(transition.n_states()));
  }
  if (log_b.n_windows() == 0) {
    throw std::invalid_argument("need at least one window");
  }
}

// Writes exp(v - lse(v)) into out.
void normalise_exp(std::span<const double> v, std::span<double> out) {
  const double lse = log_sum_exp(v);
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::exp(v[j] - lse);
}

// out[j] = ln sum_k exp(in[k] + ln a_kj), the prediction step of the forward pass.
// The chain is symmetric so the same routine serves the backward pass.
void propagate(const TransitionModel& transition, std::span<const double> in,
               std::span<double> out, std::span<double> scratch) {
  const std::size_t n = in.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      scratch[k] = in[k] + (k == j ? transition.log_stay() : transition.log_switch());
    }
    out[j] = log_sum_exp(scratch.first(n));
  }
}

}  // namespace

std::string_view to_string(DecodeMode mode) {
  return mode == DecodeMode::kCausal ? "causal" : "non-causal";
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("log_sum_exp of an empty vector");
  const double max = *std::max_element(values.begin(), values.end());
  if (max == kNegInf) throw std::invalid_argument("log_sum_exp with all entries -inf");
  if (values.size() == 1 || std::isinf(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

ForwardFilter::ForwardFilter(TransitionModel transition)
    : transition_(transition),
      scratch_(static_cast<std::size_t>(transition.n_states())),
      next_(static_cast<std::size_t>(transition.n_states())) {}

ForwardFilter::ForwardFilter(TransitionModel transition, ForwardCheckpoint checkpoint)
    : ForwardFilter(transition) {
  if (checkpoint.windows_seen > 0 &&
      checkpoint.log_alpha.size() != static_cast<std::size_t>(transition.n_states())) {
    throw std::invalid_argument("checkpoint does not match the chain's state count");
  }
  state_ = std::move(checkpoint);
}

void ForwardFilter::update(std::span<const double> log_b_row, std::span<double> posterior) {
  const auto n = static_cast<std::size_t>(transition_.n_states());
  if (log_b_row.size() != n || posterior.size() != n) {
    throw std::invalid_argument("emission row has " + std::to_string(log_b_row.size()) +
                                " entries, expected " + std::to_string(n));
  }
  if (state_.windows_seen == 0) {
    const double log_prior = -std::log(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) next_[j] = log_prior + log_b_row[j];
  } else {
    propagate(transition_, state_.log_alpha, next_, scratch_);
    for (std::size_t j = 0; j < n; ++j) next_[j] += log_b_row[j];
  }
  // Keep ln alpha normalised; the row-constant shift is tracked in log_scale.
  const double lse = log_sum_exp(next_);
  state_.log_alpha.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    state_.log_alpha[j] = next_[j] - lse;
    posterior[j] = std::exp(state_.log_alpha[j]);
  }
  state_.log_scale += lse;
  ++state_.windows_seen;
}

std::vector<double> ForwardFilter::update(std::span<const double> log_b_row) {
  std::vector<double> posterior(static_cast<std::size_t>(transition_.n_states()));
  update(log_b_row, posterior);
  return posterior;
}

double ForwardFilter::log_likelihood() const {
  return state_.windows_seen == 0 ? 0.0 : state_.log_scale;
}

PosteriorSeries forward(const TransitionModel& transition, const LogEmissionSeries& log_b) {
  check_dimensions(transition, log_b);
  PosteriorSeries out{Matrix(log_b.n_windows(), static_cast<std::size_t>(log_b.n_states())),
                      DecodeMode::kCausal};
  ForwardFilter filter(transition);
  for (std::size_t t = 0; t < log_b.n_windows(); ++t) {
    filter.update(log_b.row(t), out.probabilities.row(t));
  }
  return out;
}

PosteriorSeries forward_backward(const TransitionModel& transition,
                                 const LogEmissionSeries& log_b) {
  check_dimensions(transition, log_b);
  const std::size_t n_windows = log_b.n_windows();
  const auto n = static_cast<std::size_t>(log_b.n_states());

  // Normalised ln alpha per window.
  Matrix log_alpha(n_windows, n);
  ForwardFilter filter(transition);
  std::vector<double> ignored(n);
  for (std::size_t t = 0; t < n_windows; ++t) {
    filter.update(log_b.row(t), ignored);
    std::copy(filter.checkpoint().log_alpha.begin(), filter.checkpoint().log_alpha.end(),
              log_alpha.row(t).begin());
  }

  PosteriorSeries out{Matrix(n_windows, n), DecodeMode::kNonCausal};
  std::vector<double> log_beta(n, 0.0);
  std::vector<double> shifted(n), gamma(n), scratch(n);
  normalise_exp(log_alpha.row(n_windows - 1), out.probabilities.row(n_windows - 1));
  for (std::size_t t = n_windows - 1; t-- > 0;) {
    // ln beta_j(t) = ln sum_k beta_k(t+1) b_k(t+1) a_jk
    for (std::size_t k = 0; k < n; ++k) shifted[k] = log_beta[k] + log_b(t + 1, k);
    propagate(transition, shifted, log_beta, scratch);
    const double lse = log_sum_exp(log_beta);
    for (std::size_t j = 0; j < n; ++j) log_beta[j] -= lse;

    for (std::size_t j = 0; j < n; ++j) gamma[j] = log_alpha(t, j) + log_beta[j];
    normalise_exp(gamma, out.probabilities.row(t));
  }
  return out;
}

ViterbiPath viterbi(const TransitionModel& transition, const LogEmissionSeries& log_b) {
  check_dimensions(transition, log_b);
  const std::size_t n_windows = log_b.n_windows();
  const auto n = static_cast<std::size_t>(log_b.n_states());

  std::vector<int> backpointer(n_windows * n, 0);
  std::vector<double> score(n), next(n);
  const double log_prior = -std::log(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) score[j] = log_prior + log_b(0, j);

  for (std::size_t t = 1; t < n_windows; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double cand =
            score[k] + (k == j ? transition.log_stay() : transition.log_switch());
        if (cand > best) {
          best = cand;
          arg = static_cast<int>(k);
        }
      }
      next[j] = best + log_b(t, j);
      backpointer[t * n + j] = arg;
    }
    score.swap(next);
  }

  ViterbiPath path;
  path.states.resize(n_windows);
  const auto last = std::max_element(score.begin(), score.end());
  path.log_joint = *last;
  int state = static_cast<int>(last - score.begin());
  for (std::size_t t = n_windows; t-- > 0;) {
    path.states[t] = state;
    state = backpointer[t * n + static_cast<std::size_t>(state)];
  }
  return path;
}

double path_log_joint(const TransitionModel& transition, const LogEmissionSeries& log_b,
                      std::span<const int> path) {
  check_dimensions(transition, log_b);
  if (path.size() != log_b.n_windows()) {
    throw std::invalid_argument("path length does not match window count");
  }
  double total = -std::log(static_cast<double>(transition.n_states()));
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (path[t] < 0 || path[t] >= transition.n_states()) {
      throw std::out_of_range("path state out of range at window " + std::to_string(t));
    }
    if (t > 0) total += transition.log_transition(path[t - 1], path[t]);
    total += log_b(t, static_cast<std::size_t>(path[t]));
  }
  return total;
}

}  // namespace aadhmm
