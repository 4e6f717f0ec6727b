#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "aadhmm/chain.hpp"
#include "aadhmm/emission.hpp"
#include "aadhmm/matrix.hpp"

namespace aadhmm {

enum class DecodeMode { kCausal, kNonCausal };

std::string_view to_string(DecodeMode mode);

/// Per-window attention probabilities. Rows sum to one.
struct PosteriorSeries {
  Matrix probabilities;
  DecodeMode mode = DecodeMode::kCausal;

  std::size_t n_windows() const { return probabilities.rows(); }
  int n_states() const { return static_cast<int>(probabilities.cols()); }
};

struct ViterbiPath {
  std::vector<int> states;
  /// ln of the maximised joint probability p(S_{0:T}, x_{0:T}).
  double log_joint = 0.0;
};

/// max + ln sum exp(v - max). Entries may be -inf as long as one is not.
/// Throws std::invalid_argument for an empty input or all -inf.
double log_sum_exp(std::span<const double> values);

/// Snapshot of the causal filter after some number of windows. Restoring it
/// continues the recursion exactly where it stopped.
struct ForwardCheckpoint {
  /// Normalised ln alpha at the last processed window (log posterior).
  std::vector<double> log_alpha;
  /// Accumulated normaliser, so that ln alpha_true = log_alpha + log_scale.
  double log_scale = 0.0;
  std::size_t windows_seen = 0;
};

/// Streaming causal decoder. Each call to update() consumes one row of log
/// emissions and returns P(S(t) = j | x_{0:t}).
class ForwardFilter {
 public:
  explicit ForwardFilter(TransitionModel transition);
  ForwardFilter(TransitionModel transition, ForwardCheckpoint checkpoint);

  /// Writes the posterior of the new window into `posterior` (size N).
  void update(std::span<const double> log_b_row, std::span<double> posterior);
  std::vector<double> update(std::span<const double> log_b_row);

  const ForwardCheckpoint& checkpoint() const { return state_; }
  /// ln p(x_{0:t}) of everything consumed so far.
  double log_likelihood() const;
  const TransitionModel& transition() const { return transition_; }

 private:
  TransitionModel transition_;
  ForwardCheckpoint state_;
  std::vector<double> scratch_;
  std::vector<double> next_;
};

/// Causal posteriors P(S(t)=j | x_{0:t}) for every window, one pass.
PosteriorSeries forward(const TransitionModel& transition, const LogEmissionSeries& log_b);

/// Non-causal posteriors P(S(t)=j | x_{0:T}).
PosteriorSeries forward_backward(const TransitionModel& transition,
                                 const LogEmissionSeries& log_b);

/// Most probable state sequence. Ties break toward the smaller state index,
/// both for the predecessor choice and the final state.
ViterbiPath viterbi(const TransitionModel& transition, const LogEmissionSeries& log_b);

/// ln p(path) + sum_t ln b_{path(t)}(t) under a uniform prior.
double path_log_joint(const TransitionModel& transition, const LogEmissionSeries& log_b,
                      std::span<const int> path);

}  // namespace aadhmm
