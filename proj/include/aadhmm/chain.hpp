#pragma once

#include <cstddef>
#include <vector>

#include "aadhmm/matrix.hpp"

namespace aadhmm {

/// Attention-state Markov chain over N speakers. Every ordered pair of
/// distinct speakers shares the same per-window switch probability, so the
/// chain is fully described by (N, p_switch).
///
/// Immutable after construction; the log-domain entries are cached because
/// the decoders read them O(T*N^2) times.
class TransitionModel {
 public:
  /// Throws std::invalid_argument unless n_states >= 2 and
  /// 0 < p_switch < 1/(n_states-1).
  TransitionModel(int n_states, double p_switch);

  int n_states() const { return n_states_; }
  double p_switch() const { return p_switch_; }
  double stay_probability() const { return stay_; }

  /// a(from, to). Throws std::out_of_range on bad indices.
  double probability(int from, int to) const;
  /// ln a(from, to). Always finite.
  double log_transition(int from, int to) const;

  double log_stay() const { return log_stay_; }
  double log_switch() const { return log_switch_; }

  /// Full N x N matrix, rows indexed by the source state.
  Matrix matrix() const;

 private:
  void check_index(int state) const;

  int n_states_;
  double p_switch_;
  double stay_;
  double log_stay_;
  double log_switch_;
};

TransitionModel build_transition(int n_states, double p_switch);

/// Per-second switching rate scaled to a window: p_switch = rate * window_length.
TransitionModel build_transition_from_rate(int n_states, double rate_per_second,
                                           double window_length);

/// Every entry is -ln(N).
std::vector<double> uniform_log_prior(const TransitionModel& model);

}  // namespace aadhmm
