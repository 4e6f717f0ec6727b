#include "aadhmm/chain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aadhmm {

TransitionModel::TransitionModel(int n_states, double p_switch)
    : n_states_(n_states), p_switch_(p_switch) {
  if (n_states < 2) {
    throw std::invalid_argument("transition model needs at least 2 states, got " +
                                std::to_string(n_states));
  }
  const double upper = 1.0 / static_cast<double>(n_states - 1);
  if (!(p_switch > 0.0) || !(p_switch < upper)) {
    throw std::invalid_argument("p_switch must lie in (0, " + std::to_string(upper) +
                                ") for " + std::to_string(n_states) + " states, got " +
                                std::to_string(p_switch));
  }
  stay_ = 1.0 - static_cast<double>(n_states - 1) * p_switch;
  // Guards the rounding edge just below the upper bound.
  if (!(stay_ > 0.0)) {
    throw std::invalid_argument("stay probability is not positive");
  }
  log_stay_ = std::log(stay_);
  log_switch_ = std::log(p_switch);
}

void TransitionModel::check_index(int state) const {
  if (state < 0 || state >= n_states_) {
    throw std::out_of_range("state index " + std::to_string(state) + " outside [0, " +
                            std::to_string(n_states_) + ")");
  }
}

double TransitionModel::probability(int from, int to) const {
  check_index(from);
  check_index(to);
  return from == to ? stay_ : p_switch_;
}

double TransitionModel::log_transition(int from, int to) const {
  check_index(from);
  check_index(to);
  return from == to ? log_stay_ : log_switch_;
}

Matrix TransitionModel::matrix() const {
  const auto n = static_cast<std::size_t>(n_states_);
  Matrix a(n, n, p_switch_);
  for (std::size_t j = 0; j < n; ++j) a(j, j) = stay_;
  return a;
}

TransitionModel build_transition(int n_states, double p_switch) {
  return TransitionModel(n_states, p_switch);
}

TransitionModel build_transition_from_rate(int n_states, double rate_per_second,
                                           double window_length) {
  if (!(window_length > 0.0)) {
    throw std::invalid_argument("window length must be positive");
  }
  return TransitionModel(n_states, rate_per_second * window_length);
}

std::vector<double> uniform_log_prior(const TransitionModel& model) {
  return std::vector<double>(static_cast<std::size_t>(model.n_states()),
                             -std::log(static_cast<double>(model.n_states())));
}

}  // namespace aadhmm
