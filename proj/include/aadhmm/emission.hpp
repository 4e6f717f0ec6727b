#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aadhmm/matrix.hpp"

namespace aadhmm {

/// Raw correlations are clamped into [-1 + kClampEpsilon, 1 - kClampEpsilon]
/// on ingestion so the Fisher transform stays finite.
inline constexpr double kClampEpsilon = 1e-7;

double clamp_correlation(double x);

/// atanh(x). Throws std::domain_error for |x| >= 1 or NaN.
double fisher_transform(double x);

/// Two-Gaussian score model in Fisher-transformed correlation space:
/// atanh(x_j) ~ N(mu_attended, sigma^2) for the attended speaker and
/// N(mu_unattended, sigma^2) for every other speaker.
class EmissionModel {
 public:
  /// Throws std::invalid_argument unless sigma > 0 and
  /// mu_attended > mu_unattended (all finite).
  EmissionModel(double mu_attended, double mu_unattended, double sigma);

  double mu_attended() const { return mu_attended_; }
  double mu_unattended() const { return mu_unattended_; }
  double sigma() const { return sigma_; }
  /// (mu_attended - mu_unattended) / sigma
  double dprime() const { return (mu_attended_ - mu_unattended_) / sigma_; }

  bool operator==(const EmissionModel&) const = default;

 private:
  double mu_attended_;
  double mu_unattended_;
  double sigma_;
};

/// T x N correlation scores with the window length in seconds. Entries are
/// clamped on construction; non-finite entries are rejected.
class ScoreSeries {
 public:
  ScoreSeries(Matrix scores, double window_length);

  const Matrix& scores() const { return scores_; }
  double window_length() const { return window_length_; }
  std::size_t n_windows() const { return scores_.rows(); }
  int n_states() const { return static_cast<int>(scores_.cols()); }

 private:
  Matrix scores_;
  double window_length_;
};

/// T x N matrix of ln b_j(t). All entries must be finite.
class LogEmissionSeries {
 public:
  explicit LogEmissionSeries(Matrix log_b);

  const Matrix& values() const { return log_b_; }
  std::size_t n_windows() const { return log_b_.rows(); }
  int n_states() const { return static_cast<int>(log_b_.cols()); }
  double operator()(std::size_t t, std::size_t j) const { return log_b_(t, j); }
  std::span<const double> row(std::size_t t) const { return log_b_.row(t); }

 private:
  Matrix log_b_;
};

/// ln b_j = ln N(atanh x_j; mu_att, sigma^2) + sum_{k != j} ln N(atanh x_k; mu_unatt, sigma^2).
double log_emission(const EmissionModel& model, std::span<const double> x, int state);

/// Applies log_emission to every (window, state). Errors carry the window index.
LogEmissionSeries log_emission_series(const EmissionModel& model, const ScoreSeries& series);

/// Supervised fit from scores and the true attended state per window.
/// Means are taken over the Fisher-transformed scores of each group; sigma is
/// the pooled (unbiased) standard deviation of both groups.
EmissionModel estimate_emission(const ScoreSeries& series, std::span<const int> attended);

}  // namespace aadhmm
