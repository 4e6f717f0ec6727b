#include "aadhmm/emission.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aadhmm {

namespace {

double log_normal_pdf(double z, double mean, double sigma) {
  const double u = (z - mean) / sigma;
  return -0.5 * u * u - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

double clamp_correlation(double x) {
  return std::clamp(x, -1.0 + kClampEpsilon, 1.0 - kClampEpsilon);
}

double fisher_transform(double x) {
  if (!(std::abs(x) < 1.0)) {
    throw std::domain_error("correlation " + std::to_string(x) +
                            " outside (-1, 1); clamp before transforming");
  }
  return std::atanh(x);
}

EmissionModel::EmissionModel(double mu_attended, double mu_unattended, double sigma)
    : mu_attended_(mu_attended), mu_unattended_(mu_unattended), sigma_(sigma) {
  if (!std::isfinite(mu_attended) || !std::isfinite(mu_unattended) || !std::isfinite(sigma)) {
    throw std::invalid_argument("emission parameters must be finite");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("emission sigma must be positive, got " + std::to_string(sigma));
  }
  if (!(mu_attended > mu_unattended)) {
    throw std::invalid_argument("mu_attended (" + std::to_string(mu_attended) +
                                ") must exceed mu_unattended (" +
                                std::to_string(mu_unattended) + ")");
  }
}

ScoreSeries::ScoreSeries(Matrix scores, double window_length)
    : scores_(std::move(scores)), window_length_(window_length) {
  if (!(window_length > 0.0) || !std::isfinite(window_length)) {
    throw std::invalid_argument("window length must be positive");
  }
  for (std::size_t t = 0; t < scores_.rows(); ++t) {
    for (std::size_t j = 0; j < scores_.cols(); ++j) {
      double& x = scores_(t, j);
      if (!std::isfinite(x)) {
        throw std::invalid_argument("non-finite score at window " + std::to_string(t) +
                                    ", state " + std::to_string(j));
      }
      x = clamp_correlation(x);
    }
  }
}

LogEmissionSeries::LogEmissionSeries(Matrix log_b) : log_b_(std::move(log_b)) {
  for (std::size_t t = 0; t < log_b_.rows(); ++t) {
    for (std::size_t j = 0; j < log_b_.cols(); ++j) {
      if (!std::isfinite(log_b_(t, j))) {
        throw std::invalid_argument("non-finite log emission at window " + std::to_string(t) +
                                    ", state " + std::to_string(j));
      }
    }
  }
}

double log_emission(const EmissionModel& model, std::span<const double> x, int state) {
  if (state < 0 || static_cast<std::size_t>(state) >= x.size()) {
    throw std::out_of_range("state index " + std::to_string(state) + " outside score vector");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double z = fisher_transform(x[k]);
    if (!std::isfinite(z)) throw std::domain_error("non-finite transformed score");
    const double mean =
        k == static_cast<std::size_t>(state) ? model.mu_attended() : model.mu_unattended();
    total += log_normal_pdf(z, mean, model.sigma());
  }
  return total;
}

LogEmissionSeries log_emission_series(const EmissionModel& model, const ScoreSeries& series) {
  const std::size_t n_windows = series.n_windows();
  const auto n = static_cast<std::size_t>(series.n_states());
  Matrix log_b(n_windows, n);
  std::vector<double> z(n);
  for (std::size_t t = 0; t < n_windows; ++t) {
    const auto x = series.scores().row(t);
    // Every state shares the unattended terms; only the own-speaker term differs.
    double unattended_sum = 0.0;
    try {
      for (std::size_t k = 0; k < n; ++k) {
        z[k] = fisher_transform(x[k]);
        unattended_sum += log_normal_pdf(z[k], model.mu_unattended(), model.sigma());
      }
    } catch (const std::exception& e) {
      throw std::domain_error("window " + std::to_string(t) + ": " + e.what());
    }
    for (std::size_t j = 0; j < n; ++j) {
      log_b(t, j) = unattended_sum + log_normal_pdf(z[j], model.mu_attended(), model.sigma()) -
                    log_normal_pdf(z[j], model.mu_unattended(), model.sigma());
    }
  }
  return LogEmissionSeries(std::move(log_b));
}

EmissionModel estimate_emission(const ScoreSeries& series, std::span<const int> attended) {
  if (attended.size() != series.n_windows()) {
    throw std::invalid_argument("label count " + std::to_string(attended.size()) +
                                " does not match window count " +
                                std::to_string(series.n_windows()));
  }
  const auto n = static_cast<std::size_t>(series.n_states());
  double sum_att = 0.0, sum_un = 0.0;
  std::size_t n_att = 0, n_un = 0;
  for (std::size_t t = 0; t < series.n_windows(); ++t) {
    const int s = attended[t];
    if (s < 0 || static_cast<std::size_t>(s) >= n) {
      throw std::out_of_range("label " + std::to_string(s) + " at window " + std::to_string(t));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double z = fisher_transform(series.scores()(t, j));
      if (j == static_cast<std::size_t>(s)) {
        sum_att += z;
        ++n_att;
      } else {
        sum_un += z;
        ++n_un;
      }
    }
  }
  if (n_att < 2 || n_un < 2) {
    throw std::invalid_argument("need at least 2 attended and 2 unattended samples");
  }
  const double mean_att = sum_att / static_cast<double>(n_att);
  const double mean_un = sum_un / static_cast<double>(n_un);

  double ss = 0.0;
  for (std::size_t t = 0; t < series.n_windows(); ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      const double z = fisher_transform(series.scores()(t, j));
      const double d = z - (j == static_cast<std::size_t>(attended[t]) ? mean_att : mean_un);
      ss += d * d;
    }
  }
  const double sigma = std::sqrt(ss / static_cast<double>(n_att + n_un - 2));
  if (!(mean_att > mean_un)) {
    throw std::invalid_argument("attended mean does not exceed unattended mean");
  }
  return EmissionModel(mean_att, mean_un, sigma);
}

}  // namespace aadhmm
