#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "aadhmm/emission.hpp"
#include "aadhmm/synthesis.hpp"
#include "doctest.h"

using namespace aadhmm;

namespace {

// Written out from the Gaussian density without sharing code with the library.
double straight_log_emission(double mu_att, double mu_un, double sigma,
                             const std::vector<double>& x, std::size_t j) {
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double z = 0.5 * std::log((1 + x[k]) / (1 - x[k]));
    const double mu = k == j ? mu_att : mu_un;
    total += std::log(std::exp(-(z - mu) * (z - mu) / (2 * sigma * sigma)) /
                      (sigma * std::sqrt(2 * std::numbers::pi)));
  }
  return total;
}

}  // namespace

TEST_CASE("fisher transform") {
  CHECK(fisher_transform(0.0) == 0.0);
  CHECK(fisher_transform(0.5) == doctest::Approx(0.5493061443340549).epsilon(1e-15));
  CHECK(fisher_transform(0.5) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-15));
  for (double x : {0.01, 0.3, 0.77, 0.999}) CHECK(fisher_transform(-x) == -fisher_transform(x));
  CHECK(fisher_transform(0.2) < fisher_transform(0.21));
  CHECK_THROWS_AS(fisher_transform(1.0), std::domain_error);
  CHECK_THROWS_AS(fisher_transform(-1.0), std::domain_error);
  CHECK_THROWS_AS(fisher_transform(std::nan("")), std::domain_error);
}

TEST_CASE("clamping keeps ordering and finiteness") {
  CHECK(clamp_correlation(1.0) == 1.0 - kClampEpsilon);
  CHECK(clamp_correlation(-1.0) == -1.0 + kClampEpsilon);
  CHECK(clamp_correlation(0.3) == 0.3);
  CHECK(std::isfinite(fisher_transform(clamp_correlation(1.0))));
  const ScoreSeries s(Matrix(1, 2, 1.0), 1.0);
  CHECK(s.scores()(0, 0) == 1.0 - kClampEpsilon);
}

TEST_CASE("emission model validation") {
  CHECK_NOTHROW(EmissionModel(0.1, 0.0, 0.2));
  CHECK_THROWS_AS(EmissionModel(0.1, 0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(EmissionModel(0.0, 0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(EmissionModel(0.1, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(EmissionModel(0.1, 0.0, -1.0), std::invalid_argument);
  CHECK(EmissionModel(0.3, 0.1, 0.4).dprime() == doctest::Approx(0.5));
}

TEST_CASE("log emission at the means is the squared peak density") {
  const EmissionModel m(0.25, 0.05, 0.3);
  const std::vector<double> x{std::tanh(0.25), std::tanh(0.05)};
  const double peak = std::log(1.0 / (0.3 * std::sqrt(2 * std::numbers::pi)));
  CHECK(log_emission(m, x, 0) == doctest::Approx(2 * peak).epsilon(1e-13));
  CHECK_THROWS_AS(log_emission(m, x, 2), std::out_of_range);
  CHECK_THROWS_AS(log_emission(m, std::vector<double>{1.0, 0.0}, 0), std::domain_error);
}

TEST_CASE("equal means give state-independent emissions") {
  // The constructor rejects mu_att == mu_un, so check the formula directly.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    CHECK(straight_log_emission(0.1, 0.1, 0.2, x, 0) ==
          doctest::Approx(straight_log_emission(0.1, 0.1, 0.2, x, 1)).epsilon(1e-13));
  }
}

TEST_CASE("two-speaker log-likelihood ratio closed form") {
  const EmissionModel m(0.31, -0.02, 0.17);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    const double lhs = log_emission(m, x, 0) - log_emission(m, x, 1);
    const double rhs = (m.mu_attended() - m.mu_unattended()) / (m.sigma() * m.sigma()) *
                       (std::atanh(x[0]) - std::atanh(x[1]));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("increasing own score strictly increases own emission") {
  const EmissionModel m(0.2, 0.0, 0.25);
  // Relative to every other state, over the whole score range.
  std::vector<double> x{-0.4, -0.9, 0.3};
  double prev_0 = log_emission(m, x, 1) - log_emission(m, x, 0);
  double prev_2 = log_emission(m, x, 1) - log_emission(m, x, 2);
  for (int i = 0; i < 100; ++i) {
    x[1] += 0.018;
    const double cur_0 = log_emission(m, x, 1) - log_emission(m, x, 0);
    const double cur_2 = log_emission(m, x, 1) - log_emission(m, x, 2);
    CHECK(cur_0 > prev_0);
    CHECK(cur_2 > prev_2);
    prev_0 = cur_0, prev_2 = cur_2;
  }
  // In absolute terms up to the attended mean, where the density peaks.
  x = {-0.4, -0.9, 0.3};
  double prev = log_emission(m, x, 1);
  while (x[1] + 0.01 < std::tanh(m.mu_attended())) {
    x[1] += 0.01;
    const double cur = log_emission(m, x, 1);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("argmax emission frequency matches a direct Monte-Carlo oracle") {
  const EmissionModel m(0.35, 0.05, 0.3);
  constexpr int kDraws = 1000000;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> unit(0.0, 1.0);

  int hits = 0;
  std::vector<double> x(3);
  for (int i = 0; i < kDraws; ++i) {
    for (int j = 0; j < 3; ++j) {
      x[j] = std::tanh((j == 2 ? m.mu_attended() : m.mu_unattended()) + m.sigma() * unit(rng));
    }
    int best = 0;
    double best_v = log_emission(m, x, 0);
    for (int j = 1; j < 3; ++j) {
      const double v = log_emission(m, x, j);
      if (v > best_v) best_v = v, best = j;
    }
    hits += best == 2;
  }

  // Oracle: draw the raw Gaussian separations for an independent stream and
  // count how often the attended one is largest.
  std::mt19937_64 rng2(77);
  int oracle_hits = 0;
  const double d = m.dprime();
  for (int i = 0; i < kDraws; ++i) {
    const double a = d + unit(rng2), b = unit(rng2), c = unit(rng2);
    oracle_hits += a > b && a > c;
  }
  const double freq = static_cast<double>(hits) / kDraws;
  const double oracle = static_cast<double>(oracle_hits) / kDraws;
  CHECK(std::abs(freq - oracle) < 3e-3);
}

TEST_CASE("log emission series") {
  const EmissionModel m(0.3, 0.0, 0.2);
  SUBCASE("single window reduces to log_emission") {
    Matrix s(1, 3);
    s(0, 0) = 0.1, s(0, 1) = -0.2, s(0, 2) = 0.4;
    const auto series = log_emission_series(m, ScoreSeries(s, 1.0));
    for (int j = 0; j < 3; ++j) {
      CHECK(series(0, j) == doctest::Approx(log_emission(m, s.row(0), j)).epsilon(1e-13));
    }
  }
  SUBCASE("synthesized series matches the straight-line oracle") {
    SynthesisConfig cfg;
    cfg.emission = m;
    cfg.trial_length = 3;
    cfg.switch_interval = 3;
    cfg.seed = 5;
    const auto trial = simulate(cfg);
    REQUIRE(trial.scores.n_windows() == 3);
    const auto series = log_emission_series(m, trial.scores);
    for (std::size_t t = 0; t < 3; ++t) {
      const auto r = trial.scores.scores().row(t);
      const std::vector<double> x(r.begin(), r.end());
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(series(t, j) - straight_log_emission(0.3, 0.0, 0.2, x, j)) < 1e-12);
      }
    }
  }
}

TEST_CASE("log emission series rejects non-finite input with the window index") {
  CHECK_THROWS_AS(ScoreSeries(Matrix(2, 2, std::nan("")), 1.0), std::invalid_argument);
  Matrix bad(2, 2, 0.0);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(LogEmissionSeries{bad}, doctest::Contains("window 1"),
                       std::invalid_argument);
}

TEST_CASE("estimate_emission") {
  SUBCASE("generate-then-fit recovers the parameters") {
    SynthesisConfig cfg;
    cfg.emission = EmissionModel(0.2, 0.1, 0.1);
    cfg.trial_length = 100000;
    cfg.switch_interval = 300;
    cfg.seed = 42;
    const auto trial = simulate(cfg);
    const auto fit = estimate_emission(trial.scores, trial.truth.states);
    CHECK(std::abs(fit.mu_attended() / 0.2 - 1) < 0.01);
    CHECK(std::abs(fit.mu_unattended() / 0.1 - 1) < 0.01);
    CHECK(std::abs(fit.sigma() / 0.1 - 1) < 0.01);
  }
  SUBCASE("constant groups have zero variance and are rejected") {
    Matrix s(4, 2);
    for (std::size_t t = 0; t < 4; ++t) s(t, 0) = std::tanh(0.3), s(t, 1) = std::tanh(0.1);
    const std::vector<int> truth(4, 0);
    CHECK_THROWS_AS(estimate_emission(ScoreSeries(s, 1.0), truth), std::invalid_argument);
  }
  SUBCASE("pooling equal within-group variances") {
    const double delta = 0.05;
    Matrix s(4, 2);
    for (std::size_t t = 0; t < 4; ++t) {
      const double sign = t % 2 ? 1.0 : -1.0;
      s(t, 0) = std::tanh(0.3 + sign * delta);
      s(t, 1) = std::tanh(0.1 - sign * delta);
    }
    const std::vector<int> truth(4, 0);
    const double v = 4 * delta * delta / 3;  // sample variance of each group
    const auto fit = estimate_emission(ScoreSeries(s, 1.0), truth);
    CHECK(fit.sigma() == doctest::Approx(std::sqrt(v)).epsilon(1e-12));
    CHECK(fit.mu_attended() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(fit.mu_unattended() == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("insufficient or inverted data") {
    Matrix s(1, 2, 0.1);
    CHECK_THROWS_AS(estimate_emission(ScoreSeries(s, 1.0), std::vector<int>{0}),
                    std::invalid_argument);
    Matrix inv(4, 2);
    for (std::size_t t = 0; t < 4; ++t) inv(t, 0) = 0.1 + 0.01 * t, inv(t, 1) = 0.3 - 0.01 * t;
    CHECK_THROWS_AS(estimate_emission(ScoreSeries(inv, 1.0), std::vector<int>(4, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_emission(ScoreSeries(inv, 1.0), std::vector<int>(3, 0)),
                    std::invalid_argument);
  }
}
