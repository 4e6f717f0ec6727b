#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "aadhmm/inference.hpp"
#include "doctest.h"
#include "support/oracle.hpp"

using namespace aadhmm;
using aadhmm::testing::exhaustive_best_path;
using aadhmm::testing::exhaustive_posterior;
using aadhmm::testing::literal_posterior;
using aadhmm::testing::random_log_emissions;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

LogEmissionSeries constant_rows(std::size_t n_windows, int n_states) {
  Matrix m(n_windows, static_cast<std::size_t>(n_states));
  for (std::size_t t = 0; t < n_windows; ++t) {
    for (auto& v : m.row(t)) v = -0.3 * static_cast<double>(t);
  }
  return LogEmissionSeries(m);
}

// The frozen 2-state, 4-window instance used by the forward example.
LogEmissionSeries seeded_table(std::uint64_t seed, std::size_t n_windows, int n_states) {
  std::mt19937_64 rng(seed);
  return random_log_emissions(rng, n_windows, n_states);
}

}  // namespace

TEST_CASE("log_sum_exp") {
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(log_sum_exp(zeros) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<double> deep{-1000.0, -1000.0};
  CHECK(log_sum_exp(deep) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
  for (double c : {-1e300, -5.0, 0.0, 3.7, 1e300}) {
    const std::vector<double> one{c};
    CHECK(log_sum_exp(one) == c);
  }
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> mixed{ninf, std::log(0.25), std::log(0.75)};
  CHECK(log_sum_exp(mixed) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{ninf, ninf}), std::invalid_argument);
}

TEST_CASE("uniform emissions give uniform posteriors") {
  for (int n : {2, 3, 4}) {
    const auto tr = build_transition(n, 0.02);
    const auto log_b = constant_rows(7, n);
    for (const auto& post : {forward(tr, log_b), forward_backward(tr, log_b)}) {
      for (double p : post.probabilities.data()) CHECK(p == doctest::Approx(1.0 / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("p_switch = 1/N makes the chain carry no information") {
  const auto tr = build_transition(2, 0.5);
  const auto log_b = seeded_table(8, 10, 2);
  const auto post = forward(tr, log_b);
  for (std::size_t t = 0; t < 10; ++t) {
    const double p0 = 1.0 / (1.0 + std::exp(log_b(t, 1) - log_b(t, 0)));
    CHECK(post.probabilities(t, 0) == doctest::Approx(p0).epsilon(1e-12));
  }
}

TEST_CASE("forward matches causal path enumeration (N=2, p=0.1, T=4)") {
  const auto tr = build_transition(2, 0.1);
  const auto log_b = seeded_table(1234, 4, 2);
  const auto post = forward(tr, log_b);
  CHECK(post.mode == DecodeMode::kCausal);
  // Causal marginal at t is the smoothed marginal of the prefix ending at t.
  for (std::size_t t = 0; t < 4; ++t) {
    Matrix prefix(t + 1, 2);
    for (std::size_t s = 0; s <= t; ++s) {
      for (std::size_t j = 0; j < 2; ++j) prefix(s, j) = log_b(s, j);
    }
    const auto oracle = exhaustive_posterior(tr, LogEmissionSeries(prefix));
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(std::abs(post.probabilities(t, j) - oracle(t, j)) < 1e-10);
    }
  }
}

TEST_CASE("forward_backward matches path enumeration (N=3, p=0.05, T=6)") {
  const auto tr = build_transition(3, 0.05);
  const auto log_b = seeded_table(99, 6, 3);
  const auto post = forward_backward(tr, log_b);
  CHECK(post.mode == DecodeMode::kNonCausal);
  CHECK(max_abs_diff(post.probabilities, exhaustive_posterior(tr, log_b)) < 1e-10);
  CHECK(max_abs_diff(post.probabilities, literal_posterior(tr, log_b)) < 1e-10);
}

TEST_CASE("the two enumeration oracles agree") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const int n = 2 + i % 2;
    const auto tr = build_transition(n, 0.03 + 0.01 * (i % 5));
    const auto log_b = random_log_emissions(rng, 1 + i % 7, n, 1.0);
    CHECK(max_abs_diff(exhaustive_posterior(tr, log_b), literal_posterior(tr, log_b)) < 1e-12);
  }
}

TEST_CASE("single window") {
  const auto tr = build_transition(3, 0.1);
  const auto log_b = seeded_table(4, 1, 3);
  const auto f = forward(tr, log_b);
  const auto fb = forward_backward(tr, log_b);
  const auto oracle = exhaustive_posterior(tr, log_b);
  const double lse = log_sum_exp(log_b.row(0));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(f.probabilities(0, j) == doctest::Approx(std::exp(log_b(0, j) - lse)).epsilon(1e-13));
    CHECK(fb.probabilities(0, j) == doctest::Approx(f.probabilities(0, j)).epsilon(1e-13));
    CHECK(oracle(0, j) == doctest::Approx(f.probabilities(0, j)).epsilon(1e-13));
  }
  const auto path = viterbi(tr, log_b);
  const auto row = log_b.row(0);
  CHECK(path.states[0] == std::max_element(row.begin(), row.end()) - row.begin());
}

TEST_CASE("viterbi matches the exhaustive maximum (N=2, p=0.1, T=5)") {
  const auto tr = build_transition(2, 0.1);
  const auto log_b = seeded_table(31337, 5, 2);
  const auto best = exhaustive_best_path(tr, log_b);
  const auto path = viterbi(tr, log_b);
  REQUIRE(best.log_joint - best.runner_up > 1e-9);
  CHECK(path.states == best.states);
  CHECK(std::abs(path.log_joint - best.log_joint) < 1e-10);
  CHECK(std::abs(path_log_joint(tr, log_b, path.states) - path.log_joint) < 1e-10);
}

TEST_CASE("dominant evidence gives a constant Viterbi path") {
  const auto tr = build_transition(3, 0.2);
  Matrix m(20, 3, -50.0);
  for (std::size_t t = 0; t < 20; ++t) m(t, 2) = 0.0;
  const auto path = viterbi(tr, LogEmissionSeries(m));
  CHECK(path.states == std::vector<int>(20, 2));
}

TEST_CASE("ties break toward the smaller state index") {
  for (int n : {2, 3, 5}) {
    const auto tr = build_transition(n, 0.5 / n);
    const auto log_b = constant_rows(9, n);
    const auto a = viterbi(tr, log_b);
    const auto b = viterbi(tr, log_b);
    CHECK(a.states == std::vector<int>(9, 0));
    CHECK(a.states == b.states);
    CHECK(a.log_joint == b.log_joint);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const auto tr = build_transition(3, 0.1);
  const auto log_b = seeded_table(1, 4, 2);
  CHECK_THROWS_AS(forward(tr, log_b), std::invalid_argument);
  CHECK_THROWS_AS(forward_backward(tr, log_b), std::invalid_argument);
  CHECK_THROWS_AS(viterbi(tr, log_b), std::invalid_argument);
  CHECK_THROWS_AS(forward(tr, LogEmissionSeries(Matrix(0, 3))), std::invalid_argument);
  ForwardFilter f(tr);
  CHECK_THROWS_AS(f.update(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("exhaustive oracle refuses large instances") {
  const auto tr = build_transition(3, 0.1);
  const auto log_b = constant_rows(13, 3);  // 3^13 > 1e6
  CHECK_THROWS_AS(exhaustive_posterior(tr, log_b), std::length_error);
}

TEST_CASE("streaming filter resumes from a checkpoint") {
  const auto tr = build_transition(3, 0.02);
  const auto log_b = seeded_table(77, 50, 3);
  const auto full = forward(tr, log_b);

  ForwardFilter first(tr);
  for (std::size_t t = 0; t < 20; ++t) first.update(log_b.row(t));
  ForwardFilter resumed(tr, first.checkpoint());
  CHECK(resumed.checkpoint().windows_seen == 20);
  for (std::size_t t = 20; t < 50; ++t) {
    const auto p = resumed.update(log_b.row(t));
    for (std::size_t j = 0; j < 3; ++j) CHECK(p[j] == full.probabilities(t, j));
  }
}

TEST_CASE("filter log-likelihood equals the enumerated evidence") {
  const auto tr = build_transition(2, 0.07);
  const auto log_b = seeded_table(6, 6, 2);
  ForwardFilter f(tr);
  for (std::size_t t = 0; t < 6; ++t) f.update(log_b.row(t));
  std::vector<double> weights;
  std::vector<int> path(6);
  for (std::size_t i = 0; i < 64; ++i) {
    aadhmm::testing::path_from_index(i, 2, path);
    weights.push_back(aadhmm::testing::literal_log_weight(tr, log_b.values(), path));
  }
  CHECK(f.log_likelihood() == doctest::Approx(log_sum_exp(weights)).epsilon(1e-12));
}

// Property suite over seeded random instances.

TEST_CASE("oracle equivalence over random instances") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> p_frac(0.01, 0.95);
  int compared_paths = 0;
  for (int i = 0; i < 240; ++i) {
    const int n = 2 + i % 2;
    const std::size_t n_windows = 1 + static_cast<std::size_t>(i % 8);
    const auto tr = build_transition(n, p_frac(rng) / (n - 1));
    const auto log_b = random_log_emissions(rng, n_windows, n);
    CHECK(max_abs_diff(forward_backward(tr, log_b).probabilities, exhaustive_posterior(tr, log_b)) <
          1e-9);
    const auto best = exhaustive_best_path(tr, log_b);
    const auto path = viterbi(tr, log_b);
    CHECK(std::abs(path.log_joint - best.log_joint) < 1e-9);
    if (best.log_joint - best.runner_up > 1e-9) {
      CHECK(path.states == best.states);
      ++compared_paths;
    }
  }
  CHECK(compared_paths > 200);
}

TEST_CASE("causal and non-causal agree at the final window") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + i % 3;
    const auto tr = build_transition(n, 0.01 + 0.002 * i / n);
    const auto log_b = random_log_emissions(rng, 1 + static_cast<std::size_t>(i) * 7, n);
    const auto f = forward(tr, log_b);
    const auto fb = forward_backward(tr, log_b);
    const std::size_t last = log_b.n_windows() - 1;
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
      CHECK(std::abs(f.probabilities(last, j) - fb.probabilities(last, j)) < 1e-9);
    }
  }
}

TEST_CASE("row-constant emission shifts change nothing") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> shift(0.0, 50.0);
  for (int i = 0; i < 40; ++i) {
    const int n = 2 + i % 3;
    const auto tr = build_transition(n, 0.05);
    const auto log_b = random_log_emissions(rng, 30, n);
    Matrix shifted = log_b.values();
    double total_shift = 0.0;
    for (std::size_t t = 0; t < shifted.rows(); ++t) {
      const double c = shift(rng);
      total_shift += c;
      for (auto& v : shifted.row(t)) v += c;
    }
    const LogEmissionSeries log_b2(shifted);
    CHECK(max_abs_diff(forward(tr, log_b).probabilities, forward(tr, log_b2).probabilities) < 1e-12);
    CHECK(max_abs_diff(forward_backward(tr, log_b).probabilities,
                       forward_backward(tr, log_b2).probabilities) < 1e-12);
    const auto v1 = viterbi(tr, log_b);
    const auto v2 = viterbi(tr, log_b2);
    CHECK(v1.states == v2.states);
    CHECK(v2.log_joint - v1.log_joint == doctest::Approx(total_shift).epsilon(1e-10));
  }
}

TEST_CASE("relabeling states permutes the outputs") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 40; ++i) {
    const int n = 2 + i % 3;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto tr = build_transition(n, 0.04);
    const auto log_b = random_log_emissions(rng, 25, n);
    // New state perm[j] carries old state j's emissions.
    Matrix permuted(log_b.n_windows(), static_cast<std::size_t>(n));
    for (std::size_t t = 0; t < log_b.n_windows(); ++t) {
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
        permuted(t, static_cast<std::size_t>(perm[j])) = log_b(t, j);
      }
    }
    const LogEmissionSeries log_p(permuted);
    const auto fb = forward_backward(tr, log_b);
    const auto fbp = forward_backward(tr, log_p);
    const auto f = forward(tr, log_b);
    const auto fp = forward(tr, log_p);
    for (std::size_t t = 0; t < log_b.n_windows(); ++t) {
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
        const auto pj = static_cast<std::size_t>(perm[j]);
        CHECK(std::abs(fb.probabilities(t, j) - fbp.probabilities(t, pj)) < 1e-12);
        CHECK(std::abs(f.probabilities(t, j) - fp.probabilities(t, pj)) < 1e-12);
      }
    }
    const auto v = viterbi(tr, log_b);
    const auto vp = viterbi(tr, log_p);
    std::vector<int> mapped(v.states.size());
    for (std::size_t t = 0; t < mapped.size(); ++t) mapped[t] = perm[static_cast<std::size_t>(v.states[t])];
    CHECK(mapped == vp.states);
    CHECK(v.log_joint == doctest::Approx(vp.log_joint).epsilon(1e-12));
  }
}

TEST_CASE("smoother is symmetric under time reversal") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 30; ++i) {
    const int n = 2 + i % 3;
    const auto tr = build_transition(n, 0.03);
    const auto log_b = random_log_emissions(rng, 40 + static_cast<std::size_t>(i), n);
    const std::size_t n_windows = log_b.n_windows();
    Matrix reversed(n_windows, static_cast<std::size_t>(n));
    for (std::size_t t = 0; t < n_windows; ++t) {
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
        reversed(t, j) = log_b(n_windows - 1 - t, j);
      }
    }
    const auto fwd = forward_backward(tr, log_b);
    const auto rev = forward_backward(tr, LogEmissionSeries(reversed));
    for (std::size_t t = 0; t < n_windows; ++t) {
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
        CHECK(std::abs(fwd.probabilities(t, j) - rev.probabilities(n_windows - 1 - t, j)) < 1e-9);
      }
    }
  }
}

TEST_CASE("posterior rows are normalised on long runs") {
  std::mt19937_64 rng(18);
  const auto tr = build_transition(3, 0.001);
  const auto log_b = random_log_emissions(rng, 100000, 3, 5.0);
  for (const auto& post : {forward(tr, log_b), forward_backward(tr, log_b)}) {
    for (std::size_t t = 0; t < post.n_windows(); ++t) {
      double sum = 0.0;
      for (double p : post.probabilities.row(t)) {
        REQUIRE(std::isfinite(p));
        REQUIRE(p >= 0.0);
        REQUIRE(p <= 1.0);
        sum += p;
      }
      REQUIRE(std::abs(sum - 1.0) < 1e-9);
    }
  }
}
