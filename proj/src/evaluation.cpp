#include "aadhmm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aadhmm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::kCausal: return "causal";
    case EvalMode::kNonCausal: return "non-causal";
    case EvalMode::kViterbi: return "viterbi";
  }
  return "unknown";
}

EvalMode eval_mode_from_string(std::string_view name) {
  if (name == "causal" || name == "forward") return EvalMode::kCausal;
  if (name == "non-causal" || name == "noncausal" || name == "forward_backward") {
    return EvalMode::kNonCausal;
  }
  if (name == "viterbi") return EvalMode::kViterbi;
  throw std::invalid_argument("unknown evaluation mode '" + std::string(name) + "'");
}

EvalMode eval_mode_for(DecodeMode mode) {
  return mode == DecodeMode::kCausal ? EvalMode::kCausal : EvalMode::kNonCausal;
}

std::size_t EvalReport::missed_switches() const {
  return static_cast<std::size_t>(std::count_if(
      switch_detections.begin(), switch_detections.end(),
      [](const SwitchDetection& d) { return d.missed; }));
}

std::vector<int> decisions_from_posterior(const PosteriorSeries& posterior) {
  std::vector<int> out(posterior.n_windows());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto row = posterior.probabilities.row(t);
    out[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

std::vector<int> decisions_from_scores(const ScoreSeries& scores) {
  std::vector<int> out(scores.n_windows());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto row = scores.scores().row(t);
    out[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

double window_accuracy(std::span<const int> decisions, std::span<const int> truth) {
  if (decisions.size() != truth.size() || truth.empty()) {
    throw std::invalid_argument("decision and truth lengths differ or are empty");
  }
  std::size_t correct = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) correct += decisions[t] == truth[t];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

EvalReport detect_switches(std::span<const int> decisions, const AttentionTrajectory& truth,
                           EvalMode mode) {
  const std::size_t n_windows = truth.n_windows();
  if (decisions.size() != n_windows) {
    throw std::invalid_argument("decision length " + std::to_string(decisions.size()) +
                                " does not match truth length " + std::to_string(n_windows));
  }
  if (n_windows == 0) throw std::invalid_argument("cannot evaluate an empty trial");
  const double tau = truth.window_length;
  const bool search_backward = mode != EvalMode::kCausal;

  // Block boundaries: trial start, every true switch, trial end.
  std::vector<std::size_t> bounds{0};
  for (std::size_t s : truth.switch_indices()) bounds.push_back(s);
  bounds.push_back(n_windows);

  EvalReport report;
  report.mode = mode;
  auto score_range = [&](std::size_t from, std::size_t to) {
    for (std::size_t t = from; t < to; ++t) {
      ++report.scored_windows;
      report.correct_windows += decisions[t] == truth.states[t];
    }
  };

  score_range(bounds[0], bounds[1]);
  // Lowest window an early detection of the next switch may reach back to.
  std::size_t floor_index = 0;
  for (std::size_t i = 1; i + 1 < bounds.size(); ++i) {
    const std::size_t s = bounds[i];
    const std::size_t next = bounds[i + 1];
    const int target = truth.states[s];

    std::optional<std::size_t> detected;
    if (search_backward) {
      std::size_t t = s;
      while (t > floor_index && decisions[t - 1] == target) --t;
      if (t < s) detected = t;
    }
    if (!detected) {
      for (std::size_t t = s; t < next; ++t) {
        if (decisions[t] == target) {
          detected = t;
          break;
        }
      }
    }

    SwitchDetection d;
    d.true_time = static_cast<double>(s) * tau;
    if (detected) {
      d.detected_time = static_cast<double>(*detected) * tau;
      d.delay = std::abs(*d.detected_time - d.true_time);
      score_range(std::max(*detected, s), next);
      floor_index = *detected + 1;
    } else {
      d.missed = true;
      d.delay = static_cast<double>(next - s) * tau;
      score_range(s, next);
      floor_index = s;
    }
    report.switch_detections.push_back(d);
  }

  report.accuracy =
      static_cast<double>(report.correct_windows) / static_cast<double>(report.scored_windows);
  if (report.switch_detections.empty()) {
    report.mean_abs_detection_time = kNaN;
  } else {
    double sum = 0.0;
    for (const auto& d : report.switch_detections) sum += d.delay;
    report.mean_abs_detection_time = sum / static_cast<double>(report.switch_detections.size());
  }
  return report;
}

SummaryStats summarize(std::span<const double> values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  SummaryStats s;
  s.count = v.size();
  if (v.empty()) {
    s.mean = s.sd = s.q25 = s.median = s.q75 = kNaN;
    return s;
  }
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  s.q25 = quantile_sorted(v, 0.25);
  s.median = quantile_sorted(v, 0.5);
  s.q75 = quantile_sorted(v, 0.75);
  return s;
}

AggregateReport aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw std::invalid_argument("cannot aggregate an empty report list");
  std::vector<double> acc, delay;
  AggregateReport out;
  out.n_reports = reports.size();
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    delay.push_back(r.mean_abs_detection_time);
    out.total_switches += r.switch_detections.size();
    out.missed_switches += r.missed_switches();
  }
  out.accuracy = summarize(acc);
  out.detection_time = summarize(delay);
  return out;
}

}  // namespace aadhmm
