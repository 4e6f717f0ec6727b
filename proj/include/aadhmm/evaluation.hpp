#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aadhmm/inference.hpp"
#include "aadhmm/synthesis.hpp"

namespace aadhmm {

/// Which decoder produced a decision sequence. Causal decisions are only
/// searched forward from a true switch; non-causal and Viterbi decisions may
/// also be credited with an early detection.
enum class EvalMode { kCausal, kNonCausal, kViterbi };

std::string_view to_string(EvalMode mode);
EvalMode eval_mode_from_string(std::string_view name);
EvalMode eval_mode_for(DecodeMode mode);

struct SwitchDetection {
  double true_time = 0.0;                ///< s
  std::optional<double> detected_time;   ///< s, empty when missed
  double delay = 0.0;                    ///< |detected - true| s, or the gap when missed
  bool missed = false;
};

struct EvalReport {
  double accuracy = 0.0;  ///< steady-state accuracy in [0, 1]
  std::vector<SwitchDetection> switch_detections;
  /// Mean delay over switch_detections; NaN when the trial has no switch.
  double mean_abs_detection_time = 0.0;
  EvalMode mode = EvalMode::kCausal;
  std::size_t scored_windows = 0;
  std::size_t correct_windows = 0;

  std::size_t missed_switches() const;
};

/// Per-window argmax, smaller index on ties.
std::vector<int> decisions_from_posterior(const PosteriorSeries& posterior);

/// Argmax over the raw correlations of each window (no post-processing).
std::vector<int> decisions_from_scores(const ScoreSeries& scores);

/// Fraction of windows where decisions equal the truth.
double window_accuracy(std::span<const int> decisions, std::span<const int> truth);

/// Steady-state accuracy and switch detection times.
///
/// The trial start counts as a switch detected at window 0. For a true switch
/// at window s into state k the detection window t* is the first window in
/// [s, next switch) deciding k. For non-causal and Viterbi modes a run of k
/// decisions ending right before s, bounded below by the previous detection,
/// moves t* to the start of that run. Missed switches are charged the gap to
/// the next true switch (or to the end of the trial). Accuracy counts windows
/// from max(t*, s) to the next switch, or the whole block when missed.
EvalReport detect_switches(std::span<const int> decisions, const AttentionTrajectory& truth,
                           EvalMode mode);

struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;  ///< sample standard deviation, 0 for one value
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  std::size_t count = 0;
};

/// Linear-interpolated quantiles. NaNs are skipped; all-NaN gives count 0
/// and NaN fields.
SummaryStats summarize(std::span<const double> values);

struct AggregateReport {
  std::size_t n_reports = 0;
  SummaryStats accuracy;
  SummaryStats detection_time;  ///< over each report's mean_abs_detection_time
  std::size_t total_switches = 0;
  std::size_t missed_switches = 0;
};

/// Throws std::invalid_argument for an empty list.
AggregateReport aggregate(std::span<const EvalReport> reports);

}  // namespace aadhmm
