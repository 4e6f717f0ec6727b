#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aadhmm/chain.hpp"
#include "aadhmm/evaluation.hpp"
#include "aadhmm/synthesis.hpp"
#include "json.hpp"

namespace aadhmm {

enum class Decoder { kForward, kForwardBackward, kViterbi };
enum class SweepAxis { kWindowLength, kPSwitch, kSwitchInterval, kNStates, kAlpha };

std::string_view to_string(Decoder decoder);
Decoder decoder_from_string(std::string_view name);
EvalMode eval_mode_for(Decoder decoder);
std::string_view to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(std::string_view name);

/// One synthetic trial: generate, decode, evaluate.
struct TrialSetup {
  SynthesisConfig synthesis;
  TransitionModel transition;
  /// Model the decoder assumes; equals the generating model after the alpha shift.
  EmissionModel decoder_emission;
};

EvalReport run_decoder(const TrialSetup& setup, const SyntheticTrial& trial, Decoder decoder);

struct ExperimentConfig {
  SweepAxis axis = SweepAxis::kPSwitch;
  std::vector<double> values;
  int trials = 13;
  SynthesisConfig base;
  std::vector<Decoder> decoders{Decoder::kForward, Decoder::kForwardBackward};
  /// p_switch = rate * window length unless a per-window value is fixed.
  double p_switch_per_second = 0.001;
  std::optional<double> p_switch_per_window;
  /// Scale the mean separation by sqrt(window / base window), keeping the
  /// evidence per second constant across window lengths.
  bool scale_emission_with_window = true;
  /// Reject axis values outside the studied ranges.
  bool enforce_ranges = true;

  void validate() const;
  /// Trial seeds depend on the trial index only, so every axis value sees the
  /// same random streams.
  std::uint64_t trial_seed(int trial) const;
  TrialSetup setup(double axis_value, int trial) const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct TrialResult {
  double axis_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  Decoder decoder = Decoder::kForward;
  double p_switch = 0.0;
  /// Per-window argmax accuracy of the raw scores.
  double raw_accuracy = 0.0;
  EvalReport report;
};

/// Runs every (value, trial) on up to `workers` threads. Results are ordered
/// by value, trial, decoder regardless of scheduling. A failing trial aborts
/// the sweep with its axis value, trial index and seed in the message.
std::vector<TrialResult> run_sweep(const ExperimentConfig& config, int workers = 1);

struct SweepSummaryRow {
  double axis_value = 0.0;
  Decoder decoder = Decoder::kForward;
  AggregateReport aggregate;
  double raw_accuracy_mean = 0.0;
};

std::vector<SweepSummaryRow> summarize_sweep(const ExperimentConfig& config,
                                             const std::vector<TrialResult>& results);

void write_sweep_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<TrialResult>& results);
void write_summary_csv(std::ostream& out, const ExperimentConfig& config,
                       const std::vector<SweepSummaryRow>& rows);

/// Writes sweep.csv, summary.csv, accuracy.svg and detection_time.svg.
void write_sweep_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                         const std::vector<TrialResult>& results);

}  // namespace aadhmm
