#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "aadhmm/sweep.hpp"

namespace aadhmm::commands {

struct SimulateOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
};

/// Writes scores.csv, truth.csv and emission.json into `out`.
void simulate(const SimulateOptions& options);

enum class InferMode { kCausal, kNonCausal, kViterbi };
InferMode infer_mode_from_string(const std::string& name);

struct InferOptions {
  std::filesystem::path scores;
  InferMode mode = InferMode::kNonCausal;
  double p_switch = 0.001;
  /// Required for correlation scores unless the baseline model is wanted.
  std::optional<std::filesystem::path> emission;
  /// Treat the values as ln b_j(t) even if the header lacks kind=log_emission.
  bool scores_are_log_emissions = false;
  std::filesystem::path out;
};

/// Writes posterior.csv (causal / non-causal) or viterbi.csv into `out`.
/// Returns the written file.
std::filesystem::path infer(const InferOptions& options);

struct EvalOptions {
  std::filesystem::path decisions;
  std::filesystem::path truth;
  std::filesystem::path out;
  std::optional<EvalMode> mode;
  std::optional<double> window_length;
};

void eval(const EvalOptions& options);

struct SweepOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  int workers = 1;
};

void sweep(const SweepOptions& options);

}  // namespace aadhmm::commands
