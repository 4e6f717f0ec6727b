#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aadhmm/chain.hpp"
#include "aadhmm/emission.hpp"
#include "aadhmm/evaluation.hpp"
#include "aadhmm/inference.hpp"
#include "aadhmm/synthesis.hpp"
#include "json.hpp"

namespace aadhmm::io {

using json = nlohmann::json;

/// Malformed input file. what() reads "<source>:<line>: <message>".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest round-trip decimal representation.
std::string format_double(double value);

/// Score CSV. The first line is
///   # window_length_s=<float>,n_states=<int>[,kind=log_emission]
/// followed by one line of N comma-separated values per window.
struct ScoreFile {
  double window_length = 1.0;
  int n_states = 2;
  bool log_emission = false;
  Matrix values;

  ScoreSeries as_scores() const;
  LogEmissionSeries as_log_emissions() const;
};

/// `log_emission` treats the values as ln b_j(t) whatever the header says.
ScoreFile read_score_csv(std::istream& in, const std::string& source = "<scores>",
                         bool log_emission = false);
ScoreFile read_score_csv(const std::filesystem::path& path, bool log_emission = false);
void write_score_csv(std::ostream& out, const ScoreSeries& scores);
void write_log_emission_csv(std::ostream& out, const LogEmissionSeries& log_b,
                            double window_length);

/// Truth CSV: optional `# window_length_s=<float>` line, header
/// `window_index,true_state`, then one row per window.
AttentionTrajectory read_truth_csv(std::istream& in, const std::string& source = "<truth>",
                                   std::optional<double> window_length = std::nullopt);
AttentionTrajectory read_truth_csv(const std::filesystem::path& path,
                                   std::optional<double> window_length = std::nullopt);
void write_truth_csv(std::ostream& out, const AttentionTrajectory& truth);

/// Posterior CSV: `# mode=<causal|non-causal>,window_length_s=<float>`, header
/// `window_index,p_0..p_{N-1},argmax`.
void write_posterior_csv(std::ostream& out, const PosteriorSeries& posterior,
                         double window_length);
/// Viterbi CSV: `# mode=viterbi,window_length_s=<float>,log_joint=<float>`,
/// header `window_index,state`.
void write_viterbi_csv(std::ostream& out, const ViterbiPath& path, double window_length);

/// Either file above, read back as a decision sequence.
struct DecisionFile {
  std::vector<int> decisions;
  std::optional<EvalMode> mode;
  std::optional<double> window_length;
};
DecisionFile read_decision_csv(std::istream& in, const std::string& source = "<decisions>");
DecisionFile read_decision_csv(const std::filesystem::path& path);

json to_json(const EmissionModel& model);
EmissionModel emission_from_json(const json& j);

json to_json(const TransitionModel& model);
/// {"n_states", "p_switch_per_window"} or {"n_states", "p_switch_per_second"};
/// the per-second form needs the window length.
TransitionModel transition_from_json(const json& j,
                                     std::optional<double> window_length = std::nullopt);

json to_json(const SynthesisConfig& config);
/// Missing keys keep the defaults. "emission" takes an explicit model;
/// "target_accuracy" calibrates one instead.
SynthesisConfig synthesis_config_from_json(const json& j);

json to_json(const EvalReport& report);
json to_json(const AggregateReport& report);

json read_json(const std::filesystem::path& path);

}  // namespace aadhmm::io
