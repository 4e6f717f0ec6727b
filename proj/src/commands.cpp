#include "aadhmm/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "aadhmm/io.hpp"

namespace aadhmm::commands {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void simulate(const SimulateOptions& options) {
  SynthesisConfig config = options.config
                               ? io::synthesis_config_from_json(io::read_json(*options.config))
                               : SynthesisConfig{};
  if (options.seed) config.seed = *options.seed;
  const auto trial = aadhmm::simulate(config);

  std::filesystem::create_directories(options.out);
  {
    auto out = open_output(options.out / "scores.csv");
    io::write_score_csv(out, trial.scores);
  }
  {
    auto out = open_output(options.out / "truth.csv");
    io::write_truth_csv(out, trial.truth);
  }
  // Statistics of the emitted scores, i.e. after the alpha shift.
  const double sep = config.emission.mu_attended() - config.emission.mu_unattended();
  const EmissionModel emitted(config.emission.mu_unattended() + sep * (1.0 + config.alpha_shift),
                              config.emission.mu_unattended(), config.emission.sigma());
  {
    auto out = open_output(options.out / "emission.json");
    out << io::to_json(emitted).dump(2) << '\n';
  }
  {
    auto out = open_output(options.out / "simulation.json");
    out << io::to_json(config).dump(2) << '\n';
  }
}

InferMode infer_mode_from_string(const std::string& name) {
  if (name == "causal") return InferMode::kCausal;
  if (name == "noncausal" || name == "non-causal") return InferMode::kNonCausal;
  if (name == "viterbi") return InferMode::kViterbi;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

std::filesystem::path infer(const InferOptions& options) {
  const auto file = io::read_score_csv(options.scores, options.scores_are_log_emissions);
  const bool is_log = file.log_emission;
  if (is_log && options.emission) {
    throw std::invalid_argument("--emission cannot be combined with log-emission input");
  }

  std::optional<LogEmissionSeries> log_b;
  if (is_log) {
    log_b.emplace(file.values);
  } else {
    EmissionModel model = options.emission
                              ? io::emission_from_json(io::read_json(*options.emission))
                              : calibrate_dprime(0.582, file.n_states);
    if (!options.emission) {
      std::cerr << "note: no --emission given, using the baseline model (d'="
                << model.dprime() << ")\n";
    }
    log_b.emplace(log_emission_series(model, file.as_scores()));
  }
  const TransitionModel transition(file.n_states, options.p_switch);

  std::filesystem::create_directories(options.out);
  std::filesystem::path target;
  if (options.mode == InferMode::kViterbi) {
    target = options.out / "viterbi.csv";
    auto out = open_output(target);
    io::write_viterbi_csv(out, viterbi(transition, *log_b), file.window_length);
  } else {
    target = options.out / "posterior.csv";
    auto out = open_output(target);
    const auto posterior = options.mode == InferMode::kCausal
                               ? forward(transition, *log_b)
                               : forward_backward(transition, *log_b);
    io::write_posterior_csv(out, posterior, file.window_length);
  }
  return target;
}

void eval(const EvalOptions& options) {
  const auto decisions = io::read_decision_csv(options.decisions);
  const auto truth = io::read_truth_csv(
      options.truth, options.window_length ? options.window_length : decisions.window_length);
  const EvalMode mode = options.mode ? *options.mode : decisions.mode.value_or(EvalMode::kCausal);
  if (decisions.window_length && !options.window_length &&
      std::abs(*decisions.window_length - truth.window_length) > 1e-12) {
    throw std::invalid_argument("decision and truth files disagree on the window length");
  }
  const auto report = detect_switches(decisions.decisions, truth, mode);
  auto out = open_output(options.out);
  out << io::to_json(report).dump(2) << '\n';
}

void sweep(const SweepOptions& options) {
  const auto config = experiment_config_from_json(io::read_json(options.config));
  const auto results = run_sweep(config, options.workers);
  write_sweep_outputs(options.out, config, results);
}

}  // namespace aadhmm::commands
