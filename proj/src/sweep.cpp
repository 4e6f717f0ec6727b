#include "aadhmm/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "aadhmm/inference.hpp"
#include "aadhmm/io.hpp"
#include "aadhmm/plot.hpp"

namespace aadhmm {

std::string_view to_string(Decoder decoder) {
  switch (decoder) {
    case Decoder::kForward: return "forward";
    case Decoder::kForwardBackward: return "forward_backward";
    case Decoder::kViterbi: return "viterbi";
  }
  return "unknown";
}

Decoder decoder_from_string(std::string_view name) {
  if (name == "forward" || name == "causal") return Decoder::kForward;
  if (name == "forward_backward" || name == "noncausal" || name == "non-causal") {
    return Decoder::kForwardBackward;
  }
  if (name == "viterbi") return Decoder::kViterbi;
  throw std::invalid_argument("unknown decoder '" + std::string(name) + "'");
}

EvalMode eval_mode_for(Decoder decoder) {
  switch (decoder) {
    case Decoder::kForward: return EvalMode::kCausal;
    case Decoder::kForwardBackward: return EvalMode::kNonCausal;
    case Decoder::kViterbi: return EvalMode::kViterbi;
  }
  return EvalMode::kCausal;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kWindowLength: return "window_length";
    case SweepAxis::kPSwitch: return "p_switch";
    case SweepAxis::kSwitchInterval: return "switch_interval";
    case SweepAxis::kNStates: return "n_states";
    case SweepAxis::kAlpha: return "alpha";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  for (auto axis : {SweepAxis::kWindowLength, SweepAxis::kPSwitch, SweepAxis::kSwitchInterval,
                    SweepAxis::kNStates, SweepAxis::kAlpha}) {
    if (name == to_string(axis)) return axis;
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

EvalReport run_decoder(const TrialSetup& setup, const SyntheticTrial& trial, Decoder decoder) {
  const auto log_b = log_emission_series(setup.decoder_emission, trial.scores);
  std::vector<int> decisions;
  switch (decoder) {
    case Decoder::kForward:
      decisions = decisions_from_posterior(forward(setup.transition, log_b));
      break;
    case Decoder::kForwardBackward:
      decisions = decisions_from_posterior(forward_backward(setup.transition, log_b));
      break;
    case Decoder::kViterbi:
      decisions = viterbi(setup.transition, log_b).states;
      break;
  }
  return detect_switches(decisions, trial.truth, eval_mode_for(decoder));
}

namespace {

struct Range {
  double lo, hi;
};

Range studied_range(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kWindowLength: return {0.25, 30.0};
    case SweepAxis::kPSwitch: return {0.0001, 0.1};
    case SweepAxis::kSwitchInterval: return {20.0, 600.0};
    case SweepAxis::kNStates: return {2.0, 10.0};
    case SweepAxis::kAlpha: return {-0.5, 5.0};
  }
  return {0.0, 0.0};
}

std::vector<double> default_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kWindowLength: return {0.25, 0.5, 1, 2, 5, 10, 20, 30};
    case SweepAxis::kPSwitch: return {0.1, 0.01, 0.001, 0.0001};
    case SweepAxis::kSwitchInterval: return {20, 60, 120, 300, 600};
    case SweepAxis::kNStates: return {2, 3, 4};
    case SweepAxis::kAlpha: return {-0.5, 0, 0.5, 1, 2, 5};
  }
  return {};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (decoders.empty()) throw std::invalid_argument("sweep needs at least one decoder");
  base.validate();
  if (enforce_ranges) {
    const auto r = studied_range(axis);
    for (double v : values) {
      // Relative slack so that 0.1 and 1e-4 written in JSON are accepted.
      if (!(v >= r.lo * (1 - 1e-12) - 1e-12 && v <= r.hi * (1 + 1e-12) + 1e-12)) {
        throw std::invalid_argument(std::string(to_string(axis)) + " value " +
                                    std::to_string(v) + " outside studied range [" +
                                    std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
      }
    }
  }
  if (axis == SweepAxis::kNStates) {
    for (double v : values) {
      if (v != std::floor(v)) throw std::invalid_argument("n_states values must be integers");
    }
  }
}

std::uint64_t ExperimentConfig::trial_seed(int trial) const {
  return derive_seed(base.seed, static_cast<std::uint64_t>(trial));
}

TrialSetup ExperimentConfig::setup(double axis_value, int trial) const {
  SynthesisConfig synth = base;
  synth.seed = trial_seed(trial);
  std::optional<double> p_override;
  switch (axis) {
    case SweepAxis::kWindowLength: synth.window_length = axis_value; break;
    case SweepAxis::kPSwitch: p_override = axis_value; break;
    case SweepAxis::kSwitchInterval: synth.switch_interval = axis_value; break;
    case SweepAxis::kNStates: synth.n_states = static_cast<int>(axis_value); break;
    case SweepAxis::kAlpha: synth.alpha_shift = axis_value; break;
  }
  const double sep = base.emission.mu_attended() - base.emission.mu_unattended();
  if (scale_emission_with_window && synth.window_length != base.window_length) {
    const double scaled = sep * std::sqrt(synth.window_length / base.window_length);
    synth.emission = EmissionModel(base.emission.mu_unattended() + scaled,
                                   base.emission.mu_unattended(), base.emission.sigma());
  }
  synth.validate();

  double p = p_override ? *p_override
             : p_switch_per_window ? *p_switch_per_window
                                   : p_switch_per_second * synth.window_length;
  const double shifted_sep =
      (synth.emission.mu_attended() - synth.emission.mu_unattended()) * (1.0 + synth.alpha_shift);
  return TrialSetup{synth, TransitionModel(synth.n_states, p),
                    EmissionModel(synth.emission.mu_unattended() + shifted_sep,
                                  synth.emission.mu_unattended(), synth.emission.sigma())};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.axis = sweep_axis_from_string(j.at("axis").get<std::string>());
  c.values = j.contains("values") ? j.at("values").get<std::vector<double>>()
                                  : default_values(c.axis);
  c.trials = j.value("trials", c.trials);
  if (j.contains("base")) c.base = io::synthesis_config_from_json(j.at("base"));
  if (j.contains("decoders")) {
    c.decoders.clear();
    for (const auto& d : j.at("decoders")) c.decoders.push_back(decoder_from_string(d.get<std::string>()));
  }
  if (j.contains("transition")) {
    const auto& t = j.at("transition");
    const bool per_window = t.contains("p_switch_per_window");
    const bool per_second = t.contains("p_switch_per_second");
    if (per_window == per_second) {
      throw std::invalid_argument(
          "transition needs exactly one of p_switch_per_window or p_switch_per_second");
    }
    if (per_window) c.p_switch_per_window = t.at("p_switch_per_window").get<double>();
    if (per_second) c.p_switch_per_second = t.at("p_switch_per_second").get<double>();
  }
  if (j.contains("emission_scaling")) {
    const auto s = j.at("emission_scaling").get<std::string>();
    if (s == "sqrt_window") {
      c.scale_emission_with_window = true;
    } else if (s == "fixed") {
      c.scale_emission_with_window = false;
    } else {
      throw std::invalid_argument("emission_scaling must be 'sqrt_window' or 'fixed'");
    }
  }
  c.enforce_ranges = j.value("enforce_ranges", c.enforce_ranges);
  c.validate();
  return c;
}

std::vector<TrialResult> run_sweep(const ExperimentConfig& config, int workers) {
  config.validate();
  const std::size_t n_jobs = config.values.size() * static_cast<std::size_t>(config.trials);
  std::vector<std::vector<TrialResult>> slots(n_jobs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const double value = config.values[job / static_cast<std::size_t>(config.trials)];
      const int trial = static_cast<int>(job % static_cast<std::size_t>(config.trials));
      try {
        const auto setup = config.setup(value, trial);
        const auto data = simulate(setup.synthesis);
        const double raw = window_accuracy(decisions_from_scores(data.scores), data.truth.states);
        for (Decoder d : config.decoders) {
          slots[job].push_back(TrialResult{value, trial, setup.synthesis.seed, d,
                                           setup.transition.p_switch(), raw,
                                           run_decoder(setup, data, d)});
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::make_exception_ptr(std::runtime_error(
              "trial failed (" + std::string(to_string(config.axis)) + "=" +
              io::format_double(value) + ", trial " + std::to_string(trial) + ", seed " +
              std::to_string(config.trial_seed(trial)) + "): " + e.what()));
        }
        failed = true;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(n_jobs)));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
    work();
  }
  if (error) std::rethrow_exception(error);

  std::vector<TrialResult> out;
  out.reserve(n_jobs * config.decoders.size());
  for (auto& slot : slots) {
    for (auto& r : slot) out.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepSummaryRow> summarize_sweep(const ExperimentConfig& config,
                                             const std::vector<TrialResult>& results) {
  std::vector<SweepSummaryRow> rows;
  for (double v : config.values) {
    for (Decoder d : config.decoders) {
      std::vector<EvalReport> reports;
      double raw = 0.0;
      for (const auto& r : results) {
        if (r.axis_value == v && r.decoder == d) {
          reports.push_back(r.report);
          raw += r.raw_accuracy;
        }
      }
      if (reports.empty()) continue;
      rows.push_back({v, d, aggregate(reports), raw / static_cast<double>(reports.size())});
    }
  }
  return rows;
}

namespace {

std::string csv_number(double v) { return std::isfinite(v) ? io::format_double(v) : ""; }

}  // namespace

void write_sweep_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<TrialResult>& results) {
  out << "axis,value,trial,seed,decoder,p_switch,raw_accuracy,accuracy,"
         "mean_abs_detection_time_s,missed_switches,n_switches\n";
  for (const auto& r : results) {
    out << to_string(config.axis) << ',' << io::format_double(r.axis_value) << ',' << r.trial
        << ',' << r.seed << ',' << to_string(r.decoder) << ',' << io::format_double(r.p_switch)
        << ',' << io::format_double(r.raw_accuracy) << ',' << io::format_double(r.report.accuracy)
        << ',' << csv_number(r.report.mean_abs_detection_time) << ','
        << r.report.missed_switches() << ',' << r.report.switch_detections.size() << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentConfig& config,
                       const std::vector<SweepSummaryRow>& rows) {
  out << "axis,value,decoder,n_trials,raw_accuracy_mean,accuracy_mean,accuracy_sd,"
         "accuracy_q25,accuracy_median,accuracy_q75,detection_mean_s,detection_sd_s,"
         "detection_q25_s,detection_median_s,detection_q75_s,missed_switches,total_switches\n";
  for (const auto& row : rows) {
    const auto& a = row.aggregate.accuracy;
    const auto& d = row.aggregate.detection_time;
    out << to_string(config.axis) << ',' << io::format_double(row.axis_value) << ','
        << to_string(row.decoder) << ',' << row.aggregate.n_reports << ','
        << csv_number(row.raw_accuracy_mean) << ',' << csv_number(a.mean) << ','
        << csv_number(a.sd) << ',' << csv_number(a.q25) << ',' << csv_number(a.median) << ','
        << csv_number(a.q75) << ',' << csv_number(d.mean) << ',' << csv_number(d.sd) << ','
        << csv_number(d.q25) << ',' << csv_number(d.median) << ',' << csv_number(d.q75) << ','
        << row.aggregate.missed_switches << ',' << row.aggregate.total_switches << '\n';
  }
}

void write_sweep_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                         const std::vector<TrialResult>& results) {
  std::filesystem::create_directories(dir);
  const auto rows = summarize_sweep(config, results);
  {
    std::ofstream out(dir / "sweep.csv");
    write_sweep_csv(out, config, results);
  }
  {
    std::ofstream out(dir / "summary.csv");
    write_summary_csv(out, config, rows);
  }

  std::vector<PlotSeries> acc, det;
  for (Decoder d : config.decoders) {
    PlotSeries a{std::string(to_string(d)), {}, {}, {}, {}};
    PlotSeries t = a;
    for (const auto& row : rows) {
      if (row.decoder != d) continue;
      a.x.push_back(row.axis_value);
      a.median.push_back(100.0 * row.aggregate.accuracy.median);
      a.q25.push_back(100.0 * row.aggregate.accuracy.q25);
      a.q75.push_back(100.0 * row.aggregate.accuracy.q75);
      t.x.push_back(row.axis_value);
      t.median.push_back(row.aggregate.detection_time.median);
      t.q25.push_back(row.aggregate.detection_time.q25);
      t.q75.push_back(row.aggregate.detection_time.q75);
    }
    acc.push_back(std::move(a));
    det.push_back(std::move(t));
  }
  const std::string axis(to_string(config.axis));
  const bool log_x = config.axis == SweepAxis::kPSwitch;
  {
    std::ofstream out(dir / "accuracy.svg");
    write_svg_plot(out, {"Steady-state accuracy vs " + axis, axis, "accuracy [%]", log_x}, acc);
  }
  {
    std::ofstream out(dir / "detection_time.svg");
    write_svg_plot(out, {"Switch detection time vs " + axis, axis, "|detection time| [s]", log_x},
                   det);
  }
}

}  // namespace aadhmm
