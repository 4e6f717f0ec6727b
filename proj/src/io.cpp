#include "aadhmm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

namespace aadhmm::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Parses "# key=value,key=value".
std::map<std::string, std::string, std::less<>> parse_metadata(std::string_view line,
                                                               const std::string& source,
                                                               std::size_t line_no) {
  line = trim(line);
  if (line.empty() || line.front() != '#') {
    throw ParseError(source, line_no, "expected a '# key=value,...' metadata line");
  }
  line.remove_prefix(1);
  std::map<std::string, std::string, std::less<>> out;
  for (auto field : split(line)) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(source, line_no, "metadata field '" + std::string(field) + "' lacks '='");
    }
    out.emplace(std::string(trim(field.substr(0, eq))), std::string(trim(field.substr(eq + 1))));
  }
  return out;
}

double metadata_double(const std::map<std::string, std::string, std::less<>>& meta,
                       std::string_view key, const std::string& source, std::size_t line_no) {
  const auto it = meta.find(key);
  if (it == meta.end()) {
    throw ParseError(source, line_no, "missing metadata key '" + std::string(key) + "'");
  }
  const auto v = parse_double(it->second);
  if (!v) {
    throw ParseError(source, line_no,
                     "metadata '" + std::string(key) + "' is not a number: " + it->second);
  }
  return *v;
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

ScoreSeries ScoreFile::as_scores() const {
  if (log_emission) throw std::invalid_argument("file holds log emissions, not correlations");
  return ScoreSeries(values, window_length);
}

LogEmissionSeries ScoreFile::as_log_emissions() const {
  if (!log_emission) throw std::invalid_argument("file holds correlations, not log emissions");
  return LogEmissionSeries(values);
}

ScoreFile read_score_csv(std::istream& in, const std::string& source, bool log_emission) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) throw ParseError(source, 1, "empty file");
  const auto meta = parse_metadata(line, source, line_no);

  ScoreFile file;
  file.window_length = metadata_double(meta, "window_length_s", source, line_no);
  if (!(file.window_length > 0.0)) throw ParseError(source, line_no, "window_length_s must be positive");
  const double n = metadata_double(meta, "n_states", source, line_no);
  if (n != std::floor(n) || n < 2) throw ParseError(source, line_no, "n_states must be an integer >= 2");
  file.n_states = static_cast<int>(n);
  if (const auto it = meta.find("kind"); it != meta.end()) {
    if (it->second == "log_emission") {
      file.log_emission = true;
    } else if (it->second != "correlation") {
      throw ParseError(source, line_no, "unknown kind '" + it->second + "'");
    }
  }
  if (log_emission) file.log_emission = true;

  std::vector<double> data;
  std::size_t rows = 0;
  while (next_content_line(in, line, line_no)) {
    if (trim(line).front() == '#') continue;
    const auto fields = split(line);
    if (fields.size() != static_cast<std::size_t>(file.n_states)) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(file.n_states) + " values, got " +
                           std::to_string(fields.size()));
    }
    for (auto f : fields) {
      const auto v = parse_double(f);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(source, line_no, "not a finite number: '" + std::string(f) + "'");
      }
      if (!file.log_emission && !(std::abs(*v) <= 1.0)) {
        throw ParseError(source, line_no, "correlation outside [-1, 1]: " + std::string(f));
      }
      data.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(source, line_no, "no score rows");
  file.values = Matrix(rows, static_cast<std::size_t>(file.n_states));
  std::copy(data.begin(), data.end(), file.values.data().begin());
  return file;
}

ScoreFile read_score_csv(const std::filesystem::path& path, bool log_emission) {
  auto in = open_input(path);
  return read_score_csv(in, path.string(), log_emission);
}

namespace {

void write_matrix_rows(std::ostream& out, const Matrix& m) {
  for (std::size_t t = 0; t < m.rows(); ++t) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(t, j));
    }
    out << '\n';
  }
}

}  // namespace

void write_score_csv(std::ostream& out, const ScoreSeries& scores) {
  out << "# window_length_s=" << format_double(scores.window_length())
      << ",n_states=" << scores.n_states() << '\n';
  write_matrix_rows(out, scores.scores());
}

void write_log_emission_csv(std::ostream& out, const LogEmissionSeries& log_b,
                            double window_length) {
  out << "# window_length_s=" << format_double(window_length) << ",n_states=" << log_b.n_states()
      << ",kind=log_emission\n";
  write_matrix_rows(out, log_b.values());
}

AttentionTrajectory read_truth_csv(std::istream& in, const std::string& source,
                                   std::optional<double> window_length) {
  std::string line;
  std::size_t line_no = 0;
  AttentionTrajectory truth;
  if (!next_content_line(in, line, line_no)) throw ParseError(source, 1, "empty file");
  if (trim(line).front() == '#') {
    const auto meta = parse_metadata(line, source, line_no);
    if (meta.contains("window_length_s")) {
      truth.window_length = metadata_double(meta, "window_length_s", source, line_no);
    }
    if (!next_content_line(in, line, line_no)) throw ParseError(source, line_no, "missing header");
  } else if (!window_length) {
    throw ParseError(source, line_no, "no window_length_s metadata and none supplied");
  }
  if (window_length) truth.window_length = *window_length;
  if (!(truth.window_length > 0.0)) throw ParseError(source, line_no, "window length must be positive");

  const auto header = split(line);
  if (header.size() != 2 || header[0] != "window_index" || header[1] != "true_state") {
    throw ParseError(source, line_no, "expected header 'window_index,true_state'");
  }
  while (next_content_line(in, line, line_no)) {
    const auto fields = split(line);
    if (fields.size() != 2) throw ParseError(source, line_no, "expected 2 fields");
    const auto idx = parse_int(fields[0]);
    const auto state = parse_int(fields[1]);
    if (!idx || !state || *state < 0) throw ParseError(source, line_no, "malformed row");
    if (*idx != static_cast<long long>(truth.states.size())) {
      throw ParseError(source, line_no, "window_index out of sequence");
    }
    truth.states.push_back(static_cast<int>(*state));
  }
  if (truth.states.empty()) throw ParseError(source, line_no, "no truth rows");
  return truth;
}

AttentionTrajectory read_truth_csv(const std::filesystem::path& path,
                                   std::optional<double> window_length) {
  auto in = open_input(path);
  return read_truth_csv(in, path.string(), window_length);
}

void write_truth_csv(std::ostream& out, const AttentionTrajectory& truth) {
  out << "# window_length_s=" << format_double(truth.window_length) << '\n';
  out << "window_index,true_state\n";
  for (std::size_t t = 0; t < truth.states.size(); ++t) out << t << ',' << truth.states[t] << '\n';
}

void write_posterior_csv(std::ostream& out, const PosteriorSeries& posterior,
                         double window_length) {
  out << "# mode=" << to_string(posterior.mode)
      << ",window_length_s=" << format_double(window_length) << '\n';
  out << "window_index";
  for (int j = 0; j < posterior.n_states(); ++j) out << ",p_" << j;
  out << ",argmax\n";
  const auto decisions = decisions_from_posterior(posterior);
  for (std::size_t t = 0; t < posterior.n_windows(); ++t) {
    out << t;
    for (double p : posterior.probabilities.row(t)) out << ',' << format_double(p);
    out << ',' << decisions[t] << '\n';
  }
}

void write_viterbi_csv(std::ostream& out, const ViterbiPath& path, double window_length) {
  out << "# mode=viterbi,window_length_s=" << format_double(window_length)
      << ",log_joint=" << format_double(path.log_joint) << '\n';
  out << "window_index,state\n";
  for (std::size_t t = 0; t < path.states.size(); ++t) out << t << ',' << path.states[t] << '\n';
}

DecisionFile read_decision_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  DecisionFile file;
  if (!next_content_line(in, line, line_no)) throw ParseError(source, 1, "empty file");
  if (trim(line).front() == '#') {
    const auto meta = parse_metadata(line, source, line_no);
    if (const auto it = meta.find("mode"); it != meta.end()) {
      try {
        file.mode = eval_mode_from_string(it->second);
      } catch (const std::invalid_argument& e) {
        throw ParseError(source, line_no, e.what());
      }
    }
    if (meta.contains("window_length_s")) {
      file.window_length = metadata_double(meta, "window_length_s", source, line_no);
    }
    if (!next_content_line(in, line, line_no)) throw ParseError(source, line_no, "missing header");
  }

  const auto header = split(line);
  std::size_t column = 0;
  if (header.size() == 2 && header[0] == "window_index" && header[1] == "state") {
    column = 1;
  } else if (header.size() >= 4 && header[0] == "window_index" && header.back() == "argmax") {
    column = header.size() - 1;
  } else {
    throw ParseError(source, line_no,
                     "expected 'window_index,state' or 'window_index,p_0..,argmax' header");
  }
  while (next_content_line(in, line, line_no)) {
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no, "expected " + std::to_string(header.size()) + " fields");
    }
    const auto idx = parse_int(fields[0]);
    const auto state = parse_int(fields[column]);
    if (!idx || !state || *state < 0) throw ParseError(source, line_no, "malformed row");
    if (*idx != static_cast<long long>(file.decisions.size())) {
      throw ParseError(source, line_no, "window_index out of sequence");
    }
    file.decisions.push_back(static_cast<int>(*state));
  }
  if (file.decisions.empty()) throw ParseError(source, line_no, "no decision rows");
  return file;
}

DecisionFile read_decision_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_decision_csv(in, path.string());
}

json to_json(const EmissionModel& model) {
  return {{"mu_attended", model.mu_attended()},
          {"mu_unattended", model.mu_unattended()},
          {"sigma", model.sigma()}};
}

EmissionModel emission_from_json(const json& j) {
  return EmissionModel(j.at("mu_attended").get<double>(), j.at("mu_unattended").get<double>(),
                       j.at("sigma").get<double>());
}

json to_json(const TransitionModel& model) {
  return {{"n_states", model.n_states()}, {"p_switch_per_window", model.p_switch()}};
}

TransitionModel transition_from_json(const json& j, std::optional<double> window_length) {
  const int n = j.at("n_states").get<int>();
  const bool per_window = j.contains("p_switch_per_window");
  const bool per_second = j.contains("p_switch_per_second");
  if (per_window == per_second) {
    throw std::invalid_argument(
        "transition needs exactly one of p_switch_per_window or p_switch_per_second");
  }
  if (per_window) return TransitionModel(n, j.at("p_switch_per_window").get<double>());
  if (!window_length) {
    throw std::invalid_argument("p_switch_per_second requires a window length");
  }
  return build_transition_from_rate(n, j.at("p_switch_per_second").get<double>(), *window_length);
}

json to_json(const SynthesisConfig& config) {
  return {{"n_states", config.n_states},
          {"trial_length_s", config.trial_length},
          {"window_length_s", config.window_length},
          {"switch_interval_s", config.switch_interval},
          {"emission", to_json(config.emission)},
          {"alpha_shift", config.alpha_shift},
          {"seed", config.seed}};
}

SynthesisConfig synthesis_config_from_json(const json& j) {
  SynthesisConfig c;
  c.n_states = j.value("n_states", c.n_states);
  c.trial_length = j.value("trial_length_s", c.trial_length);
  c.window_length = j.value("window_length_s", c.window_length);
  c.switch_interval = j.value("switch_interval_s", c.switch_interval);
  c.alpha_shift = j.value("alpha_shift", c.alpha_shift);
  c.seed = j.value("seed", c.seed);
  if (j.contains("emission") && j.contains("target_accuracy")) {
    throw std::invalid_argument("give either 'emission' or 'target_accuracy', not both");
  }
  if (j.contains("emission")) c.emission = emission_from_json(j.at("emission"));
  if (j.contains("target_accuracy")) {
    c.emission = calibrate_dprime(j.at("target_accuracy").get<double>(), c.n_states);
  }
  c.validate();
  return c;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const SummaryStats& s) {
  return {{"mean", number_or_null(s.mean)},     {"sd", number_or_null(s.sd)},
          {"q25", number_or_null(s.q25)},       {"median", number_or_null(s.median)},
          {"q75", number_or_null(s.q75)},       {"count", s.count}};
}

}  // namespace

json to_json(const EvalReport& report) {
  json switches = json::array();
  for (const auto& d : report.switch_detections) {
    switches.push_back({{"true_time_s", d.true_time},
                        {"detected_time_s", d.detected_time ? json(*d.detected_time) : json(nullptr)},
                        {"delay_s", d.delay},
                        {"missed", d.missed}});
  }
  return {{"mode", std::string(to_string(report.mode))},
          {"accuracy", report.accuracy},
          {"scored_windows", report.scored_windows},
          {"correct_windows", report.correct_windows},
          {"mean_abs_detection_time_s", number_or_null(report.mean_abs_detection_time)},
          {"missed_switches", report.missed_switches()},
          {"switches", switches}};
}

json to_json(const AggregateReport& report) {
  return {{"n_reports", report.n_reports},
          {"accuracy", to_json(report.accuracy)},
          {"detection_time_s", to_json(report.detection_time)},
          {"total_switches", report.total_switches},
          {"missed_switches", report.missed_switches}};
}

json read_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace aadhmm::io
