// Command-line front end: simulate, infer, eval, sweep.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "aadhmm/commands.hpp"

namespace cmd = aadhmm::commands;

int main(int argc, char** argv) {
  CLI::App app{"HMM post-processing of auditory attention decoding scores"};
  app.require_subcommand(1);

  cmd::SimulateOptions sim;
  std::string sim_config;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic scores and ground truth");
  simulate->add_option("--config", sim_config, "synthesis config JSON")->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "output directory")->required();
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "random seed");

  cmd::InferOptions inf;
  std::string inf_mode = "noncausal";
  std::string inf_emission;
  auto* infer = app.add_subcommand("infer", "decode a score file");
  infer->add_option("--scores", inf.scores, "score CSV")->required()->check(CLI::ExistingFile);
  infer->add_option("--mode", inf_mode, "causal | noncausal | viterbi")
      ->check(CLI::IsMember({"causal", "noncausal", "viterbi"}))
      ->capture_default_str();
  infer->add_option("--p-switch", inf.p_switch, "per-window switch probability")
      ->capture_default_str();
  auto* emission_opt =
      infer->add_option("--emission", inf_emission, "emission model JSON")->check(CLI::ExistingFile);
  infer->add_flag("--scores-are-log-emissions", inf.scores_are_log_emissions,
                  "values are ln b_j(t)")
      ->excludes(emission_opt);
  infer->add_option("--out", inf.out, "output directory")->required();

  cmd::EvalOptions ev;
  std::string ev_mode;
  double ev_window = 0.0;
  auto* eval = app.add_subcommand("eval", "score decisions against ground truth");
  eval->add_option("--decisions", ev.decisions, "posterior or Viterbi CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--truth", ev.truth, "truth CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", ev.out, "report JSON")->required();
  auto* ev_mode_opt = eval->add_option("--mode", ev_mode, "override: causal | noncausal | viterbi")
                          ->check(CLI::IsMember({"causal", "noncausal", "viterbi"}));
  auto* ev_window_opt = eval->add_option("--window-length", ev_window, "seconds per window");

  cmd::SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "run a synthetic parameter sweep");
  sweep->add_option("--config", sw.config, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", sw.out, "output directory")->required();
  sweep->add_option("--workers", sw.workers, "concurrent trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      if (!sim_config.empty()) sim.config = sim_config;
      if (*seed_opt) sim.seed = sim_seed;
      cmd::simulate(sim);
    } else if (*infer) {
      inf.mode = cmd::infer_mode_from_string(inf_mode);
      if (!inf_emission.empty()) inf.emission = inf_emission;
      std::cout << cmd::infer(inf).string() << '\n';
    } else if (*eval) {
      if (*ev_mode_opt) ev.mode = aadhmm::eval_mode_from_string(ev_mode);
      if (*ev_window_opt) ev.window_length = ev_window;
      cmd::eval(ev);
    } else if (*sweep) {
      cmd::sweep(sw);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
