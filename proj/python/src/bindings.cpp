#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>
#include <vector>

#include "aadhmm/chain.hpp"
#include "aadhmm/emission.hpp"
#include "aadhmm/evaluation.hpp"
#include "aadhmm/inference.hpp"
#include "aadhmm/io.hpp"
#include "aadhmm/sweep.hpp"
#include "aadhmm/synthesis.hpp"

namespace py = pybind11;
using namespace aadhmm;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array (windows x states)");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

std::vector<int> to_ints(const IntArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D integer array");
  return {a.data(), a.data() + a.size()};
}

py::array_t<int> to_array(const std::vector<int>& v) {
  py::array_t<int> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::object json_to_py(const io::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_aadhmm, m) {
  m.doc() = "HMM post-processing of auditory attention decoding scores";

  py::class_<TransitionModel>(m, "TransitionModel")
      .def(py::init<int, double>(), py::arg("n_states"), py::arg("p_switch"))
      .def_property_readonly("n_states", &TransitionModel::n_states)
      .def_property_readonly("p_switch", &TransitionModel::p_switch)
      .def("matrix", [](const TransitionModel& t) { return to_array(t.matrix()); })
      .def("__repr__", [](const TransitionModel& t) {
        return "TransitionModel(n_states=" + std::to_string(t.n_states()) +
               ", p_switch=" + io::format_double(t.p_switch()) + ")";
      });
  m.def("build_transition", &build_transition, py::arg("n_states"), py::arg("p_switch"));
  m.def("build_transition_from_rate", &build_transition_from_rate, py::arg("n_states"),
        py::arg("rate_per_second"), py::arg("window_length"));

  py::class_<EmissionModel>(m, "EmissionModel")
      .def(py::init<double, double, double>(), py::arg("mu_attended"),
           py::arg("mu_unattended"), py::arg("sigma"))
      .def_property_readonly("mu_attended", &EmissionModel::mu_attended)
      .def_property_readonly("mu_unattended", &EmissionModel::mu_unattended)
      .def_property_readonly("sigma", &EmissionModel::sigma)
      .def_property_readonly("dprime", &EmissionModel::dprime)
      .def(py::self == py::self)
      .def("__repr__", [](const EmissionModel& e) {
        return "EmissionModel(mu_attended=" + io::format_double(e.mu_attended()) +
               ", mu_unattended=" + io::format_double(e.mu_unattended()) +
               ", sigma=" + io::format_double(e.sigma()) + ")";
      });

  m.def("fisher_transform", &fisher_transform, py::arg("x"));
  m.def(
      "log_emission_series",
      [](const EmissionModel& model, const DoubleArray& scores) {
        return to_array(log_emission_series(model, ScoreSeries(to_matrix(scores), 1.0)).values());
      },
      py::arg("model"), py::arg("scores"), "ln b_j(t) for a T x N array of correlations");
  m.def(
      "log_sum_exp",
      [](const std::vector<double>& v) { return log_sum_exp(v); }, py::arg("values"));

  m.def(
      "forward",
      [](const TransitionModel& t, const DoubleArray& log_b) {
        const LogEmissionSeries series(to_matrix(log_b));
        PosteriorSeries post;
        {
          py::gil_scoped_release release;
          post = forward(t, series);
        }
        return to_array(post.probabilities);
      },
      py::arg("transition"), py::arg("log_b"));
  m.def(
      "forward_backward",
      [](const TransitionModel& t, const DoubleArray& log_b) {
        const LogEmissionSeries series(to_matrix(log_b));
        PosteriorSeries post;
        {
          py::gil_scoped_release release;
          post = forward_backward(t, series);
        }
        return to_array(post.probabilities);
      },
      py::arg("transition"), py::arg("log_b"));
  m.def(
      "viterbi",
      [](const TransitionModel& t, const DoubleArray& log_b) {
        const LogEmissionSeries series(to_matrix(log_b));
        ViterbiPath path;
        {
          py::gil_scoped_release release;
          path = viterbi(t, series);
        }
        return py::make_tuple(to_array(path.states), path.log_joint);
      },
      py::arg("transition"), py::arg("log_b"), "(states, log_joint)");

  m.def(
      "simulate",
      [](int n_states, double trial_length, double window_length, double switch_interval,
         std::optional<EmissionModel> emission, double alpha_shift, std::uint64_t seed) {
        SynthesisConfig c;
        c.n_states = n_states;
        c.trial_length = trial_length;
        c.window_length = window_length;
        c.switch_interval = switch_interval;
        if (emission) c.emission = *emission;
        c.alpha_shift = alpha_shift;
        c.seed = seed;
        const auto trial = simulate(c);
        return py::make_tuple(to_array(trial.scores.scores()), to_array(trial.truth.states));
      },
      py::arg("n_states") = 2, py::arg("trial_length") = 600.0, py::arg("window_length") = 1.0,
      py::arg("switch_interval") = 300.0, py::arg("emission") = py::none(),
      py::arg("alpha_shift") = 0.0, py::arg("seed") = 0, "(scores, truth)");
  m.def("baseline_emission", &baseline_emission);
  m.def("argmax_accuracy", &argmax_accuracy, py::arg("dprime"), py::arg("n_states"));
  m.def("calibrate_dprime", &calibrate_dprime, py::arg("target_accuracy"), py::arg("n_states"));
  m.def(
      "estimate_emission",
      [](const DoubleArray& scores, const IntArray& truth) {
        return estimate_emission(ScoreSeries(to_matrix(scores), 1.0), to_ints(truth));
      },
      py::arg("scores"), py::arg("truth"));

  m.def(
      "detect_switches",
      [](const IntArray& decisions, const IntArray& truth, double window_length,
         const std::string& mode) {
        AttentionTrajectory t{to_ints(truth), window_length};
        return json_to_py(io::to_json(detect_switches(to_ints(decisions), t,
                                                      eval_mode_from_string(mode))));
      },
      py::arg("decisions"), py::arg("truth"), py::arg("window_length") = 1.0,
      py::arg("mode") = "causal", "evaluation report as a dict");

  m.def(
      "run_sweep",
      [](const std::string& config_json, int workers) {
        const auto config = experiment_config_from_json(io::json::parse(config_json));
        std::vector<TrialResult> results;
        {
          py::gil_scoped_release release;
          results = run_sweep(config, workers);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict row;
          row["axis"] = std::string(to_string(config.axis));
          row["value"] = r.axis_value;
          row["trial"] = r.trial;
          row["seed"] = r.seed;
          row["decoder"] = std::string(to_string(r.decoder));
          row["p_switch"] = r.p_switch;
          row["raw_accuracy"] = r.raw_accuracy;
          row["report"] = json_to_py(io::to_json(r.report));
          out.append(row);
        }
        return out;
      },
      py::arg("config_json"), py::arg("workers") = 1);
}
