"""HMM post-processing of auditory attention decoding scores."""

import json as _json

from ._aadhmm import (
    EmissionModel,
    TransitionModel,
    argmax_accuracy,
    baseline_emission,
    build_transition,
    build_transition_from_rate,
    calibrate_dprime,
    detect_switches,
    estimate_emission,
    fisher_transform,
    forward,
    forward_backward,
    log_emission_series,
    log_sum_exp,
    simulate,
    viterbi,
)
from ._aadhmm import run_sweep as _run_sweep


def run_sweep(config, workers=1):
    """Run a parameter sweep. `config` is a dict in the sweep JSON format."""
    return _run_sweep(_json.dumps(config), workers)


__all__ = [
    "EmissionModel",
    "TransitionModel",
    "argmax_accuracy",
    "baseline_emission",
    "build_transition",
    "build_transition_from_rate",
    "calibrate_dprime",
    "detect_switches",
    "estimate_emission",
    "fisher_transform",
    "forward",
    "forward_backward",
    "log_emission_series",
    "log_sum_exp",
    "run_sweep",
    "simulate",
    "viterbi",
]
