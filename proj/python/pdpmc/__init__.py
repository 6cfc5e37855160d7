"""Stochastic product-state Monte Carlo for open quantum systems."""

import json

from ._core import (
    InvalidArgument,
    __version__,
    coherence_without_flip_flop,
    jc_reference_correlation,
    jc_reference_population,
    jm_probability,
    preset_names,
    simulate_jc,
    simulate_jc_correlation,
    simulate_spin_coherence,
    spin_coherence_dense,
    spin_coherence_exact,
    tcl2_coherence,
)
from . import _core


def preset(name):
    """Preset as a dict."""
    return json.loads(_core.preset(name))


def validate(config):
    """Errors and warnings for a config dict."""
    return _core.validate(json.dumps(config))


def run(config):
    """Run a config dict and write its output directory; returns a summary dict."""
    return _core.run(json.dumps(config))


__all__ = [
    "InvalidArgument",
    "coherence_without_flip_flop",
    "jc_reference_correlation",
    "jc_reference_population",
    "jm_probability",
    "preset",
    "preset_names",
    "run",
    "simulate_jc",
    "simulate_jc_correlation",
    "simulate_spin_coherence",
    "spin_coherence_dense",
    "spin_coherence_exact",
    "tcl2_coherence",
    "validate",
]
