"""Harmonic chain with evanescent flip noise: simulators, correlation solvers and limit kernels."""

from ._core import (
    BudgetExceeded,
    ConfigError,
    G0,
    Gn_quadrature,
    Gn_residue,
    ModelParams,
    NumericalError,
    TestFunction,
    __version__,
    classify_energy,
    classify_regime,
    energy_kernel,
    eta,
    fd_residual,
    gaussian,
    kernel,
    kernel_mass,
    lemma_checks,
    limit_correlation,
    resolvent_integral,
    sample_gibbs,
    simulate,
    volume_kernel,
)
from ._core import run as _run

import json as _json


def run(config):
    """Run one experiment. `config` is a dict or a JSON string; returns (exit_code, log)."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run(config)
