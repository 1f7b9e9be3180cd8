"""Replica-symmetric predictions for MAP recovery with asymmetric penalties.

Commands accept a config as a dict (same schema as the CLI JSON files) and
return the canonical result section as a dict.
"""

import json

from ._core import (
    ConfigError,
    DomainError,
    Error,
    InvalidArgument,
    MatrixEnsemble,
    NoConvergenceError,
    block_sizes,
    effective_params,
    normalize_config,
    scalar_map,
)
from . import _core

__all__ = [
    "ConfigError", "DomainError", "Error", "InvalidArgument", "MatrixEnsemble",
    "NoConvergenceError", "block_sizes", "effective_params", "normalize_config",
    "scalar_map", "predict", "tune", "rt", "sweep", "validate",
]


def _call(fn, config, threads):
    out = json.loads(fn(json.dumps(config), threads))
    result = out["result"]
    result["exit_code"] = out["exit_code"]
    if out["csv"]:
        result["csv"] = out["csv"]
    return result


def predict(config, threads=1):
    return _call(_core._predict, config, threads)


def tune(config, threads=1):
    return _call(_core._tune, config, threads)


def rt(config, threads=1):
    return _call(_core._rt, config, threads)


def sweep(config, threads=1):
    return _call(_core._sweep, config, threads)


def validate(config, threads=1):
    return _call(_core._validate, config, threads)
