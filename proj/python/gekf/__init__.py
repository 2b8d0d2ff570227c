"""Geometric extended Kalman filtering on manifolds with affine connections."""

import json as _json

from ._core import (
    BranchError,
    ConfigError,
    Geometry,
    NumericalError,
    UnsupportedError,
    __version__,
    anees_band,
    default_config,
    jacobians,
    make_geometry,
    order_check,
    reexpress,
    variant_names,
)
from . import _core


def _config_text(config):
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def parse_config(config):
    """Validate a config (dict or JSON text) and return the canonical resolved dict."""
    return _json.loads(_core.parse_config(_config_text(config)))


def monte_carlo(config=None):
    """Run the SE2(3) benchmark; returns summary and diagnostics rows plus the formatted table."""
    return _core.monte_carlo(_config_text(config))


def simulate(config=None):
    """Truth positions and noisy IMU samples of run 0 as numpy arrays."""
    return _core.simulate(_config_text(config))


__all__ = [
    "BranchError",
    "ConfigError",
    "Geometry",
    "NumericalError",
    "UnsupportedError",
    "__version__",
    "anees_band",
    "default_config",
    "jacobians",
    "make_geometry",
    "monte_carlo",
    "order_check",
    "parse_config",
    "reexpress",
    "simulate",
    "variant_names",
]
