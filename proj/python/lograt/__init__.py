"""Curvature ranking of element log-ratios along a geochemical transect."""

from ._core import (
    ConvergenceError,
    Error,
    ParseError,
    SmoothFit,
    c_value,
    crossing_set,
    curvature,
    fit,
    pair_profile,
    rank,
    synth,
    threshold,
    tweedie_deviance,
)

__all__ = [
    "ConvergenceError",
    "Error",
    "ParseError",
    "SmoothFit",
    "c_value",
    "crossing_set",
    "curvature",
    "fit",
    "pair_profile",
    "rank",
    "synth",
    "threshold",
    "tweedie_deviance",
]
