"""Local integrity measure estimation for time-delayed dynamical systems."""

from ._core import (
    DdeSystem,
    DelaylimError,
    MetricSpace,
    ModeSet,
    SemiDiscMap,
    __version__,
    build_initial_history,
    build_map,
    custom_system,
    default_weights,
    estimate,
    exp_integral,
    matrix_exponential,
    metric_for,
    simulate,
    sweep,
    system,
    undamped_modes,
)

__all__ = [
    "DdeSystem",
    "DelaylimError",
    "MetricSpace",
    "ModeSet",
    "SemiDiscMap",
    "__version__",
    "build_initial_history",
    "build_map",
    "custom_system",
    "default_weights",
    "estimate",
    "exp_integral",
    "matrix_exponential",
    "metric_for",
    "simulate",
    "sweep",
    "system",
    "undamped_modes",
]
