"""Numerical laboratory for bilinear pseudo-differential operators."""

from .grid import (
    GridSpec,
    SampledFunction,
    forward_transform,
    inverse_transform,
    lebesgue_norm,
    multiplier_apply,
    peak_average,
)

__all__ = [
    "GridSpec",
    "SampledFunction",
    "forward_transform",
    "inverse_transform",
    "lebesgue_norm",
    "multiplier_apply",
    "peak_average",
]

__version__ = "0.1.0"
