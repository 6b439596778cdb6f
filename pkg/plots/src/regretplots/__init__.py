"""Regret-figure rendering for dpbandits experiment CSVs."""

from .render import AXES_MODES, CurveData, CurveSpec, SchemaError, extract_series, read_curve, render

__version__ = "0.1.0"

__all__ = [
    "AXES_MODES",
    "CurveData",
    "CurveSpec",
    "SchemaError",
    "extract_series",
    "read_curve",
    "render",
]
