"""Render regret curves from experiment CSV files.

Input files follow the dpbandits CSV contract: header
``t,mean_regret,min_regret,max_regret`` with an optional trailing ``bound``
column, one row per logged timestep. Each curve is drawn as its mean line
plus a shaded band spanning the per-run min/max envelope; a bound column
becomes a dashed overlay. Rendering never transforms the data (log scaling
is an axes property), so the plotted series can be read back exactly.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

AXES_MODES = ("log-x", "log-log")

REQUIRED_COLUMNS = ("t", "mean_regret", "min_regret", "max_regret")
BOUND_COLUMN = "bound"

BAND_ALPHA = 0.2


class SchemaError(ValueError):
    """A CSV file does not follow the expected column contract."""


@dataclass(frozen=True)
class CurveSpec:
    """One curve: a label, the CSV path, and optional style hints."""

    label: str
    path: str | Path
    color: str | None = None
    linestyle: str = "-"


@dataclass(frozen=True)
class CurveData:
    label: str
    t: np.ndarray
    mean: np.ndarray
    low: np.ndarray
    high: np.ndarray
    bound: np.ndarray | None


def read_curve(spec: CurveSpec) -> CurveData:
    """Parse one CSV into arrays, validating the column contract."""
    path = Path(spec.path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        columns = reader.fieldnames or []
        for required in REQUIRED_COLUMNS:
            if required not in columns:
                raise SchemaError(f"{path}: missing column {required!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    has_bound = BOUND_COLUMN in columns

    def column(name):
        try:
            return np.array([float(row[name]) for row in rows])
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: non-numeric value in column {name!r}: {exc}") from None

    data = CurveData(
        label=spec.label,
        t=column("t"),
        mean=column("mean_regret"),
        low=column("min_regret"),
        high=column("max_regret"),
        bound=column(BOUND_COLUMN) if has_bound else None,
    )
    if np.any(data.t <= 0) or np.any(np.diff(data.t) <= 0):
        raise SchemaError(f"{path}: column 't' must be strictly increasing and positive")
    return data


def render(curves: list[CurveSpec], axes: str = "log-x", out: str | Path | None = None,
           title: str | None = None) -> Figure:
    """Draw mean curves with min/max bands and optional bound overlays.

    Returns the figure; saves it to `out` when given (format by extension).
    All curves must share the same final timestep.
    """
    if not curves:
        raise ValueError("at least one curve is required")
    if axes not in AXES_MODES:
        raise ValueError(f"axes must be one of {AXES_MODES}, got {axes!r}")
    data = [read_curve(spec) for spec in curves]
    horizons = {float(d.t[-1]) for d in data}
    if len(horizons) > 1:
        raise ValueError(f"curves have inconsistent horizons: {sorted(horizons)}")

    figure = Figure(figsize=(7.0, 4.5))
    FigureCanvasAgg(figure)
    ax = figure.subplots()
    for spec, curve in zip(curves, data):
        (line,) = ax.plot(curve.t, curve.mean, label=curve.label,
                          color=spec.color, linestyle=spec.linestyle)
        ax.fill_between(curve.t, curve.low, curve.high,
                        color=line.get_color(), alpha=BAND_ALPHA, linewidth=0)
        if curve.bound is not None:
            ax.plot(curve.t, curve.bound, label=f"{curve.label} bound",
                    color=line.get_color(), linestyle="--")
    ax.set_xscale("log")
    if axes == "log-log":
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("regret")
    if title:
        ax.set_title(title)
    ax.legend()
    figure.tight_layout()
    if out is not None:
        figure.savefig(out)
    return figure


def extract_series(figure: Figure) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Plotted (x, y) series keyed by legend label, for round-trip checks."""
    ax = figure.axes[0]
    return {line.get_label(): (np.asarray(line.get_xdata()), np.asarray(line.get_ydata()))
            for line in ax.get_lines()}
