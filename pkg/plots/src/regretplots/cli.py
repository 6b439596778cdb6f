"""Command line for rendering regret figures from experiment CSV files."""

import argparse
from pathlib import Path

from .render import AXES_MODES, CurveSpec, SchemaError, render


def main(args=None) -> int:
    parser = argparse.ArgumentParser(
        prog="regretplots",
        description="Plot regret curves (mean line + min/max band) from dpbandits CSVs.")
    parser.add_argument("csvs", nargs="+", help="input CSV files")
    parser.add_argument("--labels", help="comma-separated curve labels (default: file stems)")
    parser.add_argument("--axes", choices=AXES_MODES, default="log-x")
    parser.add_argument("--title")
    parser.add_argument("--out", required=True, help="output image path (png/pdf/svg)")
    ns = parser.parse_args(args)

    if ns.labels:
        labels = [label.strip() for label in ns.labels.split(",")]
        if len(labels) != len(ns.csvs):
            parser.error(f"--labels: got {len(labels)} labels for {len(ns.csvs)} files")
    else:
        labels = [Path(path).stem for path in ns.csvs]
    curves = [CurveSpec(label=label, path=path) for label, path in zip(labels, ns.csvs)]
    try:
        render(curves, axes=ns.axes, out=ns.out, title=ns.title)
    except (SchemaError, ValueError, OSError) as exc:
        parser.error(str(exc))
    print(f"wrote {ns.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
