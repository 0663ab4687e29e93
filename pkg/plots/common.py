"""Shared plumbing for the figure scripts: CSV loading, schema checks, saving.

Each figure kind declares its required columns; inputs failing the schema
raise :class:`SchemaError` naming the first missing column. Scripts never
recompute physics -- they draw exactly what the CSV contains. Saved PNGs are
deterministic for identical inputs, and every figure is annotated with a
short hash of its input file (plus the run-manifest hash when given).
"""

import argparse
import hashlib
import json
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


class SchemaError(ValueError):
    pass


def load_table(path, required_columns, allow_extra=True):
    """Read a CSV into {column: list[str]}; verify the required columns."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise SchemaError(f"{path}: no header row")
    header = [h.strip() for h in lines[0].split(",")]
    for column in required_columns:
        if column not in header:
            raise SchemaError(f"{path}: missing required column {column!r} "
                              f"(found {header})")
    if not allow_extra:
        extra = [h for h in header if h not in required_columns]
        if extra:
            raise SchemaError(f"{path}: unexpected columns {extra}")
    table = {h: [] for h in header}
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row with {len(cells)} cells under "
                              f"{len(header)} columns")
        for h, cell in zip(header, cells):
            table[h].append(cell)
    return table


def floats(table, column):
    return [float(v) for v in table[column]]


def input_hash(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:12]


def manifest_hash(path):
    with open(path, "rb") as fh:
        payload = fh.read()
    # a manifest annotates as its own content hash; invalid JSON is rejected
    json.loads(payload)
    return hashlib.sha256(payload).hexdigest()[:12]


def base_parser(description):
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--in", dest="input", required=True, help="input CSV")
    parser.add_argument("--out", dest="output", required=True, help="output image")
    parser.add_argument("--manifest", default=None,
                        help="run manifest JSON to annotate")
    parser.add_argument("--title", default=None)
    return parser


def finish(fig, ax, args, empty=False):
    """Annotate, lay out and save; returns 0 for the script exit code."""
    stamp = f"input {input_hash(args.input)}"
    if args.manifest:
        stamp += f" | manifest {manifest_hash(args.manifest)}"
    fig.text(0.99, 0.01, stamp, ha="right", va="bottom", fontsize=6, alpha=0.7)
    if args.title:
        ax.set_title(args.title)
    if empty:
        print(f"warning: {args.input} holds no data rows; rendering blank axes",
              file=sys.stderr)
    fig.savefig(args.output, dpi=130)
    plt.close(fig)
    return 0


def run(main, argv=None):
    """Standard exit-code wrapper for every figure script."""
    try:
        return main(argv)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


def data_extents(xs, ys):
    """Bounding box of plotted data, for the golden-extent regression check."""
    if not xs or not ys:
        return None
    return {"x": [min(xs), max(xs)], "y": [min(ys), max(ys)]}
