#!/usr/bin/env python3
"""Render a batch of figures from a job manifest.

The manifest is a JSON array of jobs: {"kind": ..., "in": ..., "out": ...,
optional "title", "manifest"}. Kinds map onto the single-figure scripts.
"""

import argparse
import json
import sys

import render_basins
import render_correlations
import render_fock_hist
import render_nmse_box
import render_prediction
import render_success_bars
import render_trajectory
import render_wigner
from common import run

KINDS = {
    "correlations": render_correlations,
    "nmse-box": render_nmse_box,
    "prediction": render_prediction,
    "wigner": render_wigner,
    "fock-hist": render_fock_hist,
    "trajectory": render_trajectory,
    "success-bars": render_success_bars,
    "basins": render_basins,
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--jobs", required=True, help="JSON job list")
    args = parser.parse_args(argv)
    with open(args.jobs, "r", encoding="utf-8") as fh:
        jobs = json.load(fh)
    failures = 0
    for job in jobs:
        kind = job.get("kind")
        if kind not in KINDS:
            print(f"unknown figure kind {kind!r}", file=sys.stderr)
            failures += 1
            continue
        sub_args = ["--in", job["in"], "--out", job["out"]]
        if job.get("title"):
            sub_args += ["--title", job["title"]]
        if job.get("manifest"):
            sub_args += ["--manifest", job["manifest"]]
        code = run(KINDS[kind].main, sub_args)
        if code != 0:
            print(f"job {kind} <- {job['in']} failed with {code}", file=sys.stderr)
            failures += 1
        else:
            print(f"rendered {kind} -> {job['out']}", file=sys.stderr)
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
