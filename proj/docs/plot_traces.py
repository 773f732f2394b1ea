#!/usr/bin/env python3
"""Plot error against iteration for every trace sidecar in a bench output
directory, one line per (solver, seed), on a log scale.

usage: plot_traces.py <out-dir> [plot.png]

Needs matplotlib.
"""

import csv
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load(path):
    its, errs = [], []
    with open(path) as f:
        for row in csv.DictReader(f):
            if row["error"]:
                its.append(int(row["iteration"]))
                errs.append(max(float(row["error"]), 1e-16))
    return its, errs


def main():
    out_dir = sys.argv[1]
    target = sys.argv[2] if len(sys.argv) > 2 else os.path.join(out_dir, "traces.png")
    colors = {}
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in sorted(glob.glob(os.path.join(out_dir, "*_trace.csv"))):
        solver = os.path.basename(path).rsplit("_", 2)[0]
        color = colors.setdefault(solver, "C%d" % len(colors))
        its, errs = load(path)
        first = solver not in [l.get_label() for l in ax.get_lines()]
        ax.semilogy(its, errs, color=color, alpha=0.6, label=solver if first else None)
    ax.set_xlabel("iteration")
    ax.set_ylabel("error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(target, dpi=120)
    print("wrote", target)


if __name__ == "__main__":
    main()
