#!/usr/bin/env python3
"""Render sweep/scatter CSVs produced by the fristream CLI.

Not part of the package runtime; requires matplotlib.

    python docs/plot_sweep.py report.csv --out sweep.png
    python docs/plot_sweep.py scatter.csv --kind scatter --out scatter.png
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_sweep(rows, out):
    methods = sorted({r["method"] for r in rows})
    fig, axes = plt.subplots(1, len(methods), figsize=(5 * len(methods), 4), squeeze=False)
    for ax, method in zip(axes[0], methods):
        cells = defaultdict(list)
        for r in rows:
            if r["method"] != method:
                continue
            cells[(float(r["psnr_db"]), float(r["delta_t"]))].append(float(r["f_sd"]))
        psnrs = sorted({p for p, _ in cells})
        deltas = sorted({d for _, d in cells})
        grid = np.full((len(deltas), len(psnrs)), np.nan)
        for (p, d), v in cells.items():
            grid[deltas.index(d), psnrs.index(p)] = np.mean(v)
        im = ax.imshow(
            np.log10(grid),
            aspect="auto",
            origin="lower",
            extent=[min(psnrs), max(psnrs), 0, len(deltas)],
            cmap="viridis",
        )
        ax.set_yticks(np.arange(len(deltas)) + 0.5)
        ax.set_yticklabels([f"{d:.3g}" for d in deltas])
        ax.set_xlabel("PSNR (dB)")
        ax.set_ylabel("spacing")
        ax.set_title(method)
        fig.colorbar(im, ax=ax, label="log10 f_sd")
        # breakdown overlay where provided
        bd = {float(r["delta_t"]): float(r["breakdown_psnr_db"]) for r in rows if r["method"] == method}
        xs = [bd[d] for d in deltas if np.isfinite(bd.get(d, np.nan))]
        ys = [deltas.index(d) + 0.5 for d in deltas if np.isfinite(bd.get(d, np.nan))]
        if xs:
            ax.plot(xs, ys, "r:")
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_scatter(rows, out):
    methods = sorted({r["method"] for r in rows})
    fig, axes = plt.subplots(len(methods), 1, figsize=(7, 3.2 * len(methods)), squeeze=False)
    for ax, method in zip(axes[:, 0], methods):
        sel = [r for r in rows if r["method"] == method]
        psnr = np.array([float(r["psnr_db"]) for r in sel])
        t_hat = np.array([float(r["t_hat"]) for r in sel])
        k = np.array([int(r["k"]) for r in sel])
        jitter = (np.random.default_rng(0).uniform(-1, 1, len(sel))) * 0.8
        for ki in sorted(set(k)):
            m = k == ki
            ax.plot(psnr[m] + jitter[m], t_hat[m], ".", ms=2, label=f"k={ki}")
        ax.set_xlabel("PSNR (dB)")
        ax.set_ylabel("retrieved location")
        ax.set_title(method)
        ax.legend(markerscale=4)
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--kind", choices=["sweep", "scatter"], default="sweep")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    rows = load(args.csv)
    if args.kind == "sweep":
        plot_sweep(rows, args.out)
    else:
        plot_scatter(rows, args.out)


if __name__ == "__main__":
    main()
