"""Command-line interface for synthesis, estimation, sweeps and datasets."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .analysis import breakdown_psnr, crlb_location_std
from .estimators import Method
from .harness import (
    DatasetSpec,
    SchemaError,
    SweepConfig,
    estimate_samples_matrix,
    export_dataset,
    ingest_estimates,
    read_samples_csv,
    run_scatter,
    run_sweep,
    score_records,
    write_estimates_csv,
)
from .moments import samples_to_moments
from .seeding import derive_seed
from .signals import DiracStream, NoiseSpec, SamplingConfig, add_noise, synthesize_samples


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip() != "")


def _emit(path: str, header: list[str], rows) -> None:
    if path == "-":
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(harness._fmt(v) for v in row) + "\n")
    else:
        harness._write_csv(Path(path), header, rows)


def _load_sweep_config(args: argparse.Namespace, default_realizations: int = 1000) -> SweepConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = SweepConfig.from_dict(json.load(fh))
    else:
        cfg = SweepConfig(realizations=default_realizations)
    overrides = {}
    if args.realizations is not None:
        overrides["realizations"] = args.realizations
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.methods is not None:
        overrides["methods"] = tuple(args.methods.split(","))
    if getattr(args, "delta", None) is not None:
        overrides["delta_grid"] = (args.delta,)
    if getattr(args, "delta_grid", None) is not None:
        overrides["delta_grid"] = _floats(args.delta_grid)
    if getattr(args, "psnr_grid", None) is not None:
        overrides["psnr_grid_db"] = _floats(args.psnr_grid)
    if args.pencil_L is not None:
        overrides["pencil_L"] = args.pencil_L
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def _add_sweep_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with SweepConfig fields")
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="base seed override")
    p.add_argument("--methods", default=None, help="comma-separated method names")
    p.add_argument("--psnr-grid", dest="psnr_grid", default=None)
    p.add_argument("--pencil-L", dest="pencil_L", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)


def cmd_synth(args: argparse.Namespace) -> int:
    config = SamplingConfig(args.n, args.tau)
    locations = np.array(_floats(args.locations))
    stream = DiracStream(locations, np.array(_floats(args.amplitudes)), args.tau)
    clean = synthesize_samples(stream, config)
    delta = float(locations[1] - locations[0]) if locations.size >= 2 else 0.0
    psnr = args.psnr if args.psnr is not None else float("inf")
    rows = []
    for r in range(args.count):
        if args.psnr is None:
            vec = clean
        else:
            seed = args.seed if args.count == 1 else derive_seed(args.seed, r)
            vec = add_noise(clean, NoiseSpec(args.psnr, seed))
        rows.append([psnr, delta, r] + list(vec.values))
    header = ["psnr_db", "delta_t", "realization"] + [f"y{i}" for i in range(config.n_samples)]
    _emit(args.out, header, rows)
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    config = SamplingConfig(args.n, args.tau)
    samples, meta = read_samples_csv(args.infile, column_prefix=args.column_prefix)
    rows = estimate_samples_matrix(
        samples,
        meta,
        args.method,
        args.k,
        config,
        L=args.pencil_L,
        cadzow_max_iters=args.cadzow_iters,
        cadzow_tol=args.cadzow_tol,
    )
    write_estimates_csv(rows, args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_sweep_config(args)
    report = run_sweep(cfg, workers=args.workers)
    report.to_csv(args.out)
    return 0


def cmd_scatter(args: argparse.Namespace) -> int:
    cfg = _load_sweep_config(args, default_realizations=100)
    report = run_scatter(cfg, workers=args.workers)
    report.to_csv(args.out)
    return 0


def cmd_crb(args: argparse.Namespace) -> int:
    config = SamplingConfig(args.n, args.tau)
    amplitudes = np.array(_floats(args.amplitudes))
    locations = args.t0 + args.delta * np.arange(amplitudes.size)
    stream = DiracStream(locations, amplitudes, args.tau)
    clean = synthesize_samples(stream, config)
    rows = []
    for psnr in _floats(args.psnr_grid):
        sigma = NoiseSpec(psnr).sigma_for(clean)
        result = crlb_location_std(stream, config, sigma)
        for k_idx, std in enumerate(result.per_location_std):
            rows.append([psnr, args.delta, k_idx, sigma, float(std)])
    _emit(args.out, ["psnr_db", "delta_t", "k", "sigma", "crb_std"], rows)
    return 0


def cmd_breakdown(args: argparse.Namespace) -> int:
    config = SamplingConfig(args.n, args.tau)
    deltas = _floats(args.delta_grid) if args.delta_grid else harness.DEFAULT_DELTA_GRID
    rows = []
    for delta in deltas:
        ratio = delta / config.T
        rows.append([delta, ratio, breakdown_psnr(ratio, config.P, config.lam)])
    _emit(args.out, ["delta_t", "delta_t_over_T", "breakdown_psnr_db"], rows)
    return 0


def cmd_dataset(args: argparse.Namespace) -> int:
    spec = DatasetSpec(
        size=args.size,
        psnr_db=args.psnr,
        k=args.k,
        n_samples=args.n,
        tau=args.tau,
        seed=args.seed,
    )
    export_dataset(spec, args.out)
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    config = SamplingConfig(args.n, args.tau)
    records = ingest_estimates(args.infile, config)
    deltas = {(rec.diagnostics or {})["delta_t"] for rec in records}
    if any(d <= 0 for d in deltas):
        raise SystemExit(
            "ingest scores sweep-style experiments (Diracs at t0 + j*delta); "
            f"found non-positive delta_t keys in {args.infile}"
        )
    report = score_records(records, config, t0=args.t0, amplitudes=_floats(args.amplitudes))
    report.to_csv(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fristream",
        description="Periodic Dirac-stream reconstruction and benchmarking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize (optionally noisy) samples")
    p.add_argument("--locations", required=True, help="comma-separated t_k")
    p.add_argument("--amplitudes", required=True, help="comma-separated a_k")
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--psnr", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1,
                   help="noisy realizations to emit (seeds derived from --seed)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", help="run an estimator over a samples CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--method", required=True, choices=[m.value for m in Method][:4])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--column-prefix", dest="column_prefix", default="y")
    p.add_argument("--pencil-L", dest="pencil_L", type=int, default=None)
    p.add_argument("--cadzow-iters", dest="cadzow_iters", type=int, default=20)
    p.add_argument("--cadzow-tol", dest="cadzow_tol", type=float, default=1e-8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="full PSNR x spacing Monte Carlo sweep")
    _add_sweep_options(p)
    p.add_argument("--delta-grid", dest="delta_grid", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scatter", help="per-realization locations at one spacing")
    _add_sweep_options(p)
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("crb", help="location CRB over a PSNR grid")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--amplitudes", default="2,2")
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--psnr-grid", dest="psnr_grid", default="-5,0,5,10,15,20,25,30,35,40,45,50,55,60,65,70")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_crb)

    p = sub.add_parser("breakdown", help="closed-form breakdown PSNR per spacing")
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--delta-grid", dest="delta_grid", default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_breakdown)

    p = sub.add_parser("dataset", help="export a training dataset CSV")
    p.add_argument("--size", type=int, default=100_000)
    p.add_argument("--psnr", type=float, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("ingest", help="score an estimate CSV against ground truth")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--amplitudes", default="2,2")
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
