"""Monte Carlo orchestration: sweeps, scatter runs, dataset export, ingest.

Everything is deterministic: noise seeds derive from
(base_seed, psnr index, delta index, realization) via the splitmix64
chain in :mod:`fristream.seeding`, so all methods at a grid cell see the
same noisy samples and re-runs produce byte-identical CSV output
regardless of worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .analysis import breakdown_psnr, crlb_location_std, location_std
from .estimators import (
    SUBSPACE_METHODS,
    EstimateRecord,
    EstimationError,
    Method,
    estimate,
    match_estimates,
)
from .moments import samples_to_moments
from .seeding import derive_seed
from .signals import DiracStream, NoiseSpec, SampleVector, SamplingConfig, add_noise, synthesize_samples

#: Default spacing grid: 10**-0.5 down to 10**-3, quarter-decade steps.
DEFAULT_DELTA_GRID = tuple(10.0 ** (-0.5 - 0.25 * i) for i in range(11))
#: Default PSNR grid: -5 dB to 70 dB in 5 dB steps.
DEFAULT_PSNR_GRID = tuple(float(p) for p in range(-5, 71, 5))

ESTIMATE_HEADER = ["method", "psnr_db", "delta_t", "realization", "k", "t_hat", "a_hat"]
SWEEP_HEADER = [
    "psnr_db",
    "delta_t",
    "method",
    "k",
    "f_sd",
    "crb_std",
    "breakdown_psnr_db",
    "i_effective",
    "failure_count",
    "config_hash",
]
SCATTER_HEADER = ["psnr_db", "realization", "method", "k", "t_hat"]


class SchemaError(ValueError):
    """A CSV file does not match the expected schema."""


def _fmt(value) -> str:
    """Render a cell; floats carry 17 significant digits for exact round-trips."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_sidecar(path: Path, config_dict: dict, config_hash: str) -> None:
    sidecar = path.with_suffix(".json")
    payload = {"config": config_dict, "config_hash": config_hash}
    with open(sidecar, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _hash_config(config_dict: dict) -> str:
    canonical = json.dumps(config_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepConfig:
    """Grid specification for Monte Carlo sweeps.

    The defaults reproduce the benchmark setting: N=21 samples, unit
    period, two Diracs of amplitude 2 anchored at t0=0, spacing swept
    over [10**-0.5, 10**-3] and PSNR over [-5, 70] dB, 1000 realizations
    per cell.
    """

    n_samples: int = 21
    tau: float = 1.0
    k: int = 2
    amplitudes: tuple[float, ...] = (2.0, 2.0)
    t0: float = 0.0
    delta_grid: tuple[float, ...] = DEFAULT_DELTA_GRID
    psnr_grid_db: tuple[float, ...] = DEFAULT_PSNR_GRID
    realizations: int = 1000
    base_seed: int = 0
    methods: tuple[str, ...] = ("prony", "prony_cadzow", "matrix_pencil")
    pencil_L: Optional[int] = None
    cadzow_max_iters: int = 20
    cadzow_tol: float = 1e-8

    def __post_init__(self) -> None:
        if len(self.delta_grid) == 0 or len(self.psnr_grid_db) == 0:
            raise ValueError("grids must be nonempty")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if self.k < 1 or len(self.amplitudes) != self.k:
            raise ValueError("amplitudes must list exactly K values")
        for name in self.methods:
            if Method(name) not in SUBSPACE_METHODS:
                raise ValueError(f"method {name!r} cannot be computed by a sweep")
        for delta in self.delta_grid:
            self.stream_for(delta)  # validates the implied stream

    @property
    def sampling(self) -> SamplingConfig:
        return SamplingConfig(self.n_samples, self.tau)

    def stream_for(self, delta: float) -> DiracStream:
        """Ground-truth stream at one grid spacing: Diracs at t0 + j*delta."""
        locations = self.t0 + delta * np.arange(self.k)
        return DiracStream(locations, np.asarray(self.amplitudes), self.tau)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["amplitudes"] = list(self.amplitudes)
        out["delta_grid"] = list(self.delta_grid)
        out["psnr_grid_db"] = list(self.psnr_grid_db)
        out["methods"] = list(self.methods)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        kwargs = dict(data)
        for key in ("amplitudes", "delta_grid", "psnr_grid_db", "methods"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def config_hash(self) -> str:
        return _hash_config(self.to_dict())


@dataclass(frozen=True)
class SweepRow:
    psnr_db: float
    delta_t: float
    method: str
    k: int
    f_sd: float
    crb_std: float
    breakdown_psnr_db: float
    i_effective: int
    failure_count: int
    config_hash: str

    def astuple(self) -> tuple:
        return (
            self.psnr_db,
            self.delta_t,
            self.method,
            self.k,
            self.f_sd,
            self.crb_std,
            self.breakdown_psnr_db,
            self.i_effective,
            self.failure_count,
            self.config_hash,
        )


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    config_dict: dict
    config_hash: str

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        _write_csv(path, SWEEP_HEADER, (row.astuple() for row in self.rows))
        _write_sidecar(path, self.config_dict, self.config_hash)
        return path


def _cell_estimates(
    cfg: SweepConfig, i_psnr: int, j_delta: int
) -> tuple[dict[str, list[tuple[int, EstimateRecord]]], dict[str, int], DiracStream, float]:
    """Run all realizations of one grid cell.

    Returns per-method lists of (realization, record), per-method failure
    counts, the cell's ground truth and its noise sigma.  All methods see
    the same noisy samples at each realization.
    """
    sampling = cfg.sampling
    psnr = cfg.psnr_grid_db[i_psnr]
    delta = cfg.delta_grid[j_delta]
    stream = cfg.stream_for(delta)
    clean = synthesize_samples(stream, sampling)
    sigma = NoiseSpec(psnr).sigma_for(clean)
    records: dict[str, list[tuple[int, EstimateRecord]]] = {m: [] for m in cfg.methods}
    failures: dict[str, int] = {m: 0 for m in cfg.methods}
    for r in range(cfg.realizations):
        seed = derive_seed(cfg.base_seed, i_psnr, j_delta, r)
        noisy = add_noise(clean, NoiseSpec(psnr, seed))
        s = samples_to_moments(noisy)
        for name in cfg.methods:
            try:
                rec = estimate(
                    s,
                    name,
                    cfg.k,
                    L=cfg.pencil_L,
                    cadzow_max_iters=cfg.cadzow_max_iters,
                    cadzow_tol=cfg.cadzow_tol,
                )
            except EstimationError:
                failures[name] += 1
                continue
            records[name].append((r, rec))
    return records, failures, stream, sigma


def _sweep_cell(args: tuple[SweepConfig, int, int]) -> list[SweepRow]:
    cfg, i_psnr, j_delta = args
    records, failures, stream, sigma = _cell_estimates(cfg, i_psnr, j_delta)
    sampling = cfg.sampling
    psnr = cfg.psnr_grid_db[i_psnr]
    delta = cfg.delta_grid[j_delta]
    try:
        crb = crlb_location_std(stream, sampling, sigma).per_location_std
    except ValueError:
        crb = np.full(cfg.k, np.nan)
    equal_pair = cfg.k == 2 and cfg.amplitudes[0] == cfg.amplitudes[1]
    threshold = (
        breakdown_psnr(delta / sampling.T, sampling.P, sampling.lam)
        if equal_pair
        else math.nan
    )
    chash = cfg.config_hash()
    rows = []
    for name in cfg.methods:
        recs = [rec for _, rec in records[name]]
        for k_idx in range(cfg.k):
            f_sd = location_std(recs, stream, k_idx) if recs else math.nan
            rows.append(
                SweepRow(
                    psnr_db=psnr,
                    delta_t=delta,
                    method=name,
                    k=k_idx,
                    f_sd=f_sd,
                    crb_std=float(crb[k_idx]),
                    breakdown_psnr_db=threshold,
                    i_effective=len(recs),
                    failure_count=failures[name],
                    config_hash=chash,
                )
            )
    return rows


def run_sweep(cfg: SweepConfig, workers: int = 1) -> SweepReport:
    """Evaluate f_sd, CRB and breakdown threshold over the full grid.

    Identical configs produce identical reports; the worker count only
    affects wall time.  Estimator failures are counted per cell and
    excluded from f_sd; large deviations are never excluded.
    """
    tasks = [
        (cfg, i, j)
        for i in range(len(cfg.psnr_grid_db))
        for j in range(len(cfg.delta_grid))
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cell_rows = list(pool.map(_sweep_cell, tasks, chunksize=1))
    else:
        cell_rows = [_sweep_cell(task) for task in tasks]
    rows = tuple(row for cell in cell_rows for row in cell)
    return SweepReport(rows, cfg.to_dict(), cfg.config_hash())


@dataclass(frozen=True)
class ScatterRow:
    psnr_db: float
    realization: int
    method: str
    k: int
    t_hat: float

    def astuple(self) -> tuple:
        return (self.psnr_db, self.realization, self.method, self.k, self.t_hat)


@dataclass(frozen=True)
class ScatterReport:
    rows: tuple[ScatterRow, ...]
    config_dict: dict
    config_hash: str

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        _write_csv(path, SCATTER_HEADER, (row.astuple() for row in self.rows))
        _write_sidecar(path, self.config_dict, self.config_hash)
        return path


def _scatter_cell(args: tuple[SweepConfig, int]) -> list[ScatterRow]:
    cfg, i_psnr = args
    records, _, stream, _ = _cell_estimates(cfg, i_psnr, 0)
    psnr = cfg.psnr_grid_db[i_psnr]
    rows = []
    for name in cfg.methods:
        for r, rec in records[name]:
            pairs = match_estimates(rec.locations_hat, stream.locations, stream.period)
            for hat_idx, true_idx in pairs:
                rows.append(
                    ScatterRow(psnr, r, name, true_idx, float(rec.locations_hat[hat_idx]))
                )
    return rows


def run_scatter(cfg: SweepConfig, workers: int = 1) -> ScatterReport:
    """Per-realization retrieved locations at a single spacing.

    Emits one row per (psnr, realization, method, matched location index);
    k refers to the ground-truth Dirac each estimate was matched to.
    """
    if len(cfg.delta_grid) != 1:
        raise ValueError("scatter runs use a single delta; got a grid")
    tasks = [(cfg, i) for i in range(len(cfg.psnr_grid_db))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cell_rows = list(pool.map(_scatter_cell, tasks, chunksize=1))
    else:
        cell_rows = [_scatter_cell(task) for task in tasks]
    rows = tuple(row for cell in cell_rows for row in cell)
    return ScatterReport(rows, cfg.to_dict(), cfg.config_hash())


@dataclass(frozen=True)
class DatasetSpec:
    """Training-set recipe: uniform locations and amplitudes at one PSNR."""

    size: int = 100_000
    psnr_db: float = 30.0
    k: int = 2
    n_samples: int = 21
    tau: float = 1.0
    amplitude_low: float = 0.5
    amplitude_high: float = 10.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("dataset size must be >= 1")
        if self.k < 1:
            raise ValueError("need K >= 1")
        if not self.amplitude_low < self.amplitude_high:
            raise ValueError("amplitude bounds out of order")

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        return _hash_config(self.to_dict())


def _dataset_header(k: int, n: int) -> list[str]:
    return (
        ["psnr_db", "sigma"]
        + [f"y{i}" for i in range(n)]
        + [f"ynoisy{i}" for i in range(n)]
        + [f"t{j}" for j in range(k)]
        + [f"a{j}" for j in range(k)]
    )


def generate_dataset(spec: DatasetSpec) -> dict[str, np.ndarray]:
    """Draw the dataset arrays in a fixed, documented order.

    One Philox generator keyed by ``spec.seed`` supplies, in order:
    the location block (size x K, uniform on [-tau/2, tau/2), sorted per
    row), the amplitude block (size x K, uniform on the amplitude range)
    and the noise block (size x N, standard normal).  Rows whose sorted
    locations collide exactly are redrawn afterwards from the same
    generator, in row order.
    """
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    half = spec.tau / 2.0
    locs = np.sort(rng.uniform(-half, half, size=(spec.size, spec.k)), axis=1)
    amps = rng.uniform(spec.amplitude_low, spec.amplitude_high, size=(spec.size, spec.k))
    eps = rng.standard_normal((spec.size, spec.n_samples))
    if spec.k > 1:
        bad = np.where(np.any(np.diff(locs, axis=1) <= 0, axis=1))[0]
        for row in bad:
            while True:
                redraw = np.sort(rng.uniform(-half, half, size=spec.k))
                if np.all(np.diff(redraw) > 0):
                    locs[row] = redraw
                    break
    sampling = SamplingConfig(spec.n_samples, spec.tau)
    omegas = sampling.omegas
    inv = np.exp(-1j * np.outer(np.arange(spec.n_samples), omegas)) / spec.n_samples
    clean = np.empty((spec.size, spec.n_samples))
    chunk = 8192
    for start in range(0, spec.size, chunk):
        stop = min(start + chunk, spec.size)
        phase = np.exp(
            1j * omegas[None, None, :] * (locs[start:stop, :, None] / sampling.T)
        )
        s = np.einsum("rk,rkm->rm", amps[start:stop], phase)
        clean[start:stop] = (s @ inv.T).real
    sigma = np.max(np.abs(clean), axis=1) * 10.0 ** (-spec.psnr_db / 20.0)
    noisy = clean + sigma[:, None] * eps
    return {
        "locations": locs,
        "amplitudes": amps,
        "clean": clean,
        "noisy": noisy,
        "sigma": sigma,
    }


def export_dataset(spec: DatasetSpec, path: str | Path) -> Path:
    """Write the dataset CSV (plus JSON sidecar); byte-stable given the seed."""
    path = Path(path)
    data = generate_dataset(spec)

    def rows():
        for i in range(spec.size):
            yield (
                [spec.psnr_db, data["sigma"][i]]
                + list(data["clean"][i])
                + list(data["noisy"][i])
                + list(data["locations"][i])
                + list(data["amplitudes"][i])
            )

    _write_csv(path, _dataset_header(spec.k, spec.n_samples), rows())
    _write_sidecar(path, spec.to_dict(), spec.config_hash())
    return path


def write_estimates_csv(rows: Iterable[Sequence], path: str | Path) -> Path:
    """Write rows in the shared estimate schema (method, psnr_db, delta_t, ...)."""
    path = Path(path)
    _write_csv(path, ESTIMATE_HEADER, rows)
    return path


def ingest_estimates(path: str | Path, config: SamplingConfig) -> list[EstimateRecord]:
    """Parse an estimate CSV into records scorable by :func:`location_std`.

    Rows are grouped by (method, psnr_db, delta_t, realization); each
    group must cover k = 0..K-1 exactly once.  Schema violations raise
    :class:`SchemaError` naming the offending line (header is line 1).
    The grouping keys are preserved in each record's diagnostics.
    """
    path = Path(path)
    groups: dict[tuple, dict[int, tuple[float, float, int]]] = {}
    order: list[tuple] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != ESTIMATE_HEADER:
            raise SchemaError(
                f"{path}: line 1: expected header {','.join(ESTIMATE_HEADER)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(ESTIMATE_HEADER):
                raise SchemaError(
                    f"{path}: line {lineno}: expected {len(ESTIMATE_HEADER)} fields, got {len(row)}"
                )
            method_name = row[0]
            try:
                Method(method_name)
            except ValueError:
                raise SchemaError(
                    f"{path}: line {lineno}: unknown method {method_name!r}"
                ) from None
            try:
                psnr_db = float(row[1])
                delta_t = float(row[2])
                realization = int(row[3])
                k_idx = int(row[4])
                t_hat = float(row[5])
                a_hat = float(row[6])
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}") from None
            if k_idx < 0:
                raise SchemaError(f"{path}: line {lineno}: negative k")
            key = (method_name, psnr_db, delta_t, realization)
            if key not in groups:
                groups[key] = {}
                order.append(key)
            if k_idx in groups[key]:
                raise SchemaError(
                    f"{path}: line {lineno}: duplicate k={k_idx} for {key}"
                )
            groups[key][k_idx] = (t_hat, a_hat, lineno)
    records = []
    for key in order:
        per_k = groups[key]
        k_count = len(per_k)
        if set(per_k) != set(range(k_count)):
            first_line = min(line for _, _, line in per_k.values())
            raise SchemaError(
                f"{path}: line {first_line}: group {key} must cover k=0..K-1 exactly once"
            )
        ts = np.array([per_k[i][0] for i in range(k_count)])
        amps = np.array([per_k[i][1] for i in range(k_count)])
        idx = np.argsort(ts, kind="stable")
        method_name, psnr_db, delta_t, realization = key
        records.append(
            EstimateRecord(
                Method(method_name),
                ts[idx],
                amps[idx],
                config,
                diagnostics={
                    "psnr_db": psnr_db,
                    "delta_t": delta_t,
                    "realization": realization,
                },
            )
        )
    return records


def score_records(
    records: Sequence[EstimateRecord],
    sampling: SamplingConfig,
    t0: float = 0.0,
    amplitudes: Sequence[float] = (2.0, 2.0),
) -> SweepReport:
    """f_sd rows for ingested records, grouped per (psnr, delta, method) cell.

    Ground truth per cell is the sweep-style stream with Diracs at
    t0 + j*delta for the record's delta_t key; exactly the scoring a
    native sweep applies.
    """
    amplitudes = tuple(float(a) for a in amplitudes)
    k = len(amplitudes)
    cells: dict[tuple, list[EstimateRecord]] = {}
    order: list[tuple] = []
    for rec in records:
        diag = rec.diagnostics or {}
        key = (diag.get("psnr_db"), diag.get("delta_t"), rec.method.value)
        if key not in cells:
            cells[key] = []
            order.append(key)
        cells[key].append(rec)
    config_dict = {
        "kind": "score",
        "n_samples": sampling.n_samples,
        "tau": sampling.period,
        "t0": t0,
        "amplitudes": list(amplitudes),
    }
    chash = _hash_config(config_dict)
    equal_pair = k == 2 and amplitudes[0] == amplitudes[1]
    rows = []
    for psnr_db, delta_t, method_name in order:
        stream = DiracStream(
            t0 + delta_t * np.arange(k), np.asarray(amplitudes), sampling.period
        )
        clean = synthesize_samples(stream, sampling)
        sigma = NoiseSpec(psnr_db).sigma_for(clean)
        try:
            crb = crlb_location_std(stream, sampling, sigma).per_location_std
        except ValueError:
            crb = np.full(k, np.nan)
        threshold = (
            breakdown_psnr(delta_t / sampling.T, sampling.P, sampling.lam)
            if equal_pair
            else math.nan
        )
        recs = cells[(psnr_db, delta_t, method_name)]
        for k_idx in range(k):
            rows.append(
                SweepRow(
                    psnr_db=psnr_db,
                    delta_t=delta_t,
                    method=method_name,
                    k=k_idx,
                    f_sd=location_std(recs, stream, k_idx),
                    crb_std=float(crb[k_idx]),
                    breakdown_psnr_db=threshold,
                    i_effective=len(recs),
                    failure_count=0,
                    config_hash=chash,
                )
            )
    return SweepReport(tuple(rows), config_dict, chash)


def read_samples_csv(
    path: str | Path, column_prefix: str = "y"
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Read sample vectors from a CSV with columns ``{prefix}0..{prefix}{N-1}``.

    Returns the (rows, N) sample matrix and any of the meta columns
    psnr_db / delta_t / realization present in the file.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        sample_cols = []
        i = 0
        while f"{column_prefix}{i}" in header:
            sample_cols.append(header.index(f"{column_prefix}{i}"))
            i += 1
        if not sample_cols:
            raise SchemaError(f"{path}: no {column_prefix}0.. sample columns found")
        meta_cols = {
            name: header.index(name)
            for name in ("psnr_db", "delta_t", "realization")
            if name in header
        }
        samples = []
        meta: dict[str, list[float]] = {name: [] for name in meta_cols}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                samples.append([float(row[c]) for c in sample_cols])
                for name, c in meta_cols.items():
                    meta[name].append(float(row[c]))
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}") from None
    return np.asarray(samples), {name: np.asarray(vals) for name, vals in meta.items()}


def estimate_samples_matrix(
    samples: np.ndarray,
    meta: dict[str, np.ndarray],
    method: Method | str,
    k: int,
    config: SamplingConfig,
    L: Optional[int] = None,
    cadzow_max_iters: int = 20,
    cadzow_tol: float = 1e-8,
) -> list[tuple]:
    """Run one estimator over each row of a sample matrix.

    Returns estimate-schema rows; meta columns default to psnr_db=0,
    delta_t=0 and realization=row index when absent.
    """
    method = Method(method)
    rows = []
    n_rows = samples.shape[0]
    psnr = meta.get("psnr_db", np.zeros(n_rows))
    delta = meta.get("delta_t", np.zeros(n_rows))
    realization = meta.get("realization", np.arange(n_rows))
    for i in range(n_rows):
        vec = SampleVector(samples[i], config)
        s = samples_to_moments(vec)
        try:
            rec = estimate(
                s, method, k, L=L,
                cadzow_max_iters=cadzow_max_iters, cadzow_tol=cadzow_tol,
            )
        except EstimationError:
            continue
        for k_idx in range(k):
            rows.append(
                (
                    method.value,
                    float(psnr[i]),
                    float(delta[i]),
                    int(realization[i]),
                    k_idx,
                    float(rec.locations_hat[k_idx]),
                    float(rec.amplitudes_hat[k_idx]),
                )
            )
    return rows
