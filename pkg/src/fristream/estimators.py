"""Subspace estimators: annihilating filter, Cadzow denoising, matrix pencil.

All estimators consume the exponential moments s[m] = sum_k b_k * u_k**m
and recover the unit-circle roots u_k, from which Dirac locations and
amplitudes follow.  Everything here is pure and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .moments import MomentVector
from .signals import SamplingConfig, circular_difference


class Method(str, Enum):
    """Estimator identifiers used in records, reports and CSV files."""

    PRONY = "prony"
    PRONY_CADZOW = "prony_cadzow"
    MATRIX_PENCIL = "matrix_pencil"
    MATRIX_PENCIL_CADZOW = "matrix_pencil_cadzow"
    NN_DIRECT = "nn_direct"
    NN_DENOISE_PENCIL = "nn_denoise_pencil"


#: Methods computed natively by this package (the rest are ingested).
SUBSPACE_METHODS = (
    Method.PRONY,
    Method.PRONY_CADZOW,
    Method.MATRIX_PENCIL,
    Method.MATRIX_PENCIL_CADZOW,
)


class EstimationError(RuntimeError):
    """An estimator could not produce K valid roots."""


@dataclass(frozen=True, eq=False)
class EstimateRecord:
    """One method's recovered locations/amplitudes for one realization."""

    method: Method
    locations_hat: np.ndarray
    amplitudes_hat: np.ndarray
    config: SamplingConfig
    diagnostics: Optional[dict] = None

    def __post_init__(self) -> None:
        locs = np.asarray(self.locations_hat, dtype=float)
        amps = np.asarray(self.amplitudes_hat, dtype=float)
        if locs.ndim != 1 or amps.shape != locs.shape:
            raise ValueError("locations_hat and amplitudes_hat must be 1-d and equal length")
        if locs.size > 1 and np.any(np.diff(locs) < 0):
            raise ValueError("locations_hat must be sorted ascending")
        locs.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "locations_hat", locs)
        object.__setattr__(self, "amplitudes_hat", amps)

    @property
    def k(self) -> int:
        return self.locations_hat.size


def _toeplitz_window(values: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """T[i, j] = values[cols - 1 + i - j]; a sliding window in Toeplitz layout."""
    c = cols - 1
    idx = c + np.arange(rows)[:, None] - np.arange(cols)[None, :]
    return values[idx]


def _validate_order(p1: int, k: int) -> None:
    if k < 1:
        raise ValueError(f"model order K must be >= 1, got {k}")
    if p1 < 2 * k:
        raise ValueError(f"need P+1 >= 2K moments; have {p1} for K={k}")


def prony(s: MomentVector, k: int) -> np.ndarray:
    """Annihilating-filter root recovery.

    Builds the (P+1-K) x (K+1) Toeplitz matrix S[i, j] = s[K+i-j], takes
    the right singular vector of the smallest singular value as the
    filter h, and returns the K roots of sum_j h[j] * z**(K-j).
    """
    values = s.values
    _validate_order(values.size, k)
    toe = _toeplitz_window(values, values.size - k, k + 1)
    _, _, vh = np.linalg.svd(toe, full_matrices=False)
    h = np.conj(vh[-1, :])
    if not np.any(np.abs(h) > 0):
        raise EstimationError("annihilating filter is identically zero")
    roots = np.roots(h)
    if roots.size != k or not np.all(np.isfinite(roots)):
        raise EstimationError(
            f"annihilating filter yielded {roots.size} finite roots, expected {k}"
        )
    return roots


def cadzow(
    s: MomentVector, k: int, max_iters: int = 20, tol: float = 1e-8
) -> MomentVector:
    """Iterated rank-K truncation with Toeplitz re-averaging (Cadzow).

    Each pass lifts the moments into a near-square Toeplitz window,
    truncates to the K leading singular values, and averages the window
    diagonals back into a sequence.  Stops once the (K+1)-th singular
    value falls below tol times the first, or after max_iters passes.
    """
    denoised, _ = cadzow_with_trace(s, k, max_iters, tol)
    return denoised


def cadzow_with_trace(
    s: MomentVector, k: int, max_iters: int = 20, tol: float = 1e-8
) -> tuple[MomentVector, np.ndarray]:
    """Like :func:`cadzow` but also returns the per-pass ratio sigma_{K+1}/sigma_1."""
    values = np.array(s.values)
    p1 = values.size
    _validate_order(p1, k)
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    cols = (p1 - 1) // 2 + 1
    rows = p1 - cols + 1
    ratios = []
    for _ in range(max_iters):
        mat = _toeplitz_window(values, rows, cols)
        u, sv, vh = np.linalg.svd(mat, full_matrices=False)
        ratios.append(float(sv[k] / sv[0]) if sv[0] > 0 else 0.0)
        if ratios[-1] < tol:
            break
        lowrank = (u[:, :k] * sv[:k]) @ vh[:k, :]
        values = _average_diagonals(lowrank, p1, cols - 1)
    return MomentVector(values, s.config), np.asarray(ratios)


def _average_diagonals(mat: np.ndarray, length: int, c: int) -> np.ndarray:
    """Collapse a Toeplitz-layout window back to a sequence by diagonal means."""
    out = np.empty(length, dtype=complex)
    for q in range(length):
        out[q] = np.mean(np.diagonal(mat, offset=c - q))
    return out


def matrix_pencil(s: MomentVector, k: int, L: Optional[int] = None) -> np.ndarray:
    """Matrix pencil root recovery from the Hankel window H[i, j] = s[i+j].

    The K leading right singular vectors form the signal row basis; the
    shifted pair (first/last position of the window dropped) is linked by
    a K x K operator whose eigenvalues are the u_k.  L defaults to the
    near-square choice floor((P+1)/2).
    """
    values = s.values
    p1 = values.size
    _validate_order(p1, k)
    if L is None:
        L = p1 // 2
    if not k <= L <= p1 - k:
        raise ValueError(f"pencil parameter L={L} outside [K, P+1-K] = [{k}, {p1 - k}]")
    hank = values[np.arange(p1 - L)[:, None] + np.arange(L + 1)[None, :]]
    _, sv, vh = np.linalg.svd(hank, full_matrices=False)
    floor = max(hank.shape) * np.finfo(float).eps * sv[0]
    if sv[k - 1] <= floor:
        raise EstimationError(
            f"rank collapse: only {int(np.sum(sv > floor))} significant singular values, need {k}"
        )
    w = vh[:k, :]
    phi_t, *_ = np.linalg.lstsq(w[:, :-1].T, w[:, 1:].T, rcond=None)
    us = np.linalg.eigvals(phi_t)
    if us.size != k or not np.all(np.isfinite(us)):
        raise EstimationError("pencil eigenvalue extraction failed")
    return us


def roots_to_locations(us: np.ndarray, config: SamplingConfig) -> np.ndarray:
    """Map roots to locations t_k = (T/lam) * arg(u_k), sorted ascending.

    Roots are projected onto the unit circle first (only the angle carries
    location information); the angle convention [-pi, pi) puts locations
    in [-tau/2, tau/2).
    """
    us = np.atleast_1d(np.asarray(us, dtype=complex))
    if us.size == 0:
        raise ValueError("no roots to map")
    mags = np.abs(us)
    if np.any(mags == 0):
        raise ValueError("zero root has no angle")
    ang = np.angle(us / mags)
    ang[ang >= np.pi] = -np.pi
    return np.sort(config.T / config.lam * ang)


def recover_amplitudes(
    s: MomentVector, ts: np.ndarray, config: SamplingConfig
) -> np.ndarray:
    """Least-squares amplitudes for known locations.

    Solves s[m] ~ sum_k b_k * u_k**m over the (P+1) x K Vandermonde system
    and unwinds the b_k phase: a_k = Re(b_k * exp(-j*omega0*t_k/T)).
    """
    a, _ = _amplitude_fit(s, ts, config)
    return a


def _amplitude_fit(
    s: MomentVector, ts: np.ndarray, config: SamplingConfig
) -> tuple[np.ndarray, float]:
    """Amplitudes plus the relative imaginary residue of the phase unwind."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.size < 1:
        raise ValueError("need at least one location")
    if ts.size > 1:
        gaps = np.abs(
            circular_difference(ts[:, None], ts[None, :], config.period)
        )[np.triu_indices(ts.size, 1)]
        if np.any(gaps < 1e-12 * config.period):
            raise ValueError("location collision: Vandermonde system is singular")
    us = np.exp(1j * config.lam * ts / config.T)
    vand = us[None, :] ** np.arange(config.P + 1)[:, None]
    b, *_ = np.linalg.lstsq(vand, s.values, rcond=None)
    unwound = b * np.exp(-1j * config.omega0 * ts / config.T)
    scale = max(float(np.max(np.abs(b))), np.finfo(float).tiny)
    residue = float(np.max(np.abs(unwound.imag)) / scale)
    return unwound.real, residue


def match_estimates(
    t_hat: np.ndarray, t_true: np.ndarray, period: float = 1.0
) -> list[tuple[int, int]]:
    """Optimal pairing of estimated and true locations on the circle.

    Returns (hat_index, true_index) pairs, ordered by true index, for the
    permutation minimizing the summed circular distances modulo ``period``.
    K <= 3 is solved by exhaustive search (lexicographically smallest
    permutation wins exact ties); larger K falls back to the Hungarian
    algorithm.
    """
    t_hat = np.atleast_1d(np.asarray(t_hat, dtype=float))
    t_true = np.atleast_1d(np.asarray(t_true, dtype=float))
    if t_hat.size != t_true.size:
        raise ValueError(f"length mismatch: {t_hat.size} estimates vs {t_true.size} truths")
    k = t_hat.size
    cost = np.abs(circular_difference(t_hat[:, None], t_true[None, :], period))
    if k <= 3:
        best_perm = None
        best_total = np.inf
        for perm in permutations(range(k)):
            total = sum(cost[perm[j], j] for j in range(k))
            if total < best_total:
                best_total = total
                best_perm = perm
        assert best_perm is not None
        return [(best_perm[j], j) for j in range(k)]
    rows, cols = linear_sum_assignment(cost)
    return sorted(zip(rows.tolist(), cols.tolist()), key=lambda pair: pair[1])


def conjugate_closure_defect(us: np.ndarray) -> float:
    """Distance between the root set and its conjugate set.

    Measured as the largest matched-pair distance under the optimal
    assignment between {u_k} and {conj(u_k)}.  Zero only for root sets
    symmetric about the real axis; reported as a diagnostic, never an
    error (generic streams do not have symmetric roots).
    """
    us = np.atleast_1d(np.asarray(us, dtype=complex))
    cost = np.abs(us[:, None] - np.conj(us)[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def estimate(
    s: MomentVector,
    method: Method | str,
    k: int,
    L: Optional[int] = None,
    cadzow_max_iters: int = 20,
    cadzow_tol: float = 1e-8,
) -> EstimateRecord:
    """Full pipeline: optional Cadzow, root recovery, locations, amplitudes."""
    method = Method(method)
    if method not in SUBSPACE_METHODS:
        raise ValueError(f"method {method.value!r} is not computed by this pipeline")
    diagnostics: dict = {}
    working = s
    if method in (Method.PRONY_CADZOW, Method.MATRIX_PENCIL_CADZOW):
        working, ratios = cadzow_with_trace(s, k, cadzow_max_iters, cadzow_tol)
        diagnostics["cadzow_iterations"] = int(ratios.size)
        diagnostics["cadzow_final_ratio"] = float(ratios[-1])
    if method in (Method.PRONY, Method.PRONY_CADZOW):
        us = prony(working, k)
    else:
        us = matrix_pencil(working, k, L)
    diagnostics["conjugate_closure_defect"] = conjugate_closure_defect(us)
    ts = roots_to_locations(us, s.config)
    try:
        amps, residue = _amplitude_fit(working, ts, s.config)
    except ValueError as exc:
        # coincident roots mean fewer than K distinct locations were found
        raise EstimationError(str(exc)) from exc
    diagnostics["amplitude_imag_residue"] = residue
    if residue > 0.1:
        diagnostics["amplitude_residue_flag"] = True
    return EstimateRecord(method, ts, amps, s.config, diagnostics)
