"""Estimation-theoretic references: CRB, breakdown threshold, f_sd metric.

The Cramer-Rao bound is computed numerically from the Gaussian sample
model via the analytic Jacobian of the noiseless sample map; the
breakdown threshold is the closed-form necessary condition for the
subspace swap event with two equal-amplitude Diracs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .estimators import EstimateRecord, match_estimates
from .signals import DiracStream, SamplingConfig, circular_difference


@dataclass(frozen=True)
class CrbResult:
    """Lower-bound standard deviations for each location, plus conditioning."""

    per_location_std: np.ndarray
    fisher_condition: float


@dataclass(frozen=True)
class BreakdownPrediction:
    """Closed-form breakdown threshold for one Dirac spacing."""

    psnr_db: float
    delta_t_over_T: float
    P: int
    lam: float


def sample_jacobian(stream: DiracStream, config: SamplingConfig) -> np.ndarray:
    """Jacobian of the noiseless sample map, shape (N, 2K).

    Columns are ordered (a_0..a_{K-1}, t_0..t_{K-1}).  The derivatives are
    exact: d s[m] / d a_k = exp(j*omega_m*t_k/T) and
    d s[m] / d t_k = a_k * (j*omega_m/T) * exp(j*omega_m*t_k/T), pushed
    through the inverse moment map.  All columns are real because the
    frequency set is conjugate-symmetric.
    """
    if stream.period != config.period:
        raise ValueError("stream period does not match config period")
    n = config.n_samples
    omegas = config.omegas
    basis = np.exp(1j * np.outer(omegas, stream.locations / config.T))
    inv = np.exp(-1j * np.outer(np.arange(n), omegas)) / n
    d_amp = inv @ basis
    d_loc = inv @ (basis * (1j * omegas / config.T)[:, None] * stream.amplitudes[None, :])
    jac = np.hstack([d_amp, d_loc])
    return jac.real


def crlb_location_std(
    stream: DiracStream, config: SamplingConfig, sigma: float
) -> CrbResult:
    """Cramer-Rao lower bound on the location estimates' standard deviation.

    The Fisher matrix of the white-Gaussian observation model is
    F = (1/sigma^2) J^T J with J the sample Jacobian over the 2K
    parameters; the bound for t_k is sqrt of the matching diagonal entry
    of F^{-1}.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    k = stream.k
    jac = sample_jacobian(stream, config)
    fisher = jac.T @ jac / sigma**2
    condition = float(np.linalg.cond(fisher))
    if not np.isfinite(condition) or condition > 1.0 / np.finfo(float).eps:
        raise ValueError(
            "Fisher matrix is singular; the location CRB is unbounded "
            "(coincident Diracs?)"
        )
    cov = np.linalg.inv(fisher)
    var_t = np.diag(cov)[k:]
    if np.any(var_t <= 0):
        raise ValueError("Fisher inverse is not positive on the location block")
    return CrbResult(np.sqrt(var_t), condition)


def _dirichlet_ratio(x: float, m: int) -> float:
    """sin(m*x)/sin(x) with removable singularities at x = 0 mod pi."""
    q = round(x / math.pi)
    r = x - math.pi * q
    sign = -1.0 if (q * (m - 1)) % 2 else 1.0
    if r == 0.0:
        return sign * m
    return sign * math.sin(m * r) / math.sin(r)


def breakdown_psnr(delta_t_over_T: float, P: int, lam: float) -> float:
    """Necessary-condition PSNR (dB) below which the subspace swap can occur.

    Valid for two equal-amplitude Diracs separated by delta_t, observed
    with reproduction order P (even) and frequency spacing lam:

        10*log10( 8*M*ln(M) / (M - sin(x*M)/sin(x))^2 ),

    with M = P/2 + 1 and x = (lam/2) * delta_t/T.  Returns +inf where the
    denominator vanishes (coincident Diracs).
    """
    if P < 2 or P % 2:
        raise ValueError(f"P must be a positive even integer, got {P}")
    if not lam > 0:
        raise ValueError(f"lam must be > 0, got {lam}")
    m = P // 2 + 1
    x = 0.5 * lam * delta_t_over_T
    gap = m - _dirichlet_ratio(x, m)
    if gap == 0.0:
        return math.inf
    return 10.0 * math.log10(8.0 * m * math.log(m) / gap**2)


def predict_breakdown(delta_t_over_T: float, P: int, lam: float) -> BreakdownPrediction:
    """Package the threshold with the inputs that produced it."""
    value = breakdown_psnr(delta_t_over_T, P, lam)
    if not math.isfinite(value):
        raise ValueError(
            f"breakdown threshold undefined at delta_t/T = {delta_t_over_T} "
            "(denominator vanishes)"
        )
    return BreakdownPrediction(value, delta_t_over_T, P, lam)


def location_std(
    estimates: Sequence[EstimateRecord], stream: DiracStream, k: int
) -> float:
    """Root-mean-square deviation of the k-th retrieved location.

    Each record is matched to the ground truth first; deviations are
    circular differences modulo the period, mapped to (-tau/2, tau/2].
    """
    if len(estimates) == 0:
        raise ValueError("need at least one estimate record")
    if not 0 <= k < stream.k:
        raise ValueError(f"location index {k} out of range for K={stream.k}")
    target = stream.locations[k]
    devs = np.empty(len(estimates))
    for i, record in enumerate(estimates):
        pairs = match_estimates(record.locations_hat, stream.locations, stream.period)
        hat_idx = next(hi for hi, ti in pairs if ti == k)
        devs[i] = circular_difference(
            record.locations_hat[hat_idx], target, stream.period
        )
    return float(np.sqrt(np.mean(devs**2)))
