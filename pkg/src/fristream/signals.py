"""Signal and acquisition model for periodic streams of Diracs.

A stream of K weighted Diracs with period tau is observed through a
max-order exponential reproducing kernel at N = tau/T uniform samples per
period.  In that setting the acquisition is exactly Fourier-domain
synthesis over the N reproduced frequencies, equivalently filtering with
the periodic sinc (Dirichlet) kernel; the continuous kernel is never
materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

#: Absolute bound on the imaginary residue tolerated when synthesized
#: samples are cast to real values.
IMAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SamplingConfig:
    """Acquisition geometry: N uniform samples per period.

    N must be odd so that the reproduced frequencies
    ``omega_m = omega0 + m * lam`` form a conjugate-symmetric set and the
    samples of a real stream are real.
    """

    n_samples: int
    period: float = 1.0

    def __post_init__(self) -> None:
        if self.n_samples < 1 or self.n_samples % 2 == 0:
            raise ValueError(f"n_samples must be a positive odd integer, got {self.n_samples}")
        if not self.period > 0:
            raise ValueError(f"period must be > 0, got {self.period}")

    @property
    def T(self) -> float:
        """Sampling interval tau / N."""
        return self.period / self.n_samples

    @property
    def P(self) -> int:
        """Reproduction order; P + 1 = N frequencies are reproduced."""
        return self.n_samples - 1

    @property
    def omega0(self) -> float:
        return -self.P * np.pi / (self.P + 1)

    @property
    def lam(self) -> float:
        """Frequency spacing 2*pi / (P + 1)."""
        return 2.0 * np.pi / (self.P + 1)

    @property
    def omegas(self) -> np.ndarray:
        """The P + 1 reproduced frequencies omega_m, m = 0..P."""
        return self.omega0 + self.lam * np.arange(self.P + 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SamplingConfig):
            return NotImplemented
        return self.n_samples == other.n_samples and self.period == other.period

    def __hash__(self) -> int:
        return hash((self.n_samples, self.period))


@dataclass(frozen=True, eq=False)
class DiracStream:
    """Ground-truth periodic stream: K amplitudes and locations plus period.

    Locations live on the circle [-tau/2, tau/2) and must be strictly
    increasing; amplitudes are positive reals.
    """

    locations: np.ndarray
    amplitudes: np.ndarray
    period: float = 1.0

    def __post_init__(self) -> None:
        locs = np.atleast_1d(np.asarray(self.locations, dtype=float))
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        if locs.ndim != 1 or amps.ndim != 1:
            raise ValueError("locations and amplitudes must be one-dimensional")
        if locs.size < 1:
            raise ValueError("a Dirac stream needs at least one Dirac")
        if locs.size != amps.size:
            raise ValueError(f"{locs.size} locations but {amps.size} amplitudes")
        if not self.period > 0:
            raise ValueError(f"period must be > 0, got {self.period}")
        half = self.period / 2.0
        if np.any(locs < -half) or np.any(locs >= half):
            raise ValueError(f"locations must lie in [-{half}, {half})")
        if np.any(np.diff(locs) <= 0):
            raise ValueError("locations must be strictly increasing")
        if np.any(amps <= 0):
            raise ValueError("amplitudes must be positive")
        locs.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def k(self) -> int:
        """Number of Diracs per period."""
        return self.locations.size


@dataclass(frozen=True, eq=False)
class SampleVector:
    """N real samples y[n] tied to the configuration that produced them."""

    values: np.ndarray
    config: SamplingConfig

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.config.n_samples,):
            raise ValueError(
                f"expected {self.config.n_samples} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("samples must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise pinned to a peak signal-to-noise ratio.

    The noise standard deviation is relative to the peak sample of the
    vector it is applied to:  sigma = max_n |y[n]| * 10**(-psnr_db / 20),
    i.e.  PSNR = 10*log10(max|y|^2 / sigma^2).  Draws come from numpy's
    Philox counter-based generator keyed by ``seed`` (standard_normal),
    so identical (samples, seed) give bit-identical output on any host.
    """

    psnr_db: float
    seed: int = 0

    def sigma_for(self, samples: SampleVector) -> float:
        peak = float(np.max(np.abs(samples.values)))
        sigma = peak * 10.0 ** (-self.psnr_db / 20.0)
        if not sigma > 0:
            raise ValueError("noise sigma is not positive (all-zero samples?)")
        return sigma


def _check_period(stream: DiracStream, config: SamplingConfig) -> None:
    if stream.period != config.period:
        raise ValueError(
            f"stream period {stream.period} does not match config period {config.period}"
        )


def exponential_sums(stream: DiracStream, config: SamplingConfig) -> np.ndarray:
    """Evaluate s[m] = sum_k a_k * exp(j*omega_m*t_k/T) for m = 0..P.

    This is the spectral form of the stream: with b_k = a_k*exp(j*omega0*t_k/T)
    and u_k = exp(j*lam*t_k/T) it reads sum_k b_k * u_k**m.
    """
    _check_period(stream, config)
    phase = np.outer(config.omegas, stream.locations / config.T)
    return np.exp(1j * phase) @ stream.amplitudes


def synthesize_samples(stream: DiracStream, config: SamplingConfig) -> SampleVector:
    """Noiseless samples of a Dirac stream under the max-order acquisition.

    Returns y[n] = (1/N) * sum_m s[m] * exp(-j*omega_m*n).  The inverse
    orthogonality of the frequency set makes this exact: mapping y back
    through the reproduction coefficients recovers s[m] to round-off.
    """
    _check_period(stream, config)
    n = config.n_samples
    s = exponential_sums(stream, config)
    y = np.exp(-1j * np.outer(np.arange(n), config.omegas)) @ s / n
    residue = float(np.max(np.abs(y.imag)))
    if residue >= IMAG_TOL * max(1.0, float(np.max(np.abs(y.real)))):
        raise ArithmeticError(f"imaginary residue {residue:.3e} exceeds tolerance")
    return SampleVector(y.real, config)


def dirichlet_kernel(x: np.ndarray, n: int) -> np.ndarray:
    """Periodic sinc D(x) = sin(pi*x) / sin(pi*x/n) for odd n.

    The removable singularities at x = 0 mod n evaluate to n by limit
    (n odd keeps the sign positive on every period).  The argument is
    reduced to r = x - n*round(x/n) first; for odd n the period signs
    cancel and both sines see small arguments, which keeps the ratio
    accurate arbitrarily close to the poles.
    """
    x = np.asarray(x, dtype=float)
    r = x - n * np.round(x / n)
    num = np.sin(np.pi * r)
    den = np.sin(np.pi * r / n)
    at_pole = r == 0.0
    out = np.full_like(x, float(n))
    np.divide(num, den, out=out, where=~at_pole)
    return out


def dirichlet_samples(stream: DiracStream, config: SamplingConfig) -> SampleVector:
    """Time-domain closed form of the same acquisition.

    y[n] = (1/N) * sum_k a_k * D(t_k/T - n) with D the periodic sinc.
    Mathematically identical to :func:`synthesize_samples`; kept as an
    independent route for cross-validation.
    """
    _check_period(stream, config)
    n = config.n_samples
    grid = stream.locations[None, :] / config.T - np.arange(n)[:, None]
    y = dirichlet_kernel(grid, n) @ stream.amplitudes / n
    return SampleVector(y, config)


def add_noise(samples: SampleVector, noise: NoiseSpec) -> SampleVector:
    """Add white Gaussian noise at the PSNR and seed fixed by ``noise``."""
    sigma = noise.sigma_for(samples)
    rng = np.random.Generator(np.random.Philox(key=noise.seed))
    eps = rng.standard_normal(samples.config.n_samples)
    return SampleVector(samples.values + sigma * eps, samples.config)


def circular_difference(a, b, period: float):
    """Signed difference a - b wrapped to the circle, in (-period/2, period/2]."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    wrapped = period / 2.0 - np.remainder(period / 2.0 - diff, period)
    return wrapped


def wrap_location(t, period: float):
    """Wrap a time onto the principal location range [-period/2, period/2)."""
    return np.remainder(np.asarray(t, dtype=float) + period / 2.0, period) - period / 2.0


def random_stream(
    rng: np.random.Generator,
    k: int,
    period: float = 1.0,
    min_separation: float = 0.0,
    amplitude_range: tuple[float, float] = (0.5, 10.0),
    locations: Optional[np.ndarray] = None,
) -> DiracStream:
    """Draw a random stream with optional circular minimum separation.

    Locations are uniform on [-period/2, period/2); min_separation is
    enforced on the circle (including the wrap-around gap).
    """
    lo, hi = amplitude_range
    amps = rng.uniform(lo, hi, size=k)
    if locations is None:
        while True:
            locs = np.sort(rng.uniform(-period / 2.0, period / 2.0, size=k))
            if k == 1:
                break
            gaps = np.diff(np.append(locs, locs[0] + period))
            if np.all(gaps > min_separation):
                break
    else:
        locs = np.sort(np.asarray(locations, dtype=float))
    return DiracStream(locs, amps, period)
