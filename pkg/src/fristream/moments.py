"""Linear map between time-domain samples and exponential moments.

The reproduction coefficients c[m, n] = exp(j*omega_m*n) turn the N real
samples into P + 1 complex moments s[m] = sum_n c[m, n] * y[n], which for
a Dirac stream equal sum_k b_k * u_k**m.  With P + 1 = N the coefficient
matrix is a scaled unitary, so the map is invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import SampleVector, SamplingConfig

#: Tolerance (relative to the peak moment) for the conjugate-symmetry check
#: performed before inverting moments back to real samples.
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """The (P+1) x N reproduction coefficients for one configuration."""

    entries: np.ndarray
    config: SamplingConfig

    def __post_init__(self) -> None:
        expected = (self.config.P + 1, self.config.n_samples)
        if self.entries.shape != expected:
            raise ValueError(f"coefficient matrix must be {expected}, got {self.entries.shape}")


@dataclass(frozen=True, eq=False)
class MomentVector:
    """P + 1 complex moments s[m] tied to their configuration."""

    values: np.ndarray
    config: SamplingConfig

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.config.P + 1,):
            raise ValueError(
                f"expected {self.config.P + 1} moments, got shape {vals.shape}"
            )
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def symmetry_defect(self) -> float:
        """Max |s[P-m] - conj(s[m])|; zero for moments of real samples."""
        s = self.values
        return float(np.max(np.abs(s[::-1] - np.conj(s))))


def coefficients(config: SamplingConfig) -> CoefficientMatrix:
    """Build c[m, n] = exp(j*omega_m*n), m = 0..P, n = 0..N-1."""
    phases = np.outer(config.omegas, np.arange(config.n_samples))
    return CoefficientMatrix(np.exp(1j * phases), config)


def samples_to_moments(y: SampleVector) -> MomentVector:
    """Apply the coefficient map: s[m] = sum_n c[m, n] * y[n]."""
    c = coefficients(y.config)
    return MomentVector(c.entries @ y.values, y.config)


def moments_to_samples(s: MomentVector) -> SampleVector:
    """Invert the map: y[n] = (1/N) * sum_m s[m] * exp(-j*omega_m*n).

    The moments must be conjugate-symmetric (s[P-m] = conj(s[m])) within
    SYMMETRY_TOL relative to their peak, otherwise the implied samples
    would be complex.
    """
    config = s.config
    defect = s.symmetry_defect()
    scale = max(1.0, float(np.max(np.abs(s.values))))
    if defect > SYMMETRY_TOL * scale:
        raise ValueError(
            f"moments are not conjugate-symmetric (defect {defect:.3e}); "
            "cannot map to real samples"
        )
    c = coefficients(config)
    y = c.entries.conj().T @ s.values / config.n_samples
    return SampleVector(y.real, config)
