"""Deterministic 64-bit seed derivation for Monte Carlo sweeps.

Noise realizations in a sweep are seeded per (grid row, grid column,
realization) so that every estimator at a grid cell sees the same noisy
samples and so that reports are reproducible bit-for-bit across runs,
worker counts and languages.  The derivation is a splitmix64 chain:

    h = base_seed
    for v in indices:
        h = splitmix64(h ^ v)

with splitmix64 as published by Steele, Lea and Flood (the exact
constants below), all arithmetic modulo 2**64.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One splitmix64 output step for a 64-bit state."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(base_seed: int, *indices: int) -> int:
    """Fold integer indices into ``base_seed``, returning a new 64-bit seed."""
    h = base_seed & _MASK64
    for v in indices:
        h = splitmix64(h ^ (int(v) & _MASK64))
    return h
