"""Sample/moment map: coefficients, forward and inverse transforms."""

import cmath

import numpy as np
import pytest

from fristream import (
    DiracStream,
    MomentVector,
    SamplingConfig,
    SampleVector,
    coefficients,
    moments_to_samples,
    random_stream,
    samples_to_moments,
    synthesize_samples,
)


@pytest.fixture
def cfg():
    return SamplingConfig(21, 1.0)


def direct_moments(stream, cfg):
    """Independent oracle: evaluate sum_k b_k * u_k**m with scalar arithmetic."""
    out = []
    for m in range(cfg.P + 1):
        acc = 0j
        for t, a in zip(stream.locations, stream.amplitudes):
            b = a * cmath.exp(1j * cfg.omega0 * t / cfg.T)
            u = cmath.exp(1j * cfg.lam * t / cfg.T)
            acc += b * u**m
        out.append(acc)
    return np.array(out)


def test_coefficient_matrix_structure(cfg):
    c = coefficients(cfg).entries
    np.testing.assert_allclose(c[:, 0], np.ones(21), atol=1e-15)
    gram = c @ c.conj().T
    assert gram[5, 5] == pytest.approx(21.0)
    assert abs(gram[3, 7]) < 1e-12
    np.testing.assert_allclose(gram, 21.0 * np.eye(21), atol=1e-11)


def test_impulse_moments_all_one(cfg):
    y = SampleVector(np.eye(21)[0], cfg)
    s = samples_to_moments(y).values
    np.testing.assert_allclose(s, np.ones(21), atol=1e-14)


def test_quarter_period_ratio(cfg):
    stream = DiracStream(np.array([0.25]), np.array([1.0]), 1.0)
    s = samples_to_moments(synthesize_samples(stream, cfg)).values
    ratios = s[1:] / s[:-1]
    np.testing.assert_allclose(ratios, 1j * np.ones(20), atol=1e-12)


def test_moments_match_direct_oracle(cfg):
    rng = np.random.default_rng(99)
    for _ in range(20):
        stream = random_stream(rng, 2, 1.0, min_separation=1e-3)
        s = samples_to_moments(synthesize_samples(stream, cfg)).values
        expected = direct_moments(stream, cfg)
        assert np.max(np.abs(s - expected)) < 1e-10


def test_conjugate_symmetry_for_real_samples(cfg):
    rng = np.random.default_rng(4)
    stream = random_stream(rng, 3, 1.0)
    s = samples_to_moments(synthesize_samples(stream, cfg))
    assert s.symmetry_defect() < 1e-12


def test_constant_moments_invert_to_impulse(cfg):
    y = moments_to_samples(MomentVector(np.ones(21, dtype=complex), cfg)).values
    np.testing.assert_allclose(y, np.eye(21)[0], atol=1e-14)


def test_roundtrip_identity(cfg):
    rng = np.random.default_rng(123)
    for _ in range(50):
        y = SampleVector(rng.standard_normal(21), cfg)
        back = moments_to_samples(samples_to_moments(y)).values
        assert np.max(np.abs(back - y.values)) < 1e-12


def test_symmetric_moment_roundtrip(cfg):
    rng = np.random.default_rng(321)
    half = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    s = np.concatenate([half, rng.standard_normal(1).astype(complex), np.conj(half[::-1])])
    back = samples_to_moments(moments_to_samples(MomentVector(s, cfg))).values
    assert np.max(np.abs(back - s)) < 1e-12


def test_composition_matches_synthesis(cfg):
    stream = DiracStream(np.array([-0.31, 0.17]), np.array([1.0, 3.0]), 1.0)
    s = MomentVector(direct_moments(stream, cfg), cfg)
    y = moments_to_samples(s).values
    assert np.max(np.abs(y - synthesize_samples(stream, cfg).values)) < 1e-12


def test_asymmetric_moments_rejected(cfg):
    s = np.ones(21, dtype=complex)
    s[3] += 1e-3j
    with pytest.raises(ValueError):
        moments_to_samples(MomentVector(s, cfg))


def test_moment_noise_variance(cfg):
    # perturbation s~ - s = C @ eps has variance N*sigma^2 per moment
    rng = np.random.default_rng(3)
    c = coefficients(cfg).entries
    eps = rng.standard_normal((100_000, 21))
    pert = eps @ c.T
    var = np.var(pert.real, axis=0) + np.var(pert.imag, axis=0)
    np.testing.assert_allclose(var, 21.0, rtol=0.05)


def test_noiseless_toeplitz_window_has_rank_k(cfg):
    rng = np.random.default_rng(8)
    for _ in range(10):
        stream = random_stream(rng, 2, 1.0, min_separation=1e-2)
        s = samples_to_moments(synthesize_samples(stream, cfg)).values
        k = stream.k
        rows, cols = 21 - k, k + 1
        toe = s[k + np.arange(rows)[:, None] - np.arange(cols)[None, :]]
        sv = np.linalg.svd(toe, compute_uv=False)
        assert sv[k] < 1e-9 * sv[0]


def test_length_mismatch_rejected(cfg):
    with pytest.raises(ValueError):
        MomentVector(np.ones(20, dtype=complex), cfg)
    with pytest.raises(ValueError):
        SampleVector(np.zeros(22), cfg)
