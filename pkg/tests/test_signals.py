"""Signal model: synthesis routes, noise injection, geometry helpers."""

import numpy as np
import pytest

from fristream import (
    DiracStream,
    NoiseSpec,
    SamplingConfig,
    SampleVector,
    add_noise,
    circular_difference,
    dirichlet_samples,
    random_stream,
    synthesize_samples,
    wrap_location,
)


def test_config_derived_quantities():
    cfg = SamplingConfig(21, 1.0)
    assert cfg.P == 20
    assert cfg.T == pytest.approx(1.0 / 21.0)
    assert cfg.lam * (cfg.P + 1) == pytest.approx(2 * np.pi)
    assert cfg.omega0 == pytest.approx(-cfg.lam * cfg.P / 2)
    assert cfg.omegas.shape == (21,)


@pytest.mark.parametrize("n", [0, -3, 4, 20])
def test_config_rejects_bad_n(n):
    with pytest.raises(ValueError):
        SamplingConfig(n, 1.0)


def test_stream_validation():
    with pytest.raises(ValueError):
        DiracStream(np.array([0.2, 0.1]), np.array([1.0, 1.0]), 1.0)
    with pytest.raises(ValueError):
        DiracStream(np.array([0.5]), np.array([1.0]), 1.0)  # half-open range
    with pytest.raises(ValueError):
        DiracStream(np.array([0.1]), np.array([-1.0]), 1.0)
    with pytest.raises(ValueError):
        DiracStream(np.array([]), np.array([]), 1.0)
    DiracStream(np.array([-0.5]), np.array([1.0]), 1.0)  # -tau/2 is included


def test_unit_impulse():
    cfg = SamplingConfig(21, 1.0)
    stream = DiracStream(np.array([0.0]), np.array([1.0]), 1.0)
    y = synthesize_samples(stream, cfg).values
    assert y[0] == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(y[1:])) < 1e-14


def test_amplitude_scaling_is_exact():
    cfg = SamplingConfig(21, 1.0)
    one = synthesize_samples(DiracStream(np.array([0.0]), np.array([1.0]), 1.0), cfg)
    two = synthesize_samples(DiracStream(np.array([0.0]), np.array([2.0]), 1.0), cfg)
    np.testing.assert_allclose(two.values, 2.0 * one.values, rtol=0, atol=1e-15)


def test_two_dirac_synthesis_matches_time_domain_oracle():
    cfg = SamplingConfig(21, 1.0)
    stream = DiracStream(np.array([0.0, 0.1]), np.array([2.0, 2.0]), 1.0)
    a = synthesize_samples(stream, cfg).values
    b = dirichlet_samples(stream, cfg).values
    assert np.max(np.abs(a - b)) < 1e-10


def test_dirichlet_half_sample_symmetry():
    cfg = SamplingConfig(21, 1.0)
    t0 = cfg.T * 9.5  # half-sample offset, kept inside [-tau/2, tau/2)
    stream = DiracStream(np.array([t0]), np.array([1.0]), 1.0)
    y = dirichlet_samples(stream, cfg).values
    assert y[9] == pytest.approx(y[10], rel=1e-12)


def test_dual_path_equivalence_randomized():
    # 1000 random streams over K in {1,2,3} and N in {11,21,31}
    rng = np.random.default_rng(20260810)
    cfgs = [SamplingConfig(n, 1.0) for n in (11, 21, 31)]
    worst = 0.0
    for trial in range(1000):
        cfg = cfgs[trial % 3]
        stream = random_stream(rng, int(rng.integers(1, 4)), 1.0, min_separation=1e-3)
        a = synthesize_samples(stream, cfg).values
        b = dirichlet_samples(stream, cfg).values
        worst = max(worst, float(np.max(np.abs(a - b))))
    assert worst < 1e-10


def test_realness_guarantee():
    rng = np.random.default_rng(7)
    cfg = SamplingConfig(21, 1.0)
    for _ in range(50):
        stream = random_stream(rng, 3, 1.0)
        y = synthesize_samples(stream, cfg)
        assert np.all(np.isfinite(y.values))  # imaginary residue checked internally


def test_superposition_linearity():
    cfg = SamplingConfig(21, 1.0)
    s1 = DiracStream(np.array([-0.2]), np.array([1.5]), 1.0)
    s2 = DiracStream(np.array([0.3]), np.array([0.7]), 1.0)
    both = DiracStream(np.array([-0.2, 0.3]), np.array([1.5, 0.7]), 1.0)
    y = synthesize_samples(both, cfg).values
    y12 = synthesize_samples(s1, cfg).values + synthesize_samples(s2, cfg).values
    np.testing.assert_allclose(y, y12, rtol=0, atol=1e-12)


def test_shift_by_one_sample_rolls_output():
    rng = np.random.default_rng(5)
    cfg = SamplingConfig(21, 1.0)
    stream = random_stream(rng, 3, 1.0, min_separation=0.01)
    y0 = synthesize_samples(stream, cfg).values
    shifted = wrap_location(stream.locations + cfg.T, 1.0)
    order = np.argsort(shifted)
    rolled = synthesize_samples(
        DiracStream(shifted[order], stream.amplitudes[order], 1.0), cfg
    ).values
    assert np.max(np.abs(rolled - np.roll(y0, 1))) < 1e-10


def test_period_mismatch_rejected():
    cfg = SamplingConfig(21, 1.0)
    stream = DiracStream(np.array([0.0]), np.array([1.0]), 2.0)
    with pytest.raises(ValueError):
        synthesize_samples(stream, cfg)


def test_noise_sigma_from_psnr():
    cfg = SamplingConfig(21, 1.0)
    y = SampleVector(np.eye(21)[0], cfg)  # peak 1
    assert NoiseSpec(20.0).sigma_for(y) == pytest.approx(0.1)


def test_zero_noise_limit():
    cfg = SamplingConfig(21, 1.0)
    stream = DiracStream(np.array([0.0, 0.1]), np.array([2.0, 2.0]), 1.0)
    clean = synthesize_samples(stream, cfg)
    nearly = add_noise(clean, NoiseSpec(400.0, 3))
    np.testing.assert_allclose(nearly.values, clean.values, rtol=0, atol=1e-12)


def test_noise_determinism_and_generator_contract():
    cfg = SamplingConfig(21, 1.0)
    stream = DiracStream(np.array([0.0, 0.1]), np.array([2.0, 2.0]), 1.0)
    clean = synthesize_samples(stream, cfg)
    a = add_noise(clean, NoiseSpec(20.0, 42))
    b = add_noise(clean, NoiseSpec(20.0, 42))
    assert np.array_equal(a.values, b.values)
    # documented algorithm: Philox keyed by the seed, standard_normal draws
    sigma = NoiseSpec(20.0, 42).sigma_for(clean)
    eps = np.random.Generator(np.random.Philox(key=42)).standard_normal(21)
    np.testing.assert_array_equal(a.values, clean.values + sigma * eps)


def test_noise_std_law_of_large_numbers():
    # std over 1e5 draws from the seeded generator within 1% of sigma
    draws = np.random.Generator(np.random.Philox(key=42)).standard_normal(100_000)
    assert abs(np.std(draws) - 1.0) < 0.01


def test_noise_rejects_all_zero_samples():
    cfg = SamplingConfig(21, 1.0)
    y = SampleVector(np.zeros(21), cfg)
    with pytest.raises(ValueError):
        add_noise(y, NoiseSpec(20.0, 0))


def test_circular_difference_range():
    d = circular_difference(np.array([0.49, -0.49, 0.0]), np.array([-0.49, 0.49, 0.5]), 1.0)
    np.testing.assert_allclose(d, [-0.02, 0.02, 0.5], atol=1e-12)


def test_random_stream_respects_min_separation():
    rng = np.random.default_rng(1)
    for _ in range(200):
        st = random_stream(rng, 3, 1.0, min_separation=0.05)
        gaps = np.diff(np.append(st.locations, st.locations[0] + 1.0))
        assert np.all(gaps > 0.05)
