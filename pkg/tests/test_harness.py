"""Sweep/scatter orchestration, dataset export, estimate-file ingest."""

import json

import numpy as np
import pytest

from fristream import (
    DatasetSpec,
    DiracStream,
    SamplingConfig,
    SchemaError,
    SweepConfig,
    export_dataset,
    generate_dataset,
    ingest_estimates,
    location_std,
    run_scatter,
    run_sweep,
    score_records,
)
from fristream.harness import (
    ESTIMATE_HEADER,
    estimate_samples_matrix,
    read_samples_csv,
    write_estimates_csv,
)

CFG = SamplingConfig(21, 1.0)

SMALL = SweepConfig(
    delta_grid=(0.1, 0.01),
    psnr_grid_db=(30.0, 50.0),
    realizations=5,
    methods=("prony", "matrix_pencil"),
    base_seed=77,
)


def test_default_config_reproduces_benchmark_setting():
    cfg = SweepConfig()
    assert cfg.n_samples == 21 and cfg.tau == 1.0 and cfg.k == 2
    assert cfg.amplitudes == (2.0, 2.0) and cfg.t0 == 0.0
    assert len(cfg.delta_grid) == 11
    assert cfg.delta_grid[0] == pytest.approx(10**-0.5)
    assert cfg.delta_grid[-1] == pytest.approx(10**-3)
    assert cfg.delta_grid[1] / cfg.delta_grid[0] == pytest.approx(10**-0.25)
    assert list(cfg.psnr_grid_db) == list(range(-5, 71, 5))
    assert cfg.realizations == 1000


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(delta_grid=())
    with pytest.raises(ValueError):
        SweepConfig(realizations=0)
    with pytest.raises(ValueError):
        SweepConfig(k=2, amplitudes=(1.0,))
    with pytest.raises(ValueError):
        SweepConfig(methods=("nn_direct",))
    with pytest.raises(ValueError):
        SweepConfig(delta_grid=(0.6,))  # second Dirac leaves the period


def test_sweep_deterministic_bytes(tmp_path):
    a = run_sweep(SMALL).to_csv(tmp_path / "a.csv")
    b = run_sweep(SMALL).to_csv(tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()
    sidecar = json.loads((tmp_path / "a.json").read_text())
    assert sidecar["config_hash"] == SMALL.config_hash()
    assert sidecar["config"]["realizations"] == 5


def test_sweep_parallel_matches_serial():
    serial = run_sweep(SMALL, workers=1)
    parallel = run_sweep(SMALL, workers=3)
    assert serial.rows == parallel.rows


def test_sweep_rows_carry_config_hash_and_shape():
    report = run_sweep(SMALL)
    expected_rows = len(SMALL.psnr_grid_db) * len(SMALL.delta_grid) * len(SMALL.methods) * SMALL.k
    assert len(report.rows) == expected_rows
    chash = SMALL.config_hash()
    for row in report.rows:
        assert row.config_hash == chash
        assert row.i_effective + row.failure_count == SMALL.realizations
        assert row.f_sd >= 0 or np.isnan(row.f_sd)


def test_sweep_near_noiseless_cell():
    cfg = SweepConfig(
        delta_grid=(0.1,), psnr_grid_db=(200.0,), realizations=10,
        methods=("matrix_pencil",), base_seed=1,
    )
    report = run_sweep(cfg)
    for row in report.rows:
        assert row.f_sd < 1e-7
        assert row.failure_count == 0


def test_scatter_contract(tmp_path):
    cfg = SweepConfig(
        delta_grid=(0.01,), psnr_grid_db=(40.0, 60.0), realizations=100,
        methods=("matrix_pencil",), base_seed=3,
    )
    report = run_scatter(cfg)
    # 100 rows per (psnr, method, k)
    for psnr in cfg.psnr_grid_db:
        for k in range(cfg.k):
            rows = [r for r in report.rows if r.psnr_db == psnr and r.k == k]
            assert len(rows) == 100
    path = report.to_csv(tmp_path / "scatter.csv")
    header = path.read_text().splitlines()[0]
    assert header == "psnr_db,realization,method,k,t_hat"


def test_scatter_requires_single_delta():
    with pytest.raises(ValueError):
        run_scatter(SMALL)


def test_scatter_noiseless_collapse_and_high_psnr_mean():
    cfg = SweepConfig(
        delta_grid=(0.1,), psnr_grid_db=(200.0, 70.0), realizations=100,
        methods=("matrix_pencil",), base_seed=0,
    )
    report = run_scatter(cfg)
    exact = [r for r in report.rows if r.psnr_db == 200.0]
    truth = {0: 0.0, 1: 0.1}
    assert all(abs(r.t_hat - truth[r.k]) < 1e-9 for r in exact)
    t1 = [r.t_hat for r in report.rows if r.psnr_db == 70.0 and r.k == 1]
    assert abs(np.mean(t1) - 0.1) < 1e-4


def test_scatter_parallel_matches_serial():
    cfg = SweepConfig(
        delta_grid=(0.05,), psnr_grid_db=(30.0, 50.0), realizations=20,
        methods=("prony", "matrix_pencil"), base_seed=5,
    )
    assert run_scatter(cfg, workers=2).rows == run_scatter(cfg, workers=1).rows


# --- dataset -----------------------------------------------------------------


def test_dataset_export_deterministic(tmp_path):
    spec = DatasetSpec(size=3, psnr_db=25.0, seed=9)
    a = export_dataset(spec, tmp_path / "a.csv")
    b = export_dataset(spec, tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert len(lines) == 4  # header + 3 rows
    assert lines[0].startswith("psnr_db,sigma,y0,") and lines[0].endswith("t0,t1,a0,a1")
    assert lines[0].count("ynoisy") == 21


def test_dataset_psnr_column_and_sigma_relation(tmp_path):
    spec = DatasetSpec(size=50, psnr_db=32.0, seed=4)
    path = export_dataset(spec, tmp_path / "d.csv")
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.all(rows[:, 0] == 32.0)
    clean = rows[:, 2 : 2 + 21]
    sigma = rows[:, 1]
    np.testing.assert_allclose(sigma, np.max(np.abs(clean), axis=1) * 10 ** (-32.0 / 20.0), rtol=1e-15)
    # locations sorted ascending, amplitudes in range
    t = rows[:, 2 + 42 : 2 + 44]
    a = rows[:, 2 + 44 :]
    assert np.all(np.diff(t, axis=1) > 0)
    assert np.all((a >= 0.5) & (a <= 10.0))


def test_dataset_statistics_match_training_laws():
    data = generate_dataset(DatasetSpec(size=100_000, psnr_db=30.0, seed=11))
    assert abs(np.mean(data["locations"])) < 0.005
    assert abs(np.mean(data["amplitudes"]) - 5.25) < 0.05
    # noise actually drawn at the recorded sigma
    z = (data["noisy"] - data["clean"]) / data["sigma"][:, None]
    assert abs(np.std(z) - 1.0) < 0.01


# --- estimate files and ingest -------------------------------------------------


def make_estimate_file(tmp_path, name="est.csv"):
    cfg = SweepConfig(
        delta_grid=(0.1,), psnr_grid_db=(50.0,), realizations=4,
        methods=("matrix_pencil",), base_seed=21,
    )
    scatter = run_scatter(cfg)
    rows = [
        (r.method, r.psnr_db, 0.1, r.realization, r.k, r.t_hat, 2.0)
        for r in scatter.rows
    ]
    return write_estimates_csv(rows, tmp_path / name), cfg


def test_ingest_roundtrip(tmp_path):
    path, _ = make_estimate_file(tmp_path)
    records = ingest_estimates(path, CFG)
    assert len(records) == 4
    for rec in records:
        assert rec.k == 2
        assert rec.diagnostics["psnr_db"] == 50.0
        assert rec.diagnostics["delta_t"] == 0.1
        assert np.all(np.diff(rec.locations_hat) >= 0)


def test_ingest_two_row_file(tmp_path):
    path = write_estimates_csv(
        [("nn_direct", 30.0, 0.01, 0, 0, 0.001, float("nan")),
         ("nn_direct", 30.0, 0.01, 1, 0, -0.002, float("nan"))],
        tmp_path / "two.csv",
    )
    records = ingest_estimates(path, CFG)
    assert len(records) == 2
    assert all(rec.method.value == "nn_direct" for rec in records)


def test_ingest_malformed_row_names_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        ",".join(ESTIMATE_HEADER) + "\n"
        + "matrix_pencil,50,0.1,0,0,not_a_number,2\n"
    )
    with pytest.raises(SchemaError, match="line 2"):
        ingest_estimates(path, CFG)


def test_ingest_rejects_wrong_header(tmp_path):
    path = tmp_path / "hdr.csv"
    path.write_text("a,b,c\n")
    with pytest.raises(SchemaError, match="line 1"):
        ingest_estimates(path, CFG)


def test_ingest_rejects_unknown_method_and_duplicate_k(tmp_path):
    head = ",".join(ESTIMATE_HEADER) + "\n"
    bad_method = tmp_path / "m.csv"
    bad_method.write_text(head + "esprit,50,0.1,0,0,0.0,2\n")
    with pytest.raises(SchemaError, match="line 2"):
        ingest_estimates(bad_method, CFG)
    dup = tmp_path / "dup.csv"
    dup.write_text(
        head
        + "matrix_pencil,50,0.1,0,0,0.0,2\n"
        + "matrix_pencil,50,0.1,0,0,0.1,2\n"
    )
    with pytest.raises(SchemaError, match="line 3"):
        ingest_estimates(dup, CFG)
    gap = tmp_path / "gap.csv"
    gap.write_text(head + "matrix_pencil,50,0.1,0,1,0.0,2\n")
    with pytest.raises(SchemaError, match="k=0..K-1"):
        ingest_estimates(gap, CFG)


def test_score_records_matches_direct_fsd(tmp_path):
    path, cfg = make_estimate_file(tmp_path)
    records = ingest_estimates(path, CFG)
    report = score_records(records, CFG, t0=0.0, amplitudes=(2.0, 2.0))
    stream = DiracStream(np.array([0.0, 0.1]), np.array([2.0, 2.0]), 1.0)
    by_k = {row.k: row for row in report.rows}
    for k in (0, 1):
        assert by_k[k].f_sd == pytest.approx(location_std(records, stream, k))
        assert by_k[k].i_effective == 4
        assert np.isfinite(by_k[k].crb_std)


def test_read_samples_csv_and_estimate_matrix(tmp_path):
    spec = DatasetSpec(size=6, psnr_db=45.0, seed=2)
    path = export_dataset(spec, tmp_path / "d.csv")
    noisy, meta = read_samples_csv(path, column_prefix="ynoisy")
    assert noisy.shape == (6, 21)
    assert set(meta) == {"psnr_db"}
    rows = estimate_samples_matrix(noisy, meta, "matrix_pencil", 2, CFG)
    assert len(rows) == 12  # 6 rows x K=2
    assert all(r[0] == "matrix_pencil" and r[1] == 45.0 for r in rows)
    missing = tmp_path / "missing.csv"
    missing.write_text("u0,u1\n1,2\n")
    with pytest.raises(SchemaError):
        read_samples_csv(missing)
