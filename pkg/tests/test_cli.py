import json

import numpy as np
import pytest

from centro_spectra.cli import (
    config_from_json_dict,
    config_to_json_dict,
    emit_plot_data,
    parse_and_dispatch,
)
from centro_spectra.harness import RunConfig, TestPolynomial, run_clt_experiment
from centro_spectra.sampling import matrix_from_json


def _run(argv, capsys):
    code = parse_and_dispatch(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sample_round_trip(tmp_path, capsys):
    path = tmp_path / "m.json"
    code, _, _ = _run(["sample", "--n", "4", "--seed", "3", "--out", str(path)], capsys)
    assert code == 0
    cm = matrix_from_json(path.read_text())
    assert cm.n == 4 and cm.seed == 3
    assert np.array_equal(cm.matrix, np.flip(cm.matrix, (0, 1)))


def test_reduce_n3_example(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _, _ = _run(["reduce", "--n", "3", "--seed", "7", "--out", str(path)], capsys)
    assert code == 0
    obj = json.loads(path.read_text())
    assert len(obj["t1"]) == 2 and len(obj["t1"][0]) == 2
    assert len(obj["t2"]) == 1 and len(obj["t2"][0]) == 1
    assert obj["residual"] <= 1e-12
    assert obj["parity"] == "odd"


def test_spectrum_methods_agree(tmp_path, capsys):
    out_blocks = tmp_path / "b.json"
    out_dense = tmp_path / "d.json"
    assert _run(["spectrum", "--n", "8", "--seed", "2", "--out", str(out_blocks)], capsys)[0] == 0
    assert _run(
        ["spectrum", "--n", "8", "--seed", "2", "--method", "dense", "--out", str(out_dense)],
        capsys,
    )[0] == 0
    blocks = json.loads(out_blocks.read_text())
    dense = json.loads(out_dense.read_text())
    assert blocks["source_dim"] == dense["source_dim"] == 8
    a = sorted(map(tuple, blocks["eigenvalues"]))
    b = sorted(map(tuple, dense["eigenvalues"]))
    assert np.allclose(a, b, atol=1e-8)


def test_moments_exact_output(tmp_path, capsys):
    path = tmp_path / "mom.json"
    code, out, _ = _run(
        ["moments", "--n", "4", "--k", "1", "--l", "1", "--out", str(path)], capsys
    )
    assert code == 0
    assert "exact 2/1" in out
    obj = json.loads(path.read_text())
    assert obj["exact"] == [2, 1]
    assert obj["prediction"] == 2.0
    assert obj["mc"] is None


def test_clt_summary_and_jsonl(tmp_path, capsys):
    out = tmp_path / "run.json"
    code, _, _ = _run(
        ["clt", "--n", "32", "--trials", "20", "--poly", "0,0,2,1", "--seed", "1",
         "--threads", "2", "--out", str(out)],
        capsys,
    )
    assert code == 0
    summary = json.loads(out.read_text())
    assert summary["summaries"]["predicted_sigma2"] == 32.0
    assert summary["guard_rejections"] == 0
    lines = (tmp_path / "run.jsonl").read_text().splitlines()
    assert len(lines) == 20  # one record per trial
    record = json.loads(lines[0])
    assert set(record) == {"trial_index", "seed", "les", "spectral_radius", "resolvent"}


def test_clt_csv_format(tmp_path, capsys):
    path = tmp_path / "hist.csv"
    code, _, _ = _run(
        ["clt", "--n", "24", "--trials", "16", "--poly", "1", "--seed", "2",
         "--format", "csv", "--bins", "8", "--out", str(path)],
        capsys,
    )
    assert code == 0
    text = path.read_text()
    assert "overlay_sigma2=2.0" in text
    assert text.splitlines()[2] == "series,bin_left,bin_right,count"


def test_clt_requires_poly(capsys):
    code, _, err = _run(["clt", "--n", "16", "--trials", "4", "--seed", "0"], capsys)
    assert code == 1
    assert "poly" in err


def test_unknown_flag_is_validation_failure(capsys):
    code, _, _ = _run(["clt", "--n", "16", "--frobnicate"], capsys)
    assert code == 1


def test_unwritable_output_is_runtime_error(capsys):
    code, _, _ = _run(
        ["sample", "--n", "2", "--seed", "0", "--out", "/nonexistent-dir/x.json"], capsys
    )
    assert code == 2


def test_circular_law_scatter_csv(tmp_path, capsys):
    path = tmp_path / "scatter.csv"
    code, _, _ = _run(
        ["circular-law", "--n", "200", "--seed", "2", "--format", "csv", "--out", str(path)],
        capsys,
    )
    assert code == 0
    rows = path.read_text().splitlines()
    assert rows[0] == "re,im"
    assert len(rows) == 1 + 200


def test_histogram_csv_overlay(tmp_path):
    config = RunConfig(n=32, trials=30, master_seed=1, poly=TestPolynomial(coeffs=(1.0,)))
    batch = run_clt_experiment(config)
    path = tmp_path / "hist.csv"
    emit_plot_data(batch, "histogram", str(path), bins=12)
    text = path.read_text()
    assert "overlay_sigma2=2.0" in text
    lines = [l for l in text.splitlines() if l.startswith("les_centered,")]
    assert len(lines) == 12
    # bin edges cover [min, max] of the samples
    values = (batch.les_values - batch.les_values.mean()).real
    first = lines[0].split(",")
    last = lines[-1].split(",")
    assert float(first[1]) == pytest.approx(values.min())
    assert float(last[2]) == pytest.approx(values.max())


def test_emit_plot_data_rejects_wrong_inputs(tmp_path):
    config = RunConfig(n=16, trials=4, master_seed=0, poly=TestPolynomial(coeffs=(1.0,)))
    batch = run_clt_experiment(config)
    with pytest.raises(ValueError):
        emit_plot_data(batch, "scatter", str(tmp_path / "x.csv"))
    with pytest.raises(ValueError):
        emit_plot_data(batch, "surface", str(tmp_path / "x.csv"))


def test_resolvent_cov_output(tmp_path, capsys):
    path = tmp_path / "cov.json"
    code, _, _ = _run(
        ["resolvent-cov", "--n", "32", "--trials", "40", "--seed", "3",
         "--contour", "2,0;-2,0", "--out", str(path)],
        capsys,
    )
    assert code == 0
    obj = json.loads(path.read_text())
    assert len(obj["pairs"]) == 4
    predicted = {tuple(p["z"]) + tuple(p["eta"]): p["predicted"] for p in obj["pairs"]}
    assert predicted[(2.0, 0.0, 2.0, 0.0)][0] == pytest.approx(2.0 / 9.0)
    assert predicted[(2.0, 0.0, -2.0, 0.0)][0] == pytest.approx(0.08)
    assert (tmp_path / "cov.jsonl").exists()


def test_config_json_round_trip_reproduces_results():
    config = RunConfig(
        n=24, trials=12, master_seed=5, poly=TestPolynomial(coeffs=(0.5, 1.0)),
        contour_points=(2.5 + 0j,), rho=2.2, tau=0.5, threads=2,
    )
    loaded = config_from_json_dict(json.loads(json.dumps(config_to_json_dict(config))))
    a = run_clt_experiment(config).les_values
    b = run_clt_experiment(loaded).les_values
    assert np.array_equal(a, b)


def test_self_test_quick(capsys):
    code, out, _ = _run(["self-test", "--draws", "20000", "--seed", "0"], capsys)
    assert code == 0
    assert "self-test passed" in out
