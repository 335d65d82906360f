import json

import numpy as np
import pytest

from uamo_lab.cli import run
from uamo_lab.export import read_table


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_critical(tmp_path, capsys):
    code, out, _ = call(capsys, "critical", "0.25", "0.5", "--out", str(tmp_path))
    assert code == 0
    d = json.loads(out)
    assert d["eta_pt"] == pytest.approx(0.1188, abs=1e-4) and d["eta0"] == pytest.approx(0.3284, abs=1e-4)
    doc = json.loads((tmp_path / "critical.json").read_text())
    assert doc["format_version"] == 1 and doc["config"]["lambda1"] == 0.25


def test_critical_self_dual(tmp_path, capsys):
    code, out, _ = call(capsys, "critical", "0.5", "0.5", "--out", str(tmp_path))
    d = json.loads(out)
    assert d["lambda0"] == pytest.approx(1) and d["eta_pt"] == 0 and d["eta0"] == pytest.approx(0.2096, abs=1e-4)


def test_evolve_sigma_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert call(capsys, "evolve", "--out", str(a))[0] == 0
    assert call(capsys, "evolve", "--out", str(b))[0] == 0
    for f in ("distribution.csv", "observables.csv"):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    cfg, header, rows = read_table(a / "observables.csv")
    assert header[:4] == ["t", "sigma", "x2", "overallP"]
    assert np.all(np.diff(rows[:, 1]) > 0)
    assert cfg["lambda1"] == 0.67
    assert b"\r" not in (a / "observables.csv").read_bytes()


def test_evolve_localized_contrast(tmp_path, capsys):
    call(capsys, "evolve", "--out", str(tmp_path / "m"))
    call(capsys, "evolve", "--set", "lambda1=0.2", "--set", "lambda2=0.67", "--out", str(tmp_path / "l"))
    s_m = read_table(tmp_path / "m" / "observables.csv")[2][6, 1]
    s_l = read_table(tmp_path / "l" / "observables.csv")[2][6, 1]
    assert s_l < s_m / 3


def test_evolve_zero_steps(tmp_path, capsys):
    call(capsys, "evolve", "--set", "steps=0", "--out", str(tmp_path))
    _, _, rows = read_table(tmp_path / "observables.csv")
    assert rows.shape[0] == 1 and rows[0, 1] == 0
    _, _, dist = read_table(tmp_path / "distribution.csv")
    assert dist[:, 2].max() == 1


def test_evolve_poisson_seeded(tmp_path, capsys):
    for d in ("x", "y"):
        call(capsys, "evolve", "--set", "poisson_counts=20000", "--seed", "5", "--out", str(tmp_path / d))
    assert (tmp_path / "x" / "observables.csv").read_bytes() == (tmp_path / "y" / "observables.csv").read_bytes()
    _, header, rows = read_table(tmp_path / "x" / "observables.csv")
    assert header[-1] == "similarity" and rows[:, -1].min() > 0.9


def test_lossy_evolve_matches_ideal_overall(tmp_path, capsys):
    base = ["--set", "lambda1=0.5", "--set", "lambda2=0.25", "--set", "eta=0.05"]
    call(capsys, "evolve", *base, "--out", str(tmp_path / "i"))
    call(capsys, "evolve", *base, "--set", "lossy=true", "--out", str(tmp_path / "r"))
    a = read_table(tmp_path / "i" / "observables.csv")[2][:, 3]
    b = read_table(tmp_path / "r" / "observables.csv")[2][:, 3]
    assert np.allclose(a, b, rtol=1e-10)


def test_invalid_config_exit2(tmp_path, capsys):
    code, _, err = call(capsys, "evolve", "--set", "lambda1=1.5", "--out", str(tmp_path))
    assert code == 2
    e = json.loads(err)
    assert set(e) == {"code", "message", "context"} and e["code"] == 2
    code, _, err = call(capsys, "spectrum", "--set", "bogus=1", "--out", str(tmp_path))
    assert code == 2
    code, _, _ = call(capsys, "evolve", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path))
    assert code == 2
    code, _, _ = call(capsys, "spectrum", "--set", "n=90", "--out", str(tmp_path))
    assert code == 2


def test_spectrum_outputs(tmp_path, capsys):
    code, out, _ = call(capsys, "spectrum", "--set", "etas=[0.0, 0.4]", "--out", str(tmp_path))
    assert code == 0
    _, header, rows = read_table(tmp_path / "eigenvalues.csv")
    assert header == ["eta", "re_z", "im_z", "re_E", "im_E"] and rows.shape == (356, 5)
    z0 = rows[rows[:, 0] == 0.0]
    assert np.max(np.abs(np.hypot(z0[:, 1], z0[:, 2]) - 1)) < 1e-10
    doc = json.loads((tmp_path / "classification.json").read_text())
    assert [c["phase"] for c in doc["classification"]] == ["PTUnbroken", "FullyComplex"]


def test_config_roundtrip(tmp_path, capsys):
    call(capsys, "spectrum", "--set", "etas=[0.05]", "--set", "n=55", "--out", str(tmp_path / "a"))
    call(capsys, "spectrum", "--config", str(tmp_path / "a" / "classification.json"), "--out", str(tmp_path / "b"))
    assert (tmp_path / "a" / "eigenvalues.csv").read_bytes() == (tmp_path / "b" / "eigenvalues.csv").read_bytes()


def test_json_format(tmp_path, capsys):
    call(capsys, "spectrum", "--set", "etas=[0.1]", "--set", "n=34", "--format", "json", "--out", str(tmp_path))
    doc = json.loads((tmp_path / "eigenvalues.json").read_text())
    assert doc["columns"][0] == "eta" and len(doc["rows"]) == 68 and doc["format_version"] == 1


def test_winding_command(tmp_path, capsys):
    code, out, _ = call(capsys, "winding", "--set", "n=55", "--set", "etas=[0.0, 0.4]", "--set", "z_count=8",
                        "--set", "M=128", "--out", str(tmp_path))
    assert code == 0
    _, header, rows = read_table(tmp_path / "winding.csv")
    assert header == ["eta", "re_z", "im_z", "nu_raw", "nu_quantized", "valid"]
    ok = rows[rows[:, 5] == 1]
    assert np.all(ok[ok[:, 0] == 0.0][:, 4] == 0) and np.all(np.abs(ok[ok[:, 0] == 0.4][:, 4]) == 1)
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["regimes"] == {"0.0": "all0", "0.4": "all1"}


def test_phase_diagram_degenerate_and_threads(tmp_path, capsys, monkeypatch):
    code, _, _ = call(capsys, "phase-diagram", "--set", "grid=1", "--out", str(tmp_path / "one"))
    assert code == 0
    assert read_table(tmp_path / "one" / "phase.csv")[2].shape == (1, 4)
    call(capsys, "phase-diagram", "--set", "grid=8", "--out", str(tmp_path / "s"))
    monkeypatch.setenv("UAMO_LAB_THREADS", "4")
    call(capsys, "phase-diagram", "--set", "grid=8", "--threads", "1", "--out", str(tmp_path / "p"))
    assert (tmp_path / "s" / "phase.csv").read_bytes() == (tmp_path / "p" / "phase.csv").read_bytes()


def test_phase_diagram_eta_uses_second_moment(tmp_path, capsys):
    call(capsys, "phase-diagram", "--set", "grid=8", "--set", "eta=0.1", "--out", str(tmp_path))
    _, header, rows = read_table(tmp_path / "phase.csv")
    assert header[2] == "x2_t6"
    assert rows[rows[:, 0] == 0.0][:, 3].max() == 0.0


def test_validate_report(tmp_path, capsys):
    code, out, _ = call(capsys, "validate", "--out", str(tmp_path))
    rep = json.loads(out)
    names = {c["name"]: c for c in rep["checks"]}
    assert names["coin_decomposition"]["passed"] and names["unitarity_eta0"]["passed"]
    assert all("residual" in c for c in rep["checks"])
    assert code == (0 if rep["passed"] else 1)


def test_validate_fault_injection(tmp_path, capsys):
    code, out, _ = call(capsys, "validate", "--inject-fault", "hwp_sign", "--out", str(tmp_path))
    rep = json.loads(out)
    assert code == 1
    assert not {c["name"]: c for c in rep["checks"]}["coin_decomposition"]["passed"]


def test_reproduce(tmp_path, capsys):
    code, out, _ = call(capsys, "reproduce", "fig2g", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "0_evolve" / "observables.csv").exists() and (tmp_path / "1_evolve" / "observables.csv").exists()
