import json
import math

import numpy as np
import pytest

from critmetro import cli, verify
from critmetro import fisher_closed as fc
from critmetro.model import ClosedParams


def run(tmp_path, *argv):
    out = tmp_path / "out.csv"
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def test_scan_closed_columns_and_cramer_rao(tmp_path):
    code, out = run(tmp_path, "scan-closed", "--points", "40")
    assert code == 0
    table = cli.read_table(out)
    assert tuple(table) == cli.CLOSED_COLUMNS
    assert len(table["g_over_gc"]) == 40
    assert np.all(table["cfi_opt"] <= table["qfi_total"] * (1 + 1e-9))
    assert np.all(np.diff(table["g_over_gc"]) > 0)


def test_scan_closed_zero_alpha(tmp_path):
    code, out = run(tmp_path, "scan-closed", "--points", "16", "--alpha-mag", "0")
    table = cli.read_table(out)
    assert np.all(table["qfi_phase"] == 0) and np.all(table["qfi_interference"] == 0)


def test_config_roundtrip(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"num_points": 8, "Omega": 150.0, "gamma": 2e-3}))
    code, out = run(tmp_path, "scan-closed", "--config", str(cfg_path), "--Omega", "120")
    cfg = cli.read_config(out)
    assert cfg.Omega == 120.0  # flag beats file
    assert cfg.gamma == 2e-3 and cfg.num_points == 8
    again = tmp_path / "again.csv"
    cli.write_atomic(again, cli.format_csv(cfg, cli.CLOSED_COLUMNS, cli.scan_closed(cfg),
                                           "scan-closed"))
    assert again.read_bytes() == out.read_bytes()


def test_float_format_roundtrips(tmp_path):
    _, out = run(tmp_path, "scan-closed", "--points", "5")
    body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")][1:]
    for field in body[0].split(","):
        assert repr(float(field)) == field


@pytest.mark.parametrize("argv", [
    ["scan-closed", "--points", "1"],
    ["scan-closed", "--g-over-gc", "0.5", "--start", "0.9", "--stop", "0.5"],
    ["scan-closed", "--stop", "1.0"],
    ["scan-closed", "--gamma", "-1"],
    ["scan-dd", "--kappa", "0"],
])
def test_invalid_config_exits_nonzero_without_file(tmp_path, argv):
    code, out = run(tmp_path, *argv)
    assert code != 0
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_unknown_config_key(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["scan-closed", "--config", str(cfg_path)]) != 0


def test_scan_dd_period_and_conventions(tmp_path):
    code, out = run(tmp_path, "scan-dd", "--phase-convention", "zero", "--eta", "2",
                    "--g-over-gc", "0.99")
    table = cli.read_table(out)
    assert tuple(table) == cli.DD_COLUMNS
    q = table["qfi_total"]
    assert len(q) == 1024
    # 512 rows per drive period, so QFI repeats every 256 rows
    assert np.allclose(q[256:], q[:-256], rtol=1e-9)
    assert np.all(table["cfi_opt"] <= q * (1 + 1e-9))
    _, out2 = run(tmp_path, "scan-dd", "--phase-convention", "arctan", "--eta", "2",
                  "--g-over-gc", "0.99", "--points", "64")
    assert cli.read_config(out2).phase_convention == "arctan"


def test_scan_dd_zero_drive_is_flat(tmp_path):
    _, out = run(tmp_path, "scan-dd", "--eta", "0", "--points", "32")
    table = cli.read_table(out)
    for col in ("qfi_total", "cfi_opt", "theta_opt"):
        assert np.ptp(table[col]) == 0.0


def test_point_and_optimize_angle(capsys):
    assert cli.main(["point", "--g-over-gc", "0.9", "--alpha-arg", "0", "--phi", "1.0"]) == 0
    data = json.loads(capsys.readouterr().out)
    p = ClosedParams.at_ratio(0.9, alpha_mag=0.5)
    assert data["cfi_X"] == pytest.approx(fc.cfi_X(p, 1.0).total, rel=1e-10)
    assert data["qfi_total"] == pytest.approx(fc.qfi_total_closed(p, phi=1.0).total)
    assert cli.main(["optimize-angle", "--g-over-gc", "0.99", "--eta", "3", "--t", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["mode"] == "driven_dissipative"
    assert 0 <= data["theta_opt"] < math.pi
    assert data["cfi_opt"] <= data["qfi_total"] * (1 + 1e-9)


def test_verify_fast_passes(tmp_path, capsys):
    certs = tmp_path / "certs.json"
    assert cli.main(["verify", "--level", "fast", "--out", str(certs)]) == 0
    assert "all checks passed" in capsys.readouterr().out
    data = json.loads(certs.read_text())
    assert all(rec["passed"] for rec in data)


def test_verify_detects_tampered_interference(monkeypatch, capsys):
    orig = fc._interference
    monkeypatch.setattr(fc, "_interference", lambda *a: -orig(*a))
    assert cli.main(["verify", "--level", "fast"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_detects_tampered_variance_factor(monkeypatch):
    orig = fc.cfi_gaussian

    def tampered(mean, variance, dmean, dvariance, theta=float("nan")):
        r = orig(mean, variance, dmean, dvariance, theta)
        return fc.CfiResult(r.theta, r.mean_term, 2.0 * r.variance_term)

    monkeypatch.setattr(fc, "cfi_gaussian", tampered)
    rec = verify.check_cfi_direct()
    assert not rec["passed"]
