"""Acceptance criteria 1-12, each at its stated tolerance and runtime budget.

Every test appends one ``criterion N: PASS|FAIL`` line to ACCEPTANCE_REPORT;
conftest prints them at the end of the pytest run. Running this file directly
also prints them.
"""
import math
import time

import numpy as np
import pytest

from critmetro import cli
from critmetro import fisher_closed as fc
from critmetro import fisher_dd as fdd
from critmetro import fock_oracle as fo
from critmetro.model import ClosedParams

ACCEPTANCE_REPORT = []
FIG1 = dict(omega=1.0, Omega=200.0, gamma=1e-3, alpha_mag=0.5, alpha_arg=-0.3)


def record(n, ok, detail, t0, budget):
    elapsed = time.perf_counter() - t0
    ok = bool(ok) and elapsed < budget
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f} s, budget {budget:g} s]"
    ACCEPTANCE_REPORT.append(line)
    print(line)
    assert ok, line


def _random_closed(rng):
    return ClosedParams.at_ratio(rng.uniform(0.0, 0.99999), Omega=10 ** rng.uniform(1, 3),
                                 alpha_mag=rng.uniform(0, 3), alpha_arg=rng.uniform(-math.pi, math.pi),
                                 gamma=10 ** rng.uniform(-4, -1))


def test_criterion_01_sum_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    bad, worst = 0, math.inf
    for _ in range(10_000):
        b = fc.qfi_total_closed(_random_closed(rng))
        total = b.total
        if not (total == b.phase_term + b.critical_term + b.interference_term and total >= 0):
            bad += 1
        worst = min(worst, total)
    record(1, bad == 0, f"10000 tuples, {bad} violations, min total {worst:.3e}", t0, 5)


def test_criterion_02_cramer_rao_sweep():
    t0 = time.perf_counter()
    thetas = fc.angle_grid(720)
    worst = -math.inf
    grids = {"default [0.5, 1-1e-5]": cli.closed_grid(cli.ScanConfig.defaults("closed")),
             "short [0.5, 0.9995]": 1.0 - np.geomspace(0.5, 5e-4, 512)}
    for ratios in grids.values():
        sw = fc.closed_sweep(ratios, **FIG1)
        cfi = fc.sweep_cfi_grid(sw, thetas)
        qfi = sw["qfi_phase"] + sw["qfi_critical"] + sw["qfi_interference"]
        worst = max(worst, float(np.max(cfi / qfi[:, None])))
    record(2, worst <= 1 + 1e-9,
           f"max cfi/qfi over 2 x 512 points x 720 angles = {worst:.15f}", t0, 30)


def test_criterion_03_alignment_saturation():
    t0 = time.perf_counter()
    p = ClosedParams.at_ratio(0.9, Omega=200.0, alpha_mag=0.5, alpha_arg=0.0)
    residuals = {}
    for k in (0, 1, 2):
        phi = k * math.pi
        qfi = fc.qfi_total_closed(p, phi=phi).total
        residuals[k] = abs(fc.cfi_X(p, phi).total - qfi) / qfi
    detail = ", ".join(f"k={k}: {v:.3e}" for k, v in residuals.items())
    record(3, all(v <= 1e-9 for v in residuals.values()),
           f"|cfi_X - qfi|/qfi at phi = k pi: {detail}", t0, 1)


def test_criterion_04_fig1_shape():
    t0 = time.perf_counter()
    cfg = cli.ScanConfig.defaults("closed")
    ratios = cli.closed_grid(cfg)
    sw = fc.closed_sweep(ratios, **FIG1)
    above = sw["qfi_critical"] > sw["qfi_phase"]
    crossing = float(ratios[np.argmax(above)]) if above.any() else math.nan
    s = np.sign(sw["qfi_interference"])
    s = s[s != 0]
    changes = int(np.count_nonzero(s[1:] != s[:-1]))
    ok = 0.5 < crossing < 1.0 and not above[0] and changes >= 2
    record(4, ok, f"crossing g*/g_c = {crossing:.6f}, interference sign changes = {changes}",
           t0, 10)


def test_criterion_05_oracle_qfi():
    t0 = time.perf_counter()
    rel = {}
    for r in (0.3, 0.5, 0.7):
        p = ClosedParams.at_ratio(r, **FIG1)
        num = fo.qfi_numeric(fo.closed_family(p), p.Omega)
        ref = fc.qfi_total_closed(p).total
        rel[r] = abs(num - ref) / ref
    detail = ", ".join(f"g/g_c={r}: {v:.2e}" for r, v in rel.items())
    record(5, max(rel.values()) <= 1e-2, f"relative deviation {detail}", t0, 120)


def test_criterion_06_ramp_fidelity():
    t0 = time.perf_counter()
    slow = fo.evolve_ramp(ClosedParams.at_ratio(0.9, **FIG1))
    fast = fo.evolve_ramp(ClosedParams.at_ratio(0.9, **{**FIG1, "gamma": 0.1}))
    record(6, slow.fidelity >= 0.999 and fast.fidelity < slow.fidelity,
           f"fidelity {slow.fidelity:.9f} at gamma=1e-3, {fast.fidelity:.6f} at gamma=0.1",
           t0, 300)


def test_criterion_07_cfi_direct():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        mean, var = rng.normal(), rng.uniform(0.05, 3.0)
        dmean, dvar = rng.normal(), rng.normal() * var
        ref = fc.cfi_gaussian(mean, var, dmean, dvar).total
        worst = max(worst, abs(fo.cfi_direct(mean, var, dmean, dvar) - ref) / ref)
    record(7, worst <= 1e-6, f"100 families, max relative deviation {worst:.2e}", t0, 30)


def test_criterion_08_ratio_law():
    t0 = time.perf_counter()
    p = ClosedParams.at_ratio(0.6, **FIG1)
    q_omega = fo.qfi_numeric(fo.closed_family(p, wrt="omega"), p.omega)
    q_Omega = fo.qfi_numeric(fo.closed_family(p, wrt="Omega"), p.Omega)
    expected = (p.Omega / p.omega) ** 2
    rel = abs(q_omega / q_Omega - expected) / expected
    record(8, rel <= 1e-2, f"ratio {q_omega / q_Omega:.6f} vs {expected:g}, rel {rel:.2e}", t0, 120)


def test_criterion_09_dd_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(1000):
        r, Omega = rng.uniform(0.01, 0.9999), 10 ** rng.uniform(1, 3)
        eta, kappa = rng.uniform(0, 20), 10 ** rng.uniform(-1, 1)
        base = ClosedParams.at_ratio(r, Omega=Omega)
        dd = fdd.DrivenDissipativeParams.resonant(base, eta, kappa)
        # 2|alpha|^2 -> 8 eta^2/kappa^2 means |alpha| = 2 eta / kappa
        closed = fc.qfi_critical(ClosedParams.at_ratio(r, Omega=Omega, alpha_mag=2 * eta / kappa))
        worst = max(worst, abs(fdd.qfi_dd(dd).critical_term - closed) / closed)
    # identical algebra evaluated in a different order: equal up to a few ulp
    record(9, worst <= 1e-14, f"1000 tuples, max relative difference {worst:.2e}", t0, 1)


def test_criterion_10_lindblad():
    t0 = time.perf_counter()
    base = ClosedParams.at_ratio(0.3, alpha_mag=0.0)
    p = fdd.DrivenDissipativeParams.resonant(base, eta=1.0, kappa=1.0)
    rho = fo.lindblad_steady(p)
    mx, vx = rho.quad_moments(0.0)
    mp, _ = rho.quad_moments(math.pi / 2)
    ex, evx = fdd.dd_quad_stats(p, 0.0)
    ep, _ = fdd.dd_quad_stats(p, math.pi / 2)
    dev = max(abs(mx - ex), abs(mp - ep), abs(vx - evx))
    record(10, dev <= 1e-3,
           f"max |oracle - analytic| over <X>, <P>, Var X = {dev:.2e} (n_max={rho.certificate['n_max']})",
           t0, 300)


def test_criterion_11_fig2_shape():
    t0 = time.perf_counter()
    cfg = cli.ScanConfig.defaults("driven_dissipative")
    cfg.phase_convention = "zero"
    rows = np.array(cli.scan_dd(cfg))
    cols = dict(zip(cli.DD_COLUMNS, rows.T))
    omega_d = cli._dd_params(cfg).omega_d
    q, t = cols["qfi_total"], cols["t"]
    half = int(round(math.pi / omega_d / (t[1] - t[0])))
    period_dev = float(np.max(np.abs(q[half:] - q[:-half]) / q[half:]))
    peaks = [i for i in range(1, len(q) - 1) if q[i] >= q[i - 1] and q[i] >= q[i + 1]]
    phase = (omega_d * t[peaks]) % math.pi
    peak_dev = float(np.max(np.abs(phase - math.pi / 4)))
    step = omega_d * (t[1] - t[0])
    gap = float(np.max((q - cols["cfi_opt"]) / q))
    ok = period_dev <= 1e-9 and peaks and peak_dev <= step and gap <= 0.05
    record(11, ok, f"period deviation {period_dev:.1e}, {len(peaks)} maxima within "
           f"{peak_dev:.2e} rad of pi/4 (grid step {step:.2e}), max gap {gap:.4f}", t0, 60)


def test_criterion_12_determinism(tmp_path):
    t0 = time.perf_counter()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = [cli.main(["scan-closed", "--out", str(a)]), cli.main(["scan-closed", "--out", str(b)])]
    same = a.read_bytes() == b.read_bytes()
    record(12, codes == [0, 0] and same, f"two scan-closed runs byte-identical: {same}", t0, 10)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
