"""Oracle suite behind ``critmetro verify``.

Each check compares a closed form against the Fock-basis oracle and returns a
record with its residual, tolerance and the oracle certificate. The ``fast``
level runs in well under a minute; ``full`` adds the ramp integration, the
omega/Omega ratio law and more oracle points.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from . import fisher_closed as fc
from . import fisher_dd as fdd
from . import fock_oracle as fo
from .gaussian import GaussianPureState
from .model import ClosedParams

FIG1 = dict(omega=1.0, Omega=200.0, gamma=1e-3, alpha_mag=0.5, alpha_arg=-0.3)


def _record(name, residual, tol, certificate=None):
    return {"name": name, "residual": float(residual), "tol": tol,
            "passed": bool(residual <= tol), "certificate": certificate or {}}


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_moment_bridge():
    worst, cases = 0.0, []
    for xi, beta in ((-0.35, 0.5 * np.exp(-0.3j)), (-0.6, 1.2 + 0.4j), (0.0, 0.9j)):
        st = GaussianPureState(xi=xi, beta_mag=abs(beta), beta_arg=float(np.angle(beta)))
        fock = fo.auto_state(xi, beta)
        for th in (0.0, math.pi / 2, 0.7):
            m, v = fock.quad_moments(th)
            dev = max(abs(m - float(fc.quad_mean(st, th))), abs(v - float(fc.quad_variance(st, th))))
            worst = max(worst, dev)
        cases.append({"xi": xi, "beta": [beta.real, beta.imag], "n_max": fock.n_max})
    return _record("moment bridge (Fock vs Gaussian)", worst, 1e-8, {"cases": cases})


def check_closed_qfi(ratio, phi=None, tol=1e-2):
    p = ClosedParams.at_ratio(ratio, **FIG1)
    value, cert = fo.qfi_numeric_certified(fo.closed_family(p, phi=phi), p.Omega)
    ref = fc.qfi_total_closed(p, phi=phi).total
    label = f"closed QFI g/g_c={ratio}" + ("" if phi is None else f" phi={phi}")
    cert.update(closed_form=ref)
    return _record(label, _rel(value, ref), tol, cert)


def check_pure_phase():
    # coherent state with an Omega-dependent phase only: QFI = 4|alpha|^2 phi'^2
    p = ClosedParams(g=0.0, alpha_mag=0.5, alpha_arg=-0.3, Omega=200.0)
    phi = 50.0
    value, cert = fo.qfi_numeric_certified(fo.closed_family(p, phi=phi), p.Omega)
    ref = 4.0 * p.alpha_mag ** 2 * (phi / (2.0 * p.Omega)) ** 2
    return _record("pure-phase coherent family", _rel(value, ref), 1e-6, cert)


def check_cfi_direct(n=5, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        mean, var = rng.normal(), rng.uniform(0.05, 3.0)
        dmean, dvar = rng.normal(), rng.normal() * var
        ref = fc.cfi_gaussian(mean, var, dmean, dvar).total
        worst = max(worst, _rel(fo.cfi_direct(mean, var, dmean, dvar), ref))
    return _record("direct CFI vs Gaussian moment formula", worst, 1e-6, {"families": n})


def _dd(ratio, eta, kappa, detune=0.0, t=0.0, convention="zero", Omega=200.0):
    base = ClosedParams.at_ratio(ratio, omega=1.0, Omega=Omega, alpha_mag=0.0)
    return fdd.DrivenDissipativeParams(base=base, eta=eta, kappa=kappa,
                                       omega_d=fdd.tilde_omega(base) - detune, t=t,
                                       phase_convention=convention)


def check_lindblad(detune=0.0, t=0.0, convention="zero", tol=1e-3):
    p = _dd(0.3, 1.0, 1.0, detune, t, convention)
    rho = fo.lindblad_steady(p)
    worst = 0.0
    for th in (0.0, math.pi / 2):
        m, v = rho.quad_moments(th)
        em, ev = fdd.dd_quad_stats(p, th)
        worst = max(worst, abs(m - em), abs(v - ev))
    return _record(f"Lindblad moments detuning={detune} t={t}", worst, tol, rho.certificate)


def check_dd_qfi(t=0.3):
    p = _dd(0.5, 1.0, 1.0, t=t)
    value, cert = fo.qfi_numeric_certified(fo.dd_family(p), p.base.Omega)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fdd.ResonanceWarning)
        ref = fdd.qfi_dd(p).total
    cert.update(closed_form=ref)
    return _record(f"driven QFI g/g_c=0.5 t={t}", _rel(value, ref), 1e-2, cert)


def check_closed_cramer_rao(points=64):
    ratios = 1.0 - np.geomspace(0.5, 1e-5, points)
    sw = fc.closed_sweep(ratios, **{k: v for k, v in FIG1.items()})
    cfi = fc.sweep_cfi_grid(sw, fc.angle_grid())
    qfi = sw["qfi_phase"] + sw["qfi_critical"] + sw["qfi_interference"]
    excess = float(np.max(cfi.max(axis=1) / qfi - 1.0))
    return _record("closed Cramer-Rao on coarse grid", max(excess, 0.0), 1e-9,
                   {"points": points, "angles": fc.ANGLE_GRID})


def check_ratio_law(ratio=0.5):
    p = ClosedParams.at_ratio(ratio, **FIG1)
    q_small = fo.qfi_numeric(fo.closed_family(p, wrt="omega"), p.omega)
    q_big = fo.qfi_numeric(fo.closed_family(p, wrt="Omega"), p.Omega)
    ref = fc.qfi_ratio_omega(p.Omega, p.omega)
    return _record("omega/Omega QFI ratio law", _rel(q_small / q_big, ref), 1e-2,
                   {"qfi_omega": q_small, "qfi_Omega": q_big})


def check_ramp():
    p = ClosedParams.at_ratio(0.9, **FIG1)
    res = fo.evolve_ramp(p)
    return _record("adiabatic ramp fidelity gamma=1e-3", max(0.0, 0.999 - res.fidelity), 0.0,
                   res.certificate)


def checks(level="fast"):
    fast = [
        check_moment_bridge,
        lambda: check_closed_qfi(0.5),
        lambda: check_closed_qfi(0.9, phi=7.0),
        check_pure_phase,
        check_cfi_direct,
        check_lindblad,
        check_dd_qfi,
        check_closed_cramer_rao,
    ]
    if level == "fast":
        return fast
    if level != "full":
        raise ValueError("level must be 'fast' or 'full'")
    return fast + [
        lambda: check_closed_qfi(0.3),
        lambda: check_closed_qfi(0.7),
        check_ratio_law,
        check_ramp,
        lambda: check_lindblad(detune=0.3, t=1.1, convention="arctan"),
        lambda: check_dd_qfi(t=2.0),
    ]


def run_checks(level="fast"):
    out = []
    for fn in checks(level):
        try:
            out.append(fn())
        except (fo.TruncationError, fo.ConvergenceError, ArithmeticError) as exc:
            name = getattr(fn, "__name__", "check")
            out.append({"name": name, "residual": math.inf, "tol": 0.0, "passed": False,
                        "certificate": {"error": str(exc)}})
    return out
