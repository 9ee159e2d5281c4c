"""Command-line front end.

    critmetro scan-closed   [--config cfg.json] [flags] [--out fig1.csv]
    critmetro scan-dd       [--config cfg.json] [flags] [--out fig2.csv]
    critmetro point         --g-over-gc 0.9 [--eta 8 ...]
    critmetro optimize-angle --g-over-gc 0.9 [--eta 8 ...]
    critmetro verify        --level fast|full [--out certs.json]

Configuration precedence: built-in defaults < JSON config file < flags.
Scans write UTF-8 CSV whose ``#`` header lines carry the full configuration.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fisher_closed as fc
from . import fisher_dd as fdd
from .model import ClosedParams, DomainError, validity_notes

CLOSED_COLUMNS = ("g_over_gc", "xi", "phi", "qfi_phase", "qfi_critical", "qfi_interference",
                  "qfi_total", "cfi_X", "cfi_P", "cfi_opt", "theta_opt")
DD_COLUMNS = ("t", "qfi_phase", "qfi_critical", "qfi_interference", "qfi_total",
              "cfi_X", "cfi_P", "cfi_opt", "theta_opt")
POINTS_PER_PERIOD = 512


@dataclass
class ScanConfig:
    mode: str = "closed"
    sweep: str = "g_over_gc"
    start: float | None = None
    stop: float | None = None
    num_points: int | None = None
    omega: float = 1.0
    Omega: float = 200.0
    gamma: float = 1e-3
    alpha_mag: float = 0.5
    alpha_arg: float = -0.3
    g_over_gc: float = 0.999
    eta: float = 8.0
    kappa: float = 1.0
    omega_d: float | None = None
    phase_convention: str = "arctan"

    @classmethod
    def defaults(cls, mode):
        if mode == "closed":
            return cls(mode="closed", sweep="g_over_gc", start=0.5, stop=1.0 - 1e-5,
                       num_points=512)
        return cls(mode="driven_dissipative", sweep="time", start=0.0, Omega=100.5,
                   g_over_gc=0.999, eta=8.0, kappa=1.0)

    def validate(self):
        if self.mode not in ("closed", "driven_dissipative"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.sweep not in ("g_over_gc", "time"):
            raise DomainError(f"unknown sweep {self.sweep!r}")
        if (self.mode == "closed") != (self.sweep == "g_over_gc"):
            raise DomainError("closed scans sweep g_over_gc; driven_dissipative scans sweep time")
        if self.phase_convention not in fdd.PHASE_CONVENTIONS:
            raise DomainError(f"phase_convention must be one of {fdd.PHASE_CONVENTIONS}")
        if not self.start < self.stop:
            raise DomainError(f"start={self.start} must be < stop={self.stop}")
        if not (isinstance(self.num_points, int) and self.num_points >= 2):
            raise DomainError("num_points must be an integer >= 2")
        if self.mode == "closed" and not (0.0 <= self.start and self.stop < 1.0):
            raise DomainError("g_over_gc range must lie in [0, 1)")
        return self

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


# -- parameter builders ------------------------------------------------------------

def _closed_params(cfg, ratio):
    return ClosedParams.at_ratio(ratio, omega=cfg.omega, Omega=cfg.Omega, gamma=cfg.gamma,
                                 alpha_mag=cfg.alpha_mag, alpha_arg=cfg.alpha_arg)


def _dd_params(cfg, t=0.0):
    base = _closed_params(cfg, cfg.g_over_gc)
    omega_d = fdd.tilde_omega(base) if cfg.omega_d is None else cfg.omega_d
    return fdd.DrivenDissipativeParams(base=base, eta=cfg.eta, kappa=cfg.kappa,
                                       omega_d=omega_d, t=t,
                                       phase_convention=cfg.phase_convention)


def _finish_dd(cfg):
    """Fill time-range defaults that depend on the drive frequency."""
    omega_d = _dd_params(cfg).omega_d
    period = 2.0 * math.pi / omega_d
    if cfg.stop is None:
        cfg.stop = 2.0 * period
    if cfg.num_points is None:
        cfg.num_points = max(2, int(round(POINTS_PER_PERIOD * (cfg.stop - cfg.start) / period)))
    return cfg


# -- scans ---------------------------------------------------------------------------

def closed_grid(cfg):
    """Points log-spaced in 1 - g/g_c."""
    return 1.0 - np.geomspace(1.0 - cfg.start, 1.0 - cfg.stop, cfg.num_points)


def dd_grid(cfg):
    return cfg.start + (cfg.stop - cfg.start) * np.arange(cfg.num_points) / cfg.num_points


def scan_closed(cfg):
    """Rows of :data:`CLOSED_COLUMNS` along the g/g_c grid."""
    cfg.validate()
    ratios = closed_grid(cfg)
    sw = fc.closed_sweep(ratios, Omega=cfg.Omega, omega=cfg.omega, gamma=cfg.gamma,
                         alpha_mag=cfg.alpha_mag, alpha_arg=cfg.alpha_arg)
    rows = []
    for i, r in enumerate(ratios):
        p = _closed_params(cfg, float(r))
        phi = float(sw["phi"][i])
        qfi = fc.qfi_total_closed(p, phi=phi)
        cx = fc.cfi_quadrature(p, phi, 0.0).total
        cp = fc.cfi_quadrature(p, phi, math.pi / 2).total
        theta, cfi = fc.optimize_quadrature_angle(p, phi)
        rows.append((float(r), float(sw["xi"][i]), phi, qfi.phase_term, qfi.critical_term,
                     qfi.interference_term, qfi.total, cx, cp, float(cfi.total), theta))
    return rows


def scan_dd(cfg):
    """Rows of :data:`DD_COLUMNS` along the time grid."""
    cfg = _finish_dd(cfg).validate()
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fdd.ResonanceWarning)
        for t in dd_grid(cfg):
            p = _dd_params(cfg, float(t))
            qfi = fdd.qfi_dd(p)
            cx = fdd.cfi_dd_quadrature(p, 0.0).total
            cp = fdd.cfi_dd_quadrature(p, math.pi / 2).total
            theta, cfi = fc.optimize_angle(fdd.steady_state(p), fdd.steady_state_derivatives(p))
            rows.append((float(t), qfi.phase_term, qfi.critical_term, qfi.interference_term,
                         qfi.total, float(cx), float(cp), float(cfi.total), theta))
    return rows


def format_csv(cfg, columns, rows, command):
    lines = [f"# critmetro {command}", f"# config: {cfg.to_json()}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def read_config(csv_path):
    """Recover the :class:`ScanConfig` echoed into a scan CSV header."""
    with open(csv_path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# config: "):
                return ScanConfig.from_dict(json.loads(line[len("# config: "):]))
            if not line.startswith("#"):
                break
    raise DomainError(f"no config header in {csv_path}")


def read_table(csv_path):
    """Load a scan CSV as a dict of float arrays keyed by column name."""
    with open(csv_path, encoding="utf-8") as fh:
        body = [ln for ln in fh if not ln.startswith("#")]
    names = body[0].strip().split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in body[1:]])
    return {n: data[:, i] for i, n in enumerate(names)}


def write_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- argument handling -------------------------------------------------------------

_FLAG_FIELDS = {
    "omega": "omega", "Omega": "Omega", "g_over_gc": "g_over_gc", "gamma": "gamma",
    "alpha_mag": "alpha_mag", "alpha_arg": "alpha_arg", "eta": "eta", "kappa": "kappa",
    "omega_d": "omega_d", "t_max": "stop", "points": "num_points", "start": "start",
    "stop": "stop", "phase_convention": "phase_convention",
}


def _add_model_flags(ap):
    ap.add_argument("--config", help="JSON file with ScanConfig fields")
    ap.add_argument("--omega", type=float)
    ap.add_argument("--Omega", type=float)
    ap.add_argument("--g-over-gc", dest="g_over_gc", type=float)
    ap.add_argument("--gamma", type=float)
    ap.add_argument("--alpha-mag", dest="alpha_mag", type=float)
    ap.add_argument("--alpha-arg", dest="alpha_arg", type=float)
    ap.add_argument("--eta", type=float)
    ap.add_argument("--kappa", type=float)
    ap.add_argument("--omega-d", dest="omega_d", type=float)
    ap.add_argument("--phase-convention", dest="phase_convention", choices=fdd.PHASE_CONVENTIONS)


def _add_scan_flags(ap):
    ap.add_argument("--start", type=float, help="first sweep value")
    ap.add_argument("--stop", type=float, help="last sweep value (g/g_c) or end time")
    ap.add_argument("--t-max", dest="t_max", type=float, help="end time of a scan-dd sweep")
    ap.add_argument("--points", type=int)
    ap.add_argument("--out", help="output CSV (stdout when omitted)")


def build_config(args, mode):
    cfg = ScanConfig.defaults(mode)
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        merged = {**dataclasses.asdict(cfg), **data}
        cfg = ScanConfig.from_dict(merged)
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _emit(text, out):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _notes(params):
    for note in validity_notes(params):
        print(f"note: {note}", file=sys.stderr)


def cmd_scan_closed(args):
    cfg = build_config(args, "closed")
    rows = scan_closed(cfg)
    _notes(_closed_params(cfg, cfg.start))
    _emit(format_csv(cfg, CLOSED_COLUMNS, rows, "scan-closed"), args.out)
    return 0


def cmd_scan_dd(args):
    cfg = build_config(args, "driven_dissipative")
    rows = scan_dd(cfg)
    _emit(format_csv(cfg, DD_COLUMNS, rows, "scan-dd"), args.out)
    return 0


def _point_payload(args, optimize_only=False):
    dd = args.eta is not None
    cfg = build_config(args, "driven_dissipative" if dd else "closed")
    if dd:
        p = _dd_params(cfg, args.t)
        theta, cfi = fc.optimize_angle(fdd.steady_state(p), fdd.steady_state_derivatives(p))
        qfi = fdd.qfi_dd(p)
        out = {"mode": "driven_dissipative", "t": args.t, "omega_d": p.omega_d}
        if not optimize_only:
            out["cfi_X"] = float(fdd.cfi_dd_quadrature(p, 0.0).total)
            out["cfi_P"] = float(fdd.cfi_dd_quadrature(p, math.pi / 2).total)
    else:
        p = _closed_params(cfg, cfg.g_over_gc)
        _notes(p)
        phi = args.phi
        qfi = fc.qfi_total_closed(p, phi=phi)
        phi = fc.accumulated_phase(p.g, p) if phi is None else phi
        theta, cfi = fc.optimize_quadrature_angle(p, phi)
        out = {"mode": "closed", "phi": phi}
        if not optimize_only:
            out["cfi_X"] = float(fc.cfi_quadrature(p, phi, 0.0).total)
            out["cfi_P"] = float(fc.cfi_quadrature(p, phi, math.pi / 2).total)
    out.update({"config": json.loads(cfg.to_json()), "theta_opt": theta,
                "cfi_opt": float(cfi.total), "qfi_total": qfi.total})
    if not optimize_only:
        out.update({"qfi_phase": qfi.phase_term, "qfi_critical": qfi.critical_term,
                    "qfi_interference": qfi.interference_term})
    return out


def cmd_point(args):
    print(json.dumps(_point_payload(args), indent=2, sort_keys=True))
    return 0


def cmd_optimize_angle(args):
    print(json.dumps(_point_payload(args, optimize_only=True), indent=2, sort_keys=True))
    return 0


def cmd_verify(args):
    from .verify import run_checks

    results = run_checks(args.level)
    ok = True
    for res in results:
        status = "PASS" if res["passed"] else "FAIL"
        ok &= res["passed"]
        print(f"{status}  {res['name']:<40s} residual={res['residual']:.3e} "
              f"tol={res['tol']:.1e}")
    if args.out:
        write_atomic(args.out, json.dumps(results, indent=2, sort_keys=True, default=float) + "\n")
    print("all checks passed" if ok else "verification FAILED")
    return 0 if ok else 1


def make_parser():
    ap = argparse.ArgumentParser(prog="critmetro", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan-closed", help="closed-system sweep over g/g_c")
    _add_model_flags(p)
    _add_scan_flags(p)
    p.set_defaults(func=cmd_scan_closed)

    p = sub.add_parser("scan-dd", help="driven-dissipative sweep over time")
    _add_model_flags(p)
    _add_scan_flags(p)
    p.set_defaults(func=cmd_scan_dd)

    for name, func, hlp in (("point", cmd_point, "all quantities at one point"),
                            ("optimize-angle", cmd_optimize_angle, "optimal quadrature angle")):
        p = sub.add_parser(name, help=hlp)
        _add_model_flags(p)
        p.add_argument("--phi", type=float, help="override the accumulated phase (closed)")
        p.add_argument("--t", type=float, default=0.0, help="observation time (driven)")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run the Fock-basis oracle suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--out", help="write certificates as JSON")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError, OSError) as exc:
        print(f"critmetro: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
