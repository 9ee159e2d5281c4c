"""Brute-force checks in a truncated number basis.

Nothing here uses the closed forms of the other modules except to pick a
truncation and to name the reference state being compared against. Every
oracle run records a certificate (inputs, truncation, residuals) that can be
dumped as JSON.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, linalg

from . import _kernels
from .model import accumulated_phase, dynamical_phase, ramp_time, squeezing_parameter

EPS_TRUNC = 1e-8


class TruncationError(RuntimeError):
    """The number basis is too small for the requested state."""


class ConvergenceError(RuntimeError):
    """An iterative oracle did not reach its tolerance."""


# -- operators -----------------------------------------------------------------------

def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def quadrature(dim, theta):
    a = annihilation(dim)
    return 0.5 * (a * np.exp(-1j * theta) + a.conj().T * np.exp(1j * theta))


def squeeze_operator(dim, xi):
    a = annihilation(dim)
    return linalg.expm(0.5 * xi * (a @ a - a.conj().T @ a.conj().T))


def truncation_rule(xi, beta_mag):
    """Initial n_max for ``S(xi)D(beta)|0>``; doubled by callers if too small."""
    return int(math.ceil((beta_mag * math.exp(abs(xi)) + 4.0) ** 2
                         + 10.0 * math.exp(2.0 * abs(xi))))


# -- states ----------------------------------------------------------------------------

@dataclass
class FockState:
    amplitudes: np.ndarray
    certificate: dict = field(default_factory=dict)

    @property
    def n_max(self):
        return len(self.amplitudes) - 1

    def norm(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def overlap(self, other):
        return np.vdot(self.amplitudes, other.amplitudes)

    def fidelity(self, other):
        return float(abs(self.overlap(other)) ** 2)

    def expect(self, op):
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))

    def quad_moments(self, theta):
        q = quadrature(len(self.amplitudes), theta)
        m = self.expect(q).real
        return m, self.expect(q @ q).real - m * m


@dataclass
class DensityMatrix:
    entries: np.ndarray
    certificate: dict = field(default_factory=dict)

    def validate(self, tol=1e-10):
        rho = self.entries
        if abs(np.trace(rho) - 1.0) > tol:
            raise ConvergenceError(f"trace {np.trace(rho)!r} deviates from 1")
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ConvergenceError("density matrix is not hermitian")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
            raise ConvergenceError("density matrix has a negative eigenvalue")
        return self

    def expect(self, op):
        return complex(np.trace(op @ self.entries))

    def quad_moments(self, theta):
        q = quadrature(len(self.entries), theta)
        m = self.expect(q).real
        return m, self.expect(q @ q).real - m * m


def coherent_amplitudes(beta, dim):
    n = np.arange(dim)
    if beta == 0:
        out = np.zeros(dim, complex)
        out[0] = 1.0
        return out
    logmag = -0.5 * abs(beta) ** 2 + n * math.log(abs(beta)) - 0.5 * np.array(
        [math.lgamma(k + 1.0) for k in n])
    return np.exp(logmag + 1j * n * np.angle(beta))


def build_state(xi, beta, n_max, eps_trunc=EPS_TRUNC):
    """``S(xi) D(beta)|0>`` in the basis |0>..|n_max>.

    The state is built in a larger working basis by exponentiating the squeeze
    generator, then cut to ``n_max``. Raises :class:`TruncationError` when more
    than ``eps_trunc`` of the norm lies above ``n_max``.
    """
    if n_max < 1:
        raise TruncationError("n_max must be at least 1")
    work = 2 * (n_max + 1) + 40
    psi = coherent_amplitudes(complex(beta), work)
    if xi != 0.0:
        psi = squeeze_operator(work, xi) @ psi
    kept = psi[: n_max + 1]
    loss = 1.0 - float(np.vdot(kept, kept).real)
    if loss > eps_trunc:
        raise TruncationError(
            f"n_max={n_max} loses {loss:.3g} of the norm (budget {eps_trunc:g}); increase n_max")
    kept = kept / math.sqrt(1.0 - loss)
    return FockState(kept, {"xi": xi, "beta": [complex(beta).real, complex(beta).imag],
                            "n_max": n_max, "norm_loss": loss})


def sufficient_n_max(xi, beta_mag, eps_trunc=EPS_TRUNC, max_doublings=6):
    """Truncation-rule n_max, doubled until the norm budget holds."""
    n = truncation_rule(xi, beta_mag)
    for _ in range(max_doublings + 1):
        try:
            build_state(xi, beta_mag, n, eps_trunc)
            return n
        except TruncationError:
            n *= 2
    raise TruncationError(f"no n_max up to {n} meets the budget")


def auto_state(xi, beta, eps_trunc=EPS_TRUNC):
    return build_state(xi, beta, sufficient_n_max(xi, abs(beta), eps_trunc), eps_trunc)


# -- numeric QFI -------------------------------------------------------------------------

def _fd_qfi(builder, x, delta):
    plus, minus, centre = builder(x + delta / 2), builder(x - delta / 2), builder(x)
    if not len(plus.amplitudes) == len(minus.amplitudes) == len(centre.amplitudes):
        raise TruncationError("builder returned states of different n_max")
    d = (plus.amplitudes - minus.amplitudes) / delta
    psi = centre.amplitudes
    value = 4.0 * (np.vdot(d, d).real - abs(np.vdot(psi, d)) ** 2)
    return value, abs(minus.overlap(plus)), len(psi) - 1


def qfi_numeric_certified(builder, x, delta=None, max_halvings=10):
    """Fidelity finite-difference QFI, Richardson-extrapolated over two steps."""
    delta = 1e-4 * abs(x) if delta is None else delta
    for halvings in range(max_halvings + 1):
        coarse, ov, n_max = _fd_qfi(builder, x, delta)
        if ov >= 0.99:
            break
        delta /= 2
    else:
        raise ConvergenceError(f"overlap {ov:.4f} still < 0.99 after {max_halvings} halvings")
    fine, _, _ = _fd_qfi(builder, x, delta / 2)
    value = (4.0 * fine - coarse) / 3.0
    cert = {"oracle": "qfi_numeric", "x": x, "delta": delta, "halvings": halvings,
            "n_max": n_max, "overlap": ov, "qfi_coarse": coarse, "qfi_fine": fine,
            "qfi": value, "richardson_shift": abs(value - fine)}
    return value, cert


def qfi_numeric(builder, x, delta=None):
    return qfi_numeric_certified(builder, x, delta)[0]


def closed_family(params, phi=None, wrt="Omega", n_max=None):
    """Builder ``x -> S(xi(x)) D(alpha e^{-i phi(x)})|0>`` at fixed coupling g.

    ``x`` replaces ``params.Omega`` (or ``params.omega`` with ``wrt="omega"``);
    the phase scales as ``x**-1/2`` like the near-critical accumulated phase.
    """
    if wrt not in ("Omega", "omega"):
        raise ValueError("wrt must be 'Omega' or 'omega'")
    x0 = getattr(params, wrt)
    phi0 = accumulated_phase(params.g, params) if phi is None else phi
    alpha = params.alpha
    if n_max is None:
        xi0 = squeezing_parameter(params.g, params.g_c)
        n_max = 2 * sufficient_n_max(xi0, params.alpha_mag)

    def build(x):
        p = replace(params, **{wrt: x})
        xi = squeezing_parameter(params.g, p.g_c)
        phi_x = phi0 * math.sqrt(x0 / x)
        return build_state(xi, alpha * np.exp(-1j * phi_x), n_max)

    return build


def dd_family(params, n_max=None):
    """Builder ``Omega -> steady state`` at fixed drive frequency and time."""
    from .fisher_dd import steady_state

    st = steady_state(params)
    if n_max is None:
        n_max = 2 * sufficient_n_max(st.xi, st.beta_mag)

    def build(x):
        p = replace(params, base=replace(params.base, Omega=x))
        s = steady_state(p)
        return build_state(s.xi, s.beta, n_max)

    return build


# -- adiabatic ramp ------------------------------------------------------------------------

@dataclass
class RampResult:
    state: FockState
    reference: FockState
    fidelity: float
    certificate: dict


def evolve_ramp(params, g_f=None, dt=None, n_max=None, fid_tol=1e-8, max_refine=6):
    """Integrate the Schroedinger equation along the ramp from g=0 to ``g_f``.

    Starts from the coherent state ``|alpha>`` and stops at the exact time the
    ramp reaches ``g_f``. The result is compared with the adiabatic prediction
    ``S(xi_f) D(alpha e^{-i phi})|0>``, ``phi`` being the integrated gap. The
    step is halved until two successive fidelities agree to ``fid_tol``.
    """
    g_f = params.g if g_f is None else g_f
    T = ramp_time(g_f, params)
    xi_f = squeezing_parameter(g_f, params.g_c)
    phi = dynamical_phase(g_f, params)
    if n_max is None:
        n_max = sufficient_n_max(xi_f, params.alpha_mag)
    if dt is None:
        dt = 0.01 / params.omega * min(1.0, math.exp(2.0 * xi_f))
    reference = build_state(xi_f, params.alpha * np.exp(-1j * phi), n_max)
    psi0 = build_state(0.0, params.alpha, n_max).amplitudes

    history = []
    prev = None
    for level in range(max_refine + 1):
        nsteps = max(1, int(math.ceil(T / dt))) if T > 0 else 0
        h = T / nsteps if nsteps else 0.0
        psi = _kernels.ramp_rk4(psi0, 0.0, h, nsteps, params.omega, params.gamma)
        drift = abs(float(np.vdot(psi, psi).real) - 1.0)
        if drift > 1e-6:
            raise ConvergenceError(f"norm drift {drift:.3g} at dt={h:.3g}")
        fid = float(abs(np.vdot(reference.amplitudes, psi)) ** 2)
        history.append({"dt": h, "nsteps": nsteps, "fidelity": fid, "norm_drift": drift})
        if prev is not None and abs(fid - prev) <= fid_tol:
            break
        if nsteps == 0:
            break
        prev = fid
        dt = h / 2
    else:
        raise ConvergenceError(f"fidelity not converged to {fid_tol:g}: {history}")
    cert = {"oracle": "evolve_ramp", "g_over_gc": g_f / params.g_c, "gamma": params.gamma,
            "Omega": params.Omega, "omega": params.omega,
            "alpha": [params.alpha.real, params.alpha.imag], "T": T, "phi": phi,
            "n_max": n_max, "fidelity": fid, "refinements": history}
    return RampResult(FockState(psi, {"n_max": n_max}), reference, fid, cert)


# -- Lindblad steady state -----------------------------------------------------------------

def lindblad_steady(params, n_max=None, tol=1e-10, t_max=None, dt=None):
    """Steady state of the driven, damped squeezing model at lab time ``params.t``.

    The jump and drive operator is the Bogoliubov mode ``c = S a S^dag`` of the
    squeezing Hamiltonian, which is itself built from ``a``. The generator is
    made time-independent in the frame rotating at ``omega_d`` with ``c^dag c``
    and integrated with RK4 from the vacuum until the trace distance between
    successive ``1/kappa`` chunks drops below ``tol``.
    """
    from .fisher_dd import amplitude

    b = params.base
    xi = squeezing_parameter(b.g, b.g_c)
    if n_max is None:
        n_max = sufficient_n_max(xi, amplitude(params))
    dim = n_max + 1
    a = annihilation(dim)
    ad = a.conj().T
    S = squeeze_operator(dim, xi)
    c = S @ a @ S.conj().T
    num_c = c.conj().T @ c
    lam = b.g ** 2 / (4.0 * b.Omega)
    x2 = (a + ad) @ (a + ad)
    h = b.omega * (ad @ a) - lam * x2 - params.omega_d * num_c + params.eta * (c + c.conj().T)

    spread = np.ptp(np.linalg.eigvalsh(0.5 * (h + h.conj().T)))
    if dt is None:
        dt = min(0.05, 1.0 / (spread + params.kappa * np.linalg.eigvalsh(num_c).max()))
    chunk = 1.0 / params.kappa
    steps = max(1, int(math.ceil(chunk / dt)))
    dt = chunk / steps
    t_max = 400.0 / params.kappa if t_max is None else t_max

    rho = np.zeros((dim, dim), complex)
    rho[0, 0] = 1.0
    elapsed, residual = 0.0, math.inf
    while elapsed < t_max:
        new = _kernels.lindblad_rk4(rho, h, c, params.kappa, dt, steps)
        diff = new - rho
        residual = 0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum()
        rho = new
        elapsed += chunk
        if residual < tol:
            break
    else:
        raise ConvergenceError(f"no steady state by t={t_max:g}; residual {residual:.3g}")

    t_lab = params.t
    if params.phase_convention == "zero":
        t_lab -= 0.5 * math.pi / params.omega_d
    w, v = np.linalg.eigh(0.5 * (num_c + num_c.conj().T))
    rot = (v * np.exp(-1j * params.omega_d * t_lab * w)) @ v.conj().T
    rho_lab = rot @ rho @ rot.conj().T
    cert = {"oracle": "lindblad_steady", "g_over_gc": b.ratio, "eta": params.eta,
            "kappa": params.kappa, "omega_d": params.omega_d, "t": params.t,
            "n_max": n_max, "dt": dt, "t_integrated": elapsed, "residual": residual,
            "trace": float(np.trace(rho_lab).real)}
    return DensityMatrix(rho_lab, cert).validate(1e-8)


# -- direct CFI --------------------------------------------------------------------------

def _gauss(x, mu, var):
    return np.exp(-0.5 * (x - mu) ** 2 / var) / math.sqrt(2.0 * math.pi * var)


def cfi_direct(mean, variance, dmean, dvariance):
    """Integrate ``(dp)^2 / p`` for a Gaussian outcome density.

    ``dp`` is a five-point central difference of the density along the line
    ``(mean + s dmean, variance + s dvariance)``; integration runs over
    ``mean +- 12 sigma`` with adaptive quadrature.
    """
    if not variance > 0:
        raise ValueError("variance must be positive")
    if dmean == 0 and dvariance == 0:
        return 0.0
    sigma = math.sqrt(variance)
    h = 1e-3 / max(abs(dmean) / sigma, abs(dvariance) / variance)

    def integrand(x):
        p = [_gauss(x, mean + k * h * dmean, variance + k * h * dvariance) for k in (-2, -1, 1, 2)]
        dp = (p[0] - 8.0 * p[1] + 8.0 * p[2] - p[3]) / (12.0 * h)
        return dp * dp / _gauss(x, mean, variance)

    lo, hi = mean - 12.0 * sigma, mean + 12.0 * sigma
    val, err, info = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12,
                                    limit=400, points=[mean - sigma, mean, mean + sigma],
                                    full_output=True)[:3]
    if err > 1e-9 * abs(val):
        raise ConvergenceError(f"quadrature error estimate {err:.3g} for value {val:.6g}")
    return val


def certificate_json(cert):
    """Serialise a certificate; numpy scalars are converted to Python floats."""
    return json.dumps(cert, sort_keys=True, indent=2, default=float)
