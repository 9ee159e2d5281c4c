"""Driven-dissipative steady state of the squeezing model and its Fisher information.

The Bogoliubov mode ``c = S a S^dag`` oscillates at ``w~ = omega e^{2 xi}``.
Driving it at ``omega_d`` with strength ``eta`` under loss rate ``kappa`` gives
the coherent amplitude ``<c> = -i eta / (kappa/2 + i Delta) e^{-i omega_d t}``
with ``Delta = w~ - omega_d``. Written as ``|a~| e^{-i(omega_d t + phase)}``:

    |a~|  = 2 eta / sqrt(kappa^2 + 4 Delta^2)
    phase = pi/2 + atan(2 Delta / kappa)          ("arctan" convention)
    phase = atan(2 Delta / kappa)                 ("zero" convention)

The "zero" convention moves the time origin by a quarter drive period so the
phase vanishes at resonance. Only ``phase`` depends on Omega through ``w~``;
its slope ``+2/kappa`` at resonance fixes the sign of the interference term.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .fisher_closed import CfiResult, QfiBreakdown, cfi_state, optimize_angle
from .gaussian import GaussianPureState, quad_mean, quad_variance
from .model import ClosedParams, DomainError, criticality, dxi_dOmega, squeezing_parameter

RESONANCE_GUARD = 0.05
PHASE_CONVENTIONS = ("arctan", "zero")


class ResonanceWarning(UserWarning):
    """Closed forms evaluated away from resonance."""


@dataclass(frozen=True)
class DrivenDissipativeParams:
    base: ClosedParams
    eta: float
    kappa: float
    omega_d: float
    t: float = 0.0
    phase_convention: str = "arctan"

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if not self.eta >= 0:
            raise DomainError("eta must be nonnegative")
        if not self.omega_d > 0:
            raise DomainError("omega_d must be positive")
        if not self.t >= 0:
            raise DomainError("t must be nonnegative")
        if self.phase_convention not in PHASE_CONVENTIONS:
            raise DomainError(f"phase_convention must be one of {PHASE_CONVENTIONS}")

    @classmethod
    def resonant(cls, base, eta, kappa, t=0.0, phase_convention="arctan"):
        return cls(base=base, eta=eta, kappa=kappa, omega_d=tilde_omega(base),
                   t=t, phase_convention=phase_convention)

    def at_time(self, t):
        return replace(self, t=t)


def tilde_omega(base):
    """Resonance frequency ``omega sqrt(1 - g^2/g_c^2)``."""
    return base.omega * math.sqrt(criticality(base.ratio))


def detuning(params):
    return tilde_omega(params.base) - params.omega_d


def amplitude(params):
    d = detuning(params)
    return 2.0 * params.eta / math.sqrt(params.kappa ** 2 + 4.0 * d * d)


def drive_phase(params):
    p = math.atan(2.0 * detuning(params) / params.kappa)
    if params.phase_convention == "arctan":
        p += math.pi / 2
    return p


def total_phase(params):
    """``omega_d t + phase``: minus the argument of the displacement."""
    return params.omega_d * params.t + drive_phase(params)


def check_resonance(params, guard=RESONANCE_GUARD):
    d = detuning(params)
    if abs(d) > guard * params.kappa:
        warnings.warn(f"|omega_d - w~| = {abs(d):.3g} exceeds {guard:g} kappa; "
                      "closed forms assume resonance", ResonanceWarning, stacklevel=3)


def steady_state(params):
    xi = squeezing_parameter(params.base.g, params.base.g_c)
    return GaussianPureState(xi=xi, beta_mag=amplitude(params), beta_arg=-total_phase(params))


def steady_state_derivatives(params):
    """(dxi, d|beta|, d arg beta) with respect to Omega at fixed drive."""
    dxi = dxi_dOmega(params.base)
    d = detuning(params)
    k2 = params.kappa ** 2 + 4.0 * d * d
    dw = 2.0 * tilde_omega(params.base) * dxi
    dmag = -8.0 * params.eta * d * k2 ** -1.5 * dw
    dphase = 2.0 * params.kappa / k2 * dw
    return dxi, dmag, -dphase


def qfi_dd(params):
    """Three-part QFI at resonance."""
    check_resonance(params)
    b = params.base
    r, u = b.ratio, criticality(b.ratio)
    eta, kap, Om = params.eta, params.kappa, b.Omega
    g4 = b.g ** 4
    return QfiBreakdown(
        phase_term=16.0 * g4 * eta ** 2 / (u * Om ** 4 * kap ** 4),
        critical_term=(1.0 + 8.0 * eta ** 2 / kap ** 2) * r ** 4 / (8.0 * Om ** 2 * u ** 2),
        interference_term=8.0 * g4 * eta ** 2 * math.sin(2.0 * total_phase(params))
        / (b.g_c ** 2 * kap ** 3 * u ** 1.5 * Om ** 3),
    )


def dd_quad_stats(params, theta):
    state = steady_state(params)
    return quad_mean(state, theta), quad_variance(state, theta)


def cfi_dd_quadrature(params, theta):
    return cfi_state(steady_state(params), steady_state_derivatives(params), theta)


def _dd_closed_cfi(params, cos_part, sin_part, theta):
    check_resonance(params)
    b = params.base
    r, u = b.ratio, criticality(b.ratio)
    kap, Om = params.kappa, b.Omega
    w = tilde_omega(b)
    bracket = params.eta * kap * cos_part + 4.0 * params.eta * w * sin_part
    # (1 - g_c^2/g^2)^2 = u^2 / r^4
    return CfiResult(theta=theta,
                     mean_term=bracket ** 2 * r ** 4 / (kap ** 4 * Om ** 2 * u ** 2),
                     variance_term=r ** 4 / (8.0 * Om ** 2 * u ** 2))


def cfi_dd_X(params):
    psi = total_phase(params)
    return _dd_closed_cfi(params, math.cos(psi), math.sin(psi), 0.0)


def cfi_dd_P(params):
    psi = total_phase(params)
    return _dd_closed_cfi(params, math.sin(psi), math.cos(psi), math.pi / 2)


def optimal_angle_trace(params, t_grid):
    """Per-time optimal quadrature: list of ``(t, theta_star, cfi, qfi)``."""
    t_grid = [float(t) for t in t_grid]
    if not t_grid:
        raise DomainError("t_grid must be nonempty")
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise DomainError("t_grid must be strictly increasing")
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonanceWarning)
        for t in t_grid:
            p = params.at_time(t)
            theta, cfi = optimize_angle(steady_state(p), steady_state_derivatives(p))
            out.append((t, theta, cfi.total, qfi_dd(p).total))
    check_resonance(params)
    return out


def unwrap_angles(thetas):
    """Remove the pi jumps of an optimal-angle trace for plotting."""
    return np.unwrap(2.0 * np.asarray(thetas, dtype=float)) / 2.0
