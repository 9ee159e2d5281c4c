"""Parameters of the effective squeezing model and its closed-form quantities.

Frequencies are in units of ``omega`` and times in units of ``1/omega``.
The unknown parameter is the two-level splitting ``Omega``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

#: Closest approach to the critical point accepted by the domain guards.
CRITICAL_GUARD = 1e-12

#: Geometric phase of the adiabatic eigenstates. They are real, so it vanishes.
BERRY_PHASE = 0.0

#: Below this Omega/omega the spin elimination behind the model is doubtful.
OMEGA_RATIO_WARN = 10.0

#: Below this g_f/g_c the near-critical phase formula is a poor approximation.
PHASE_RATIO_WARN = 0.5


class DomainError(ValueError):
    """Input outside the region where the model is defined."""


def _check_ratio(r):
    if not r >= 0.0:
        raise DomainError(f"coupling must be nonnegative, got g/g_c={r!r}")
    if r > 1.0 - CRITICAL_GUARD:
        raise DomainError(
            f"g/g_c={r!r} reaches the critical point (guard 1-{CRITICAL_GUARD:g})")


def criticality(r):
    """``1 - r**2`` evaluated as ``(1-r)(1+r)`` to avoid cancellation."""
    return (1.0 - r) * (1.0 + r)


@dataclass(frozen=True)
class ClosedParams:
    """Model constants plus the coupling at which quantities are evaluated.

    ``g`` is the (final) coupling. ``gamma`` is the dimensionless ramp rate
    and ``alpha_mag``/``alpha_arg`` describe the initial coherent state.
    """

    omega: float = 1.0
    Omega: float = 200.0
    g: float = 0.0
    gamma: float = 1e-3
    alpha_mag: float = 0.0
    alpha_arg: float = 0.0

    def __post_init__(self):
        if not (self.omega > 0 and self.Omega > 0):
            raise DomainError("omega and Omega must be positive")
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")
        if not self.alpha_mag >= 0:
            raise DomainError("alpha_mag must be nonnegative")
        _check_ratio(self.ratio)

    @classmethod
    def at_ratio(cls, g_over_gc, **kw):
        """Build parameters with ``g = g_over_gc * g_c``."""
        omega = kw.get("omega", cls.omega)
        Omega = kw.get("Omega", cls.Omega)
        _check_ratio(g_over_gc)
        return cls(g=g_over_gc * critical_coupling(omega, Omega), **kw)

    @property
    def g_c(self):
        return critical_coupling(self.omega, self.Omega)

    @property
    def ratio(self):
        return self.g / self.g_c

    @property
    def alpha(self):
        return self.alpha_mag * complex(math.cos(self.alpha_arg), math.sin(self.alpha_arg))

    def with_g(self, g):
        return replace(self, g=g)


@dataclass(frozen=True)
class RampPoint:
    t: float
    g_of_t: float
    E0_gap: float


def critical_coupling(omega, Omega):
    if not (omega > 0 and Omega > 0):
        raise DomainError("omega and Omega must be positive")
    return math.sqrt(Omega * omega)


def squeezing_parameter(g, g_c):
    """xi = log(1 - g^2/g_c^2) / 4; zero at g=0 and divergent at g_c."""
    r = g / g_c
    _check_ratio(r)
    return 0.25 * math.log(criticality(r))


def ramp_value(t, params):
    """Coupling of the adiabatic ramp at time ``t``.

    With ``s = gamma*omega*t`` the ramp satisfies ``1 - g^2/g_c^2 = 1/(2s+1)^2``
    exactly, which gives the gap without cancellation.
    """
    if not t >= 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    s = params.gamma * params.omega * t
    g = 2.0 * params.g_c * math.sqrt(s * (s + 1.0)) / (2.0 * s + 1.0)
    return RampPoint(t=t, g_of_t=g, E0_gap=params.omega / (2.0 * s + 1.0))


def ramp_time(g_f, params):
    """Exact time at which the ramp reaches ``g_f``; inverse of :func:`ramp_value`."""
    r = g_f / params.g_c
    _check_ratio(r)
    # -2 xi = -log(1 - r^2)/2, with log1p keeping precision at small r
    log_u = math.log1p(-r * r) if r < 0.5 else math.log(criticality(r))
    return math.expm1(-0.5 * log_u) / (2.0 * params.gamma * params.omega)


def total_time(g_f, params):
    """Near-critical ramp duration ``1/(2 gamma omega sqrt(1 - g_f^2/g_c^2))``.

    This drops the ``-1/(2 gamma omega)`` offset of :func:`ramp_time`; the two
    agree to relative order ``sqrt(1 - g_f^2/g_c^2)``.
    """
    xi = squeezing_parameter(g_f, params.g_c)
    return math.exp(-2.0 * xi) / (2.0 * params.gamma * params.omega)


def accumulated_phase(g_f, params):
    """Near-critical accumulated phase, the one entering the Fisher formulas.

    Assumes ``g_f`` close to ``g_c``; :func:`dynamical_phase` is the exact
    integral of the gap along the ramp.
    """
    r = g_f / params.g_c
    _check_ratio(r)
    q = math.sqrt(criticality(r))
    return g_f * math.log1p(1.0 / q) / (2.0 * params.gamma * math.sqrt(params.Omega * params.omega))


def dynamical_phase(g_f, params):
    """Exact integral of the gap over the ramp from 0 to ``ramp_time(g_f)``.

    For this ramp it collapses to ``-xi(g_f)/gamma``.
    """
    return -squeezing_parameter(g_f, params.g_c) / params.gamma


def dxi_dOmega(params):
    """Derivative of xi with respect to Omega at fixed g and omega."""
    r = params.ratio
    _check_ratio(r)
    return r * r / (4.0 * params.Omega * criticality(r))


def dphi_dOmega(params, phi):
    """Phase derivative ``-phi/(2 Omega)`` (phi scales as ``Omega**-1/2``)."""
    return -phi / (2.0 * params.Omega)


def validity_notes(params, omega_ratio_min=OMEGA_RATIO_WARN):
    """Human-readable warnings about where the closed forms are shaky."""
    notes = []
    if params.Omega / params.omega < omega_ratio_min:
        notes.append(
            f"Omega/omega={params.Omega / params.omega:g} < {omega_ratio_min:g}: "
            "spin elimination assumes Omega >> omega")
    if 0 < params.ratio < PHASE_RATIO_WARN:
        notes.append(
            f"g/g_c={params.ratio:g} < {PHASE_RATIO_WARN:g}: accumulated_phase is "
            "a near-critical approximation")
    return notes
