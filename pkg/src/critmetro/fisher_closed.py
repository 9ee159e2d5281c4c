"""Fisher information of the closed-system ramp protocol.

The final state is ``S(xi) D(alpha e^{-i phi})|0>`` with ``xi`` and ``phi``
both depending on Omega. Its QFI splits into a phase part, a critical
(eigenstate-shape) part and an interference part. The interference sign is
the one of the actual state family with ``dphi/dOmega = -phi/(2 Omega)`` and
``dxi/dOmega > 0``; :func:`critmetro.gaussian.qfi_pure` and the Fock oracle
both reproduce it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _kernels
from .gaussian import (GaussianPureState, mean_derivatives, quad_mean,
                       quad_mean_derivative, quad_variance,
                       quad_variance_derivative)
from .model import (DomainError, accumulated_phase, criticality, dphi_dOmega,
                    dxi_dOmega, squeezing_parameter)

ANGLE_GRID = 720
ANGLE_TOL = 1e-10


@dataclass(frozen=True)
class QfiBreakdown:
    phase_term: float
    critical_term: float
    interference_term: float

    def __post_init__(self):
        scale = abs(self.phase_term) + abs(self.critical_term) + abs(self.interference_term)
        if self.total < -1e-12 * scale:
            raise ArithmeticError(f"negative QFI {self.total!r} from {self!r}")

    @property
    def total(self):
        return self.phase_term + self.critical_term + self.interference_term


@dataclass(frozen=True)
class CfiResult:
    theta: float
    mean_term: float
    variance_term: float

    @property
    def total(self):
        return self.mean_term + self.variance_term


# -- array-level formulas (r = g/g_c, u = 1 - r^2) ---------------------------

def _critical(r, Omega, amp2):
    u = criticality(r)
    return r ** 4 * (1.0 + 2.0 * amp2) / (8.0 * Omega ** 2 * u ** 2)


def _interference(r, Omega, amp2, arg, phi):
    # amp2 phi sin(2(arg - phi)) / (Omega^2 (g_c^2/g^2 - 1))
    u = criticality(r)
    return amp2 * phi * np.sin(2.0 * (arg - phi)) * r ** 2 / (Omega ** 2 * u)


# -- QFI -----------------------------------------------------------------------

def qfi_phase(phi, Omega, alpha_mag):
    return phi ** 2 * alpha_mag ** 2 / Omega ** 2


def qfi_critical(params):
    """Critical contribution ``(1+2|alpha|^2) / (8 Omega^2 (1 - g_c^2/g^2)^2)``."""
    return float(_critical(params.ratio, params.Omega, params.alpha_mag ** 2))


def qfi_critical_exp_form(params):
    """Same quantity written with ``e^{8 xi}``; kept as a cross-check."""
    xi = squeezing_parameter(params.g, params.g_c)
    return params.ratio ** 4 * (1.0 + 2.0 * params.alpha_mag ** 2) / (
        8.0 * params.Omega ** 2 * math.exp(8.0 * xi))


def qfi_interference(params, phi):
    """Cross term between phase and shape changes; either sign."""
    return float(_interference(params.ratio, params.Omega, params.alpha_mag ** 2,
                               params.alpha_arg, phi))


def qfi_total_closed(params, g_f=None, phi=None):
    """Three-part QFI at coupling ``g_f`` (default ``params.g``).

    ``phi`` defaults to :func:`critmetro.model.accumulated_phase`.
    """
    if g_f is not None:
        params = params.with_g(g_f)
    if phi is None:
        phi = accumulated_phase(params.g, params)
    return QfiBreakdown(
        phase_term=qfi_phase(phi, params.Omega, params.alpha_mag),
        critical_term=qfi_critical(params),
        interference_term=qfi_interference(params, phi),
    )


def qfi_ratio_omega(Omega, omega):
    """QFI for omega over QFI for Omega."""
    if not (Omega > 0 and omega > 0):
        raise DomainError("frequencies must be positive")
    return (Omega / omega) ** 2


# -- states and derivatives -------------------------------------------------------

def closed_state(params, phi):
    xi = squeezing_parameter(params.g, params.g_c)
    return GaussianPureState(xi=xi, beta_mag=params.alpha_mag,
                             beta_arg=params.alpha_arg - phi)


def closed_derivatives(params, phi):
    """(dxi, d|beta|, d arg beta) with respect to Omega."""
    return dxi_dOmega(params), 0.0, -dphi_dOmega(params, phi)


# -- classical Fisher information ---------------------------------------------------

def cfi_gaussian(mean, variance, dmean, dvariance, theta=float("nan")):
    """CFI of a Gaussian outcome distribution from its first two moments."""
    if not variance > 0:
        raise DomainError(f"variance must be positive, got {variance!r}")
    return CfiResult(theta=theta,
                     mean_term=dmean ** 2 / variance,
                     variance_term=0.5 * (dvariance / variance) ** 2)


def cfi_state(state, derivs, theta):
    """Quadrature CFI for a Gaussian state and its parameter derivatives.

    The mean term uses ``d<Q> = d<X> cos + d<P> sin`` and the variance term
    ``dVar = 2 xi' (-Var_X cos^2 + Var_P sin^2)``; there is no X/P covariance.
    """
    dxi, dmag, darg = derivs
    return cfi_gaussian(quad_mean(state, theta), quad_variance(state, theta),
                        quad_mean_derivative(state, theta, dxi, dmag, darg),
                        quad_variance_derivative(state, theta, dxi), theta)


def cfi_quadrature(params, phi, theta):
    return cfi_state(closed_state(params, phi), closed_derivatives(params, phi), theta)


def _require_real_alpha(params):
    if params.alpha_arg != 0.0:
        raise DomainError("closed X/P forms assume arg(alpha) = 0; use cfi_quadrature")


def _variance_term(params):
    u = criticality(params.ratio)
    return params.ratio ** 4 / (8.0 * params.Omega ** 2 * u ** 2)


def cfi_X(params, phi):
    _require_real_alpha(params)
    shape = params.ratio ** 2 / criticality(params.ratio)  # (g/g_c)^2 e^{-4 xi}
    bracket = shape * math.cos(phi) - 2.0 * phi * math.sin(phi)
    return CfiResult(theta=0.0,
                     mean_term=params.alpha_mag ** 2 * bracket ** 2 / (4.0 * params.Omega ** 2),
                     variance_term=_variance_term(params))


def cfi_P(params, phi):
    _require_real_alpha(params)
    shape = params.ratio ** 2 / criticality(params.ratio)
    bracket = shape * math.sin(phi) - 2.0 * phi * math.cos(phi)
    return CfiResult(theta=math.pi / 2,
                     mean_term=params.alpha_mag ** 2 * bracket ** 2 / (4.0 * params.Omega ** 2),
                     variance_term=_variance_term(params))


# -- angle optimisation ------------------------------------------------------------

def _state_arrays(state, derivs):
    dxi = derivs[0]
    dx, dp = mean_derivatives(state, *derivs)
    return (state.mean_x, state.mean_p, dx, dp, state.var_x, state.var_p,
            -2.0 * dxi * state.var_x, 2.0 * dxi * state.var_p)


def angle_grid(n=ANGLE_GRID):
    return np.arange(n) * (math.pi / n)


def _snap(theta):
    theta = theta % math.pi
    if math.pi - theta < 1e-9:
        theta = 0.0
    return theta


def optimize_angle(state, derivs, n_grid=ANGLE_GRID, tol=ANGLE_TOL):
    """Maximise the quadrature CFI over theta in [0, pi).

    A uniform grid locates the candidate maxima, golden-section search refines
    each of them, and exact ties go to the smallest angle.
    """
    grid = angle_grid(n_grid)
    cols = [np.atleast_1d(np.asarray(a, dtype=float)) for a in _state_arrays(state, derivs)]
    vals = _kernels.cfi_grid(*cols, grid)[0]
    top = vals.max()
    step = grid[1] - grid[0]
    f = lambda th: -cfi_state(state, derivs, th).total
    best = []
    for i in range(n_grid):
        v = vals[i]
        if v < vals[i - 1] or v < vals[(i + 1) % n_grid] or v < top * (1.0 - 1e-6):
            continue
        try:
            res = optimize.minimize_scalar(
                f, bracket=(grid[i] - step, grid[i], grid[i] + step),
                method="golden", tol=tol)
            th, fv = res.x, -res.fun
        except ValueError:  # flat bracket
            th, fv = grid[i], v
        # the grid point stays a candidate: near a flat top the search only
        # resolves theta to ~sqrt(eps), and ties must go to the smaller angle
        best.append((v, float(grid[i])))
        if fv > v:
            best.append((fv, _snap(th)))
    fmax = max(fv for fv, _ in best)
    theta = min(th for fv, th in best if fv >= fmax * (1.0 - 1e-12))
    return float(theta), cfi_state(state, derivs, theta)


def optimize_quadrature_angle(params, phi):
    return optimize_angle(closed_state(params, phi), closed_derivatives(params, phi))


# -- vectorised sweep ---------------------------------------------------------------

def closed_sweep(ratios, Omega=200.0, omega=1.0, gamma=1e-3, alpha_mag=0.5, alpha_arg=0.0):
    """Phase, QFI terms and quadrature-state arrays along a g/g_c grid."""
    r = np.asarray(ratios, dtype=float)
    if np.any(r < 0) or np.any(r > 1.0 - 1e-12):
        raise DomainError("g/g_c grid must lie in [0, 1)")
    u = criticality(r)
    xi = 0.25 * np.log(u)
    phi = r * np.log1p(1.0 / np.sqrt(u)) / (2.0 * gamma)
    amp2 = alpha_mag ** 2
    state = GaussianPureState(xi=xi, beta_mag=alpha_mag, beta_arg=alpha_arg - phi)
    dxi = r ** 2 / (4.0 * Omega * u)
    derivs = (dxi, 0.0, phi / (2.0 * Omega))
    return {
        "g_over_gc": r,
        "xi": xi,
        "phi": phi,
        "qfi_phase": qfi_phase(phi, Omega, alpha_mag),
        "qfi_critical": _critical(r, Omega, amp2),
        "qfi_interference": _interference(r, Omega, amp2, alpha_arg, phi),
        "state": state,
        "derivs": derivs,
        "omega": omega,
    }


def sweep_cfi_grid(sweep, thetas):
    """CFI(theta) for every sweep point: shape (len(grid), len(thetas))."""
    state, derivs = sweep["state"], sweep["derivs"]
    n = np.size(state.xi)
    cols = [np.broadcast_to(np.asarray(a, dtype=float), (n,))
            for a in _state_arrays(state, derivs)]
    return _kernels.cfi_grid(*cols, thetas)
