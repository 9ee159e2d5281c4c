"""Squeezed-displaced vacuum ``S(xi) D(beta)|0>`` and its quadrature statistics.

Quadratures are ``X = (a + a^dag)/2`` and ``P = (a - a^dag)/2i`` so the vacuum
variance is 1/4. For real ``xi`` the squeezing acts along X/P:
``S^dag X S = e^{-xi} X`` and ``S^dag P S = e^{xi} P``. With ``xi < 0`` the X
quadrature is the anti-squeezed one.

Functions work elementwise on numpy arrays as well as on floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GaussianPureState:
    xi: float
    beta_mag: float
    beta_arg: float

    @classmethod
    def closed(cls, xi, alpha, phi):
        """Final state of the adiabatic ramp: displacement ``alpha e^{-i phi}``."""
        return cls(xi=xi, beta_mag=abs(alpha), beta_arg=np.angle(alpha) - phi)

    @property
    def beta(self):
        return self.beta_mag * np.exp(1j * self.beta_arg)

    @property
    def mean_x(self):
        return self.beta_mag * np.cos(self.beta_arg) * np.exp(-self.xi)

    @property
    def mean_p(self):
        return self.beta_mag * np.sin(self.beta_arg) * np.exp(self.xi)

    @property
    def var_x(self):
        return 0.25 * np.exp(-2.0 * self.xi)

    @property
    def var_p(self):
        return 0.25 * np.exp(2.0 * self.xi)

    def covariance(self):
        """X/P covariance matrix; diagonal, determinant 1/16."""
        return np.array([[self.var_x, 0.0], [0.0, self.var_p]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Measured quadrature ``Q = X cos(theta) + P sin(theta)``."""

    theta: float

    @property
    def theta_mod_pi(self):
        return self.theta % math.pi


def _theta(spec):
    return spec.theta if isinstance(spec, QuadratureSpec) else spec


def quad_mean(state, spec):
    th = _theta(spec)
    return state.mean_x * np.cos(th) + state.mean_p * np.sin(th)


def quad_variance(state, spec):
    th = _theta(spec)
    return state.var_x * np.cos(th) ** 2 + state.var_p * np.sin(th) ** 2


def mean_derivatives(state, dxi, dbeta_mag, dbeta_arg):
    """Derivatives of <X> and <P> given derivatives of xi, |beta| and arg beta."""
    c, s = np.cos(state.beta_arg), np.sin(state.beta_arg)
    em, ep = np.exp(-state.xi), np.exp(state.xi)
    m = state.beta_mag
    dx = em * (dbeta_mag * c - m * s * dbeta_arg - m * c * dxi)
    dp = ep * (dbeta_mag * s + m * c * dbeta_arg + m * s * dxi)
    return dx, dp


def quad_mean_derivative(state, spec, dxi, dbeta_mag, dbeta_arg):
    """Chain-rule derivative of ``<Q>`` with respect to the unknown parameter."""
    th = _theta(spec)
    dx, dp = mean_derivatives(state, dxi, dbeta_mag, dbeta_arg)
    return dx * np.cos(th) + dp * np.sin(th)


def quad_variance_derivative(state, spec, dxi):
    th = _theta(spec)
    return 2.0 * dxi * (-state.var_x * np.cos(th) ** 2 + state.var_p * np.sin(th) ** 2)


def qfi_pure(state, dxi, dbeta_mag, dbeta_arg):
    """Exact QFI of a one-parameter family of these states.

    With ``beta' = d beta`` the projected derivative of ``S D|0>`` has weight
    ``beta' - xi' beta*`` on one excitation and ``-xi'/sqrt 2`` on two, giving
    ``4|beta' - xi' beta*|^2 + 2 xi'^2``.
    """
    beta = state.beta
    dbeta = (dbeta_mag + 1j * state.beta_mag * dbeta_arg) * np.exp(1j * state.beta_arg)
    return 4.0 * np.abs(dbeta - dxi * np.conj(beta)) ** 2 + 2.0 * dxi ** 2
