"""Closed-form mean trajectories and the fundamental solutions xi_1, xi_2.

All functions broadcast over ``t`` (scalar or array) and are exact for the
four damping regimes.  In the expanding frame every quantity is built from
two basis functions of xi'' + Omega^2 xi = 0,

    s(t) = sin(Omega t)/Omega | t | sinh(W t)/W,     c(t) = s'(t),

so that xi_1 = -s/m and xi_2 = c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DampingRegime, InitialState, SystemParams, classify_regime


@dataclass(frozen=True)
class FundamentalPair:
    xi1: object
    xi2: object
    g1: object
    g2: object
    chi1: object
    chi2: object

    @property
    def wronskian(self):
        return self.xi2 * self.g1 - self.xi1 * self.g2


@dataclass(frozen=True)
class _Basis:
    s: np.ndarray
    c: np.ndarray
    # c - (gamma/2) s  and  Omega^2 s + (gamma/2) c, evaluated without cancellation
    e1: np.ndarray
    e2: np.ndarray


def _kind(params: SystemParams) -> str:
    regime = classify_regime(params)
    if regime is DampingRegime.APERIODIC_LIMIT:
        return "poly"
    if regime is DampingRegime.UNDER_CRITICAL:
        return "trig"
    if params.big_omega == 0.0:  # free motion with gamma = 0
        return "poly"
    return "hyp"


def basis(params: SystemParams, t) -> _Basis:
    t = np.asarray(t, dtype=float)
    hg = 0.5 * params.gamma
    kind = _kind(params)
    if kind == "poly":
        s = t.copy()
        c = np.ones_like(t)
        return _Basis(s, c, c - hg * s, np.full_like(t, hg))
    w = params.big_omega
    if kind == "trig":
        s = np.sin(w * t) / w
        c = np.cos(w * t)
        return _Basis(s, c, c - hg * s, w * w * s + hg * c)

    ep = np.exp(w * t)
    em = np.exp(-w * t)
    s = np.sinh(w * t) / w  # sinh keeps s ~ t for tiny W
    c = np.cosh(w * t)
    w0sq = params.omega0**2
    # gamma/2 - W = omega0^2 / (gamma/2 + W): no subtraction of nearly equal numbers
    e2 = 0.5 * (w0sq / (hg + w) * ep + (w + hg) * em)
    e1_direct = c - hg * s
    e1_exp = (0.5 / w) * (-w0sq / (w + hg) * ep + (w + hg) * em)
    e1 = np.where(w * np.abs(t) > 1.0, e1_exp, e1_direct)
    return _Basis(s, c, e1, e2)


def fundamental_solutions(params: SystemParams, t) -> FundamentalPair:
    """xi_i(t), their momenta g_i = -m xi_i' and chi_i = -g_i - m (gamma/2) xi_i.

    Initial values: xi_1(0) = 0, xi_1'(0) = -1/m, xi_2(0) = 1, xi_2'(0) = 0.
    """
    m = params.mass
    b = basis(params, t)
    xi1 = -b.s / m
    xi2 = b.c
    g1 = b.c
    g2 = m * params.omega_sq * b.s
    chi1 = -b.e1
    chi2 = -m * b.e2
    return FundamentalPair(*(_squeeze(v) for v in (xi1, xi2, g1, g2, chi1, chi2)))


def mean_position(params: SystemParams, init: InitialState, t):
    """Mean position eta(t) and velocity eta'(t) of the damped Newton equation.

    Returns
    -------
    eta, etadot : float or ndarray
    """
    t = np.asarray(t, dtype=float)
    g = params.gamma
    eta0, v0 = init.eta0, init.etadot0
    if classify_regime(params) is DampingRegime.FREE_MOTION:
        if g == 0.0:
            return _squeeze(eta0 + v0 * t), _squeeze(np.full_like(t, v0))
        eta = eta0 + v0 * (-np.expm1(-g * t)) / g
        return _squeeze(eta), _squeeze(v0 * np.exp(-g * t))

    b = basis(params, t)
    k = 0.5 * g * eta0 + v0
    damp = np.exp(-0.5 * g * t)
    eta = damp * (eta0 * b.c + k * b.s)
    etadot = damp * (-eta0 * b.e2 + k * b.e1)
    return _squeeze(eta), _squeeze(etadot)


def expanding_mean(params: SystemParams, init: InitialState, t):
    """xi(t) = eta(t) exp(gamma t / 2) and its derivative."""
    t = np.asarray(t, dtype=float)
    eta, etadot = mean_position(params, init, t)
    grow = np.exp(0.5 * params.gamma * t)
    return _squeeze(eta * grow), _squeeze((etadot + 0.5 * params.gamma * eta) * grow)


def mean_acceleration(params: SystemParams, init: InitialState, t):
    eta, etadot = mean_position(params, init, t)
    return -params.gamma * etadot - params.omega0**2 * eta


def _squeeze(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a
