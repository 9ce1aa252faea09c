"""Independent ODE integrators used to cross-check every closed form.

Nothing here imports the closed-form modules: each routine integrates
the raw differential equation from its initial data.  Complex equations
are integrated as (Re, Im) pairs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import Moments, Representation, RiccatiValue, SystemParams

log = logging.getLogger(__name__)

BLOWUP = 1e12


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t={t:.17g}")
        self.t = t


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for :func:`solve`.

    ``method`` is ``"dopri5"`` (adaptive Dormand-Prince 5(4)) or ``"rk4"``
    (classical fixed step, step length ``max_step``).
    """

    method: str = "dopri5"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = math.inf
    t_span: tuple[float, float] | None = None

    def __post_init__(self):
        if self.method not in ("dopri5", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not 1e-14 <= v <= 1e-2:
                raise ValueError(f"{name}={v} outside [1e-14, 1e-2]")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.method == "rk4" and not math.isfinite(self.max_step):
            raise ValueError("rk4 needs a finite max_step (the fixed step)")
        if self.t_span is not None and not self.t_span[1] > self.t_span[0]:
            raise ValueError("t_span must satisfy t_end > t_start")


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_BHAT = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b - bh for b, bh in zip(_B, _BHAT))


def _dopri_step(f, t, y, h, k0):
    k = [k0]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(f(t + _C[i] * h, yi))
    y_new = y + h * sum(b * kj for b, kj in zip(_B, k) if b)
    err = h * sum(e * kj for e, kj in zip(_E, k) if e)
    return y_new, err, k[6]


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def solve(f, y0, t_eval, cfg: IntegratorConfig | None = None, guard=None) -> np.ndarray:
    """Integrate y' = f(t, y) and return y at every time in ``t_eval``.

    ``t_eval`` must be non-decreasing; integration starts at ``cfg.t_span[0]``
    if given, otherwise at ``t_eval[0]``.  Steps are shortened to land on each
    sample exactly.  ``guard(t, y)`` may raise to abort the run.
    """
    cfg = cfg or IntegratorConfig()
    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    if np.any(np.diff(t_eval) < 0):
        raise ValueError("t_eval must be non-decreasing")
    t = float(cfg.t_span[0]) if cfg.t_span is not None else float(t_eval[0])
    if t_eval[0] < t:
        raise ValueError("t_eval starts before the integration start")
    y = np.array(y0, dtype=float)
    out = np.empty((t_eval.size, y.size))

    if cfg.method == "rk4":
        for j, target in enumerate(t_eval):
            span = target - t
            if span > 0:
                n = max(1, math.ceil(span / cfg.max_step - 1e-9))
                h = span / n
                for i in range(n):
                    y = _rk4_step(f, t + i * h, y, h)
                    if guard is not None:
                        guard(t + (i + 1) * h, y)
                t = float(target)
            out[j] = y
        return out

    rtol, atol = cfg.rel_tol, cfg.abs_tol
    k0 = f(t, y)
    h = _initial_step(f, t, y, k0, rtol, atol, t_eval[-1] - t)
    h = min(h, cfg.max_step)
    for j, target in enumerate(t_eval):
        while t < target:
            step = min(h, target - t)
            if step < 16 * np.finfo(float).eps * max(abs(t), 1.0):
                raise IntegrationError("step size underflow", t)
            y_new, err, k_last = _dopri_step(f, t, y, step, k0)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = math.sqrt(float(np.mean((err / scale) ** 2)))
            if not math.isfinite(err_norm):
                err_norm = math.inf
            if err_norm <= 1.0:
                t = target if step == target - t else t + step
                y, k0 = y_new, k_last
                if guard is not None:
                    guard(t, y)
                fac = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm**-0.2))
                # a step clipped to hit a sample must not shrink the next one
                h = min(cfg.max_step, max(h, step) * fac) if step < h else min(cfg.max_step, step * fac)
            else:
                h = step * max(0.2, 0.9 * err_norm**-0.2)
        out[j] = y
    return out


def _initial_step(f, t, y, k0, rtol, atol, span):
    scale = atol + rtol * np.abs(y)
    d0 = math.sqrt(float(np.mean((y / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((k0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y + h0 * k0
    d2 = math.sqrt(float(np.mean(((f(t + h0, y1) - k0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100 * h0, h1)
    return min(h, span) if span > 0 else h


def _default_cfg(cfg, t):
    if cfg is None:
        cfg = IntegratorConfig()
    if cfg.t_span is None:
        cfg = IntegratorConfig(cfg.method, cfg.rel_tol, cfg.abs_tol, cfg.max_step, (0.0, max(float(np.max(t)), 1.0)))
    return cfg


def integrate_mean(params: SystemParams, eta0: float, etadot0: float, t, cfg: IntegratorConfig | None = None):
    """eta'' + gamma eta' + omega0^2 eta = 0 from t = 0."""
    g, w2 = params.gamma, params.omega0**2

    def rhs(_, y):
        return np.array([y[1], -g * y[1] - w2 * y[0]])

    y = solve(rhs, [eta0, etadot0], t, _default_cfg(cfg, t))
    return y[:, 0], y[:, 1]


def integrate_ermakov(params: SystemParams, alpha0: float, alphadot0: float, t, cfg: IntegratorConfig | None = None):
    """alpha'' + (omega0^2 - gamma^2/4) alpha = 1/alpha^3 from t = 0."""
    if not alpha0 > 0:
        raise ValueError("alpha0 must be positive")
    cfg = _default_cfg(cfg, t)
    big_w2 = params.omega0**2 - 0.25 * params.gamma**2

    def rhs(_, y):
        return np.array([y[1], -big_w2 * y[0] + 1.0 / y[0] ** 3])

    def guard(tt, y):
        if y[0] <= cfg.abs_tol:
            raise IntegrationError("alpha collapsed towards zero", tt)

    y = solve(rhs, [alpha0, alphadot0], t, cfg, guard)
    return y[:, 0], y[:, 1]


def integrate_riccati(params: SystemParams, c0: RiccatiValue, t, cfg: IntegratorConfig | None = None) -> RiccatiValue:
    """Complex Riccati equation in the representation carried by ``c0``.

    NL: C' + gamma C + C^2 + omega0^2 = 0
    CK: C' + exp(-gamma t) C^2 + exp(gamma t) omega0^2 = 0
    """
    rep = Representation(c0.representation)
    g, w2 = params.gamma, params.omega0**2
    if rep is Representation.NL:

        def rhs(_, y):
            cr, ci = y
            return np.array([-g * cr - (cr * cr - ci * ci) - w2, -g * ci - 2.0 * cr * ci])

    elif rep is Representation.CK:

        def rhs(tt, y):
            cr, ci = y
            em, ep = math.exp(-g * tt), math.exp(g * tt)
            return np.array([-em * (cr * cr - ci * ci) - ep * w2, -em * 2.0 * cr * ci])

    else:
        raise ValueError("integrate_riccati supports the NL and CK representations")

    def guard(tt, y):
        if abs(complex(y[0], y[1])) > BLOWUP:
            raise IntegrationError("Riccati solution blew up", tt)

    y = solve(rhs, [float(c0.real_part), float(c0.imag_part)], t, _default_cfg(cfg, t), guard)
    return RiccatiValue(y[:, 0], y[:, 1], rep)


def determinant_drift(m0: Moments, traj: Moments) -> float:
    """Largest change of sx2 sp2 - sxp^2 relative to sx2 sp2 along ``traj``."""
    sx2, sp2, sxp = (np.asarray(v) for v in (traj.sigma_x2, traj.sigma_p2, traj.sigma_xp))
    det = sx2 * sp2 - sxp**2
    det0 = m0.sigma_x2 * m0.sigma_p2 - m0.sigma_xp**2
    return float(np.max(np.abs(det - det0) / np.maximum(sx2 * sp2, abs(det0))))


def integrate_moments(
    params: SystemParams, m0: Moments, t, cfg: IntegratorConfig | None = None, warn: bool = True
) -> Moments:
    """Coupled second-moment equations

    d sx2/dt = 2 sxp/m + gamma sx2
    d sp2/dt = -2 m w0^2 sxp - gamma sp2
    d sxp/dt = sp2/m - m w0^2 sx2
    """
    cfg = _default_cfg(cfg, t)
    m, g, w2 = params.mass, params.gamma, params.omega0**2

    def rhs(_, y):
        sx2, sp2, sxp = y
        return np.array([2.0 * sxp / m + g * sx2, -2.0 * m * w2 * sxp - g * sp2, sp2 / m - m * w2 * sx2])

    y = solve(rhs, [m0.sigma_x2, m0.sigma_p2, m0.sigma_xp], t, cfg)
    out = Moments(y[:, 0], y[:, 1], y[:, 2])
    drift = determinant_drift(m0, out)
    if warn and drift > 10 * cfg.rel_tol:
        log.warning("moment determinant drifted by %.3g (relative)", drift)
    return out


def sigma_jet(params: SystemParams, m0: Moments) -> tuple[float, float, float]:
    """(sx2, sx2', sx2'') at t0 obtained from the moment equations."""
    m, g, w2 = params.mass, params.gamma, params.omega0**2
    d1 = 2.0 * m0.sigma_xp / m + g * m0.sigma_x2
    dxp = m0.sigma_p2 / m - m * w2 * m0.sigma_x2
    d2 = 2.0 * dxp / m + g * d1
    return float(m0.sigma_x2), float(d1), float(d2)


def integrate_sigma_third_order(params: SystemParams, jet, t, cfg: IntegratorConfig | None = None) -> np.ndarray:
    """S''' + 4 Omega^2 S' + 4 Omega Omega' S = 0 for S = sigma_x^2 (Omega' = 0 here)."""
    big_w2 = params.omega0**2 - 0.25 * params.gamma**2

    def rhs(_, y):
        return np.array([y[1], y[2], -4.0 * big_w2 * y[1]])

    return solve(rhs, list(jet), t, _default_cfg(cfg, t))[:, 0]


def integrate_linear_complex(params: SystemParams, lam0: complex, lamdot0: complex, t, cfg: IntegratorConfig | None = None):
    """lambda'' + (omega0^2 - gamma^2/4) lambda = 0 for complex lambda."""
    big_w2 = params.omega0**2 - 0.25 * params.gamma**2

    def rhs(_, y):
        return np.array([y[2], y[3], -big_w2 * y[0], -big_w2 * y[1]])

    y = solve(rhs, [lam0.real, lam0.imag, lamdot0.real, lamdot0.imag], t, _default_cfg(cfg, t))
    return y[:, 0] + 1j * y[:, 1], y[:, 2] + 1j * y[:, 3]
