"""Wave-packet width dynamics: Ermakov closed form, complex Riccati
solutions (direct and Bernoulli-linearized), the complex Newtonian
linearization and the NL/CK/E representation maps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Branch,
    DampingRegime,
    InitialState,
    Representation,
    RiccatiValue,
    SystemParams,
    WidthState,
    classify_regime,
)
from .trajectories import _squeeze, basis, expanding_mean, fundamental_solutions, mean_position

log = logging.getLogger(__name__)

V0_RTOL = 1e-14


class DegenerateInvariantError(ValueError):
    """The Ermakov invariant vanishes (mean at rest at the origin)."""


@dataclass(frozen=True)
class ErmakovConstants:
    a_const: float
    b_const: float
    c_const: float

    @property
    def discriminant(self) -> float:
        """A*B - C**2, equal to 1/hbar**2."""
        return self.a_const * self.b_const - self.c_const**2


@dataclass(frozen=True)
class ComplexTrajectory:
    lambda_tilde_re: object
    lambda_tilde_im: object
    lambda_re: object
    lambda_im: object
    lambda_dot_re: object
    lambda_dot_im: object
    phase: object
    c_norm: float

    @property
    def conservation(self):
        """Im(conj(lambda) * lambda'), which must equal 1."""
        return self.lambda_dot_im * self.lambda_re - self.lambda_dot_re * self.lambda_im


def ermakov_constants(params: SystemParams, init: InitialState) -> ErmakovConstants:
    m, hbar = params.mass, params.hbar
    a0, ad = init.alpha0, init.alphadot0_abs
    return ErmakovConstants(
        a_const=m / hbar * (ad**2 + 1.0 / a0**2),
        b_const=a0**2 / (hbar * m),
        c_const=ad * a0 / hbar,
    )


def ermakov_alpha(params: SystemParams, init: InitialState, t) -> WidthState:
    """alpha(t) and alpha'(t) from the quadratic-invariant construction.

    alpha^2 = m hbar [A xi1^2 + B xi2^2 -/+ 2 C xi1 xi2], the upper sign
    belonging to alpha'(0) = +|alpha'_0|.  alpha' comes from the matching
    product relation for alpha*alpha' in xi_i and g_i, not from differencing.
    """
    k = ermakov_constants(params, init)
    f = fundamental_solutions(params, t)
    sgn = init.branch.sign
    m, hbar = params.mass, params.hbar
    radicand = k.a_const * f.xi1**2 + k.b_const * f.xi2**2 - 2.0 * sgn * k.c_const * f.xi1 * f.xi2
    alpha = np.sqrt(m * hbar * radicand)
    alpha_alphadot = -hbar * (
        k.a_const * f.xi1 * f.g1
        + k.b_const * f.xi2 * f.g2
        - sgn * k.c_const * (f.xi1 * f.g2 + f.xi2 * f.g1)
    )
    return WidthState(_squeeze(alpha), _squeeze(alpha_alphadot / alpha))


@dataclass(frozen=True)
class _Amplitudes:
    """alpha^2 = u^2 + v^2 with u, v solutions of f'' + Omega^2 f = 0.

    du, dv are u' - (gamma/2) u and v' - (gamma/2) v, computed through the
    cancellation-free basis combinations so that long free-motion or
    overdamped runs keep full relative accuracy.
    """

    u: np.ndarray
    v: np.ndarray
    du: np.ndarray
    dv: np.ndarray

    @property
    def alpha_sq(self):
        return self.u**2 + self.v**2

    @property
    def reduced(self):
        """alpha * (alpha' - gamma alpha / 2)."""
        return self.u * self.du + self.v * self.dv


def amplitudes(params: SystemParams, init: InitialState, t) -> _Amplitudes:
    b = basis(params, t)
    a0, ad = init.alpha0, init.alphadot0
    u = a0 * b.c + ad * b.s
    v = b.s / a0
    du = -a0 * b.e2 + ad * b.e1
    dv = b.e1 / a0
    return _Amplitudes(u, v, du, dv)


def width_state(params: SystemParams, init: InitialState, t) -> WidthState:
    """alpha and alpha' through the stable amplitudes (same values as
    :func:`ermakov_alpha`, better conditioned on long runs)."""
    amp = amplitudes(params, init, t)
    alpha = np.sqrt(amp.alpha_sq)
    return WidthState(_squeeze(alpha), _squeeze(amp.reduced / alpha + 0.5 * params.gamma * alpha))


def riccati_from_width(params: SystemParams, width: WidthState) -> RiccatiValue:
    """C = alpha'/alpha - gamma/2 + i/alpha^2."""
    alpha = np.asarray(width.alpha, dtype=float)
    if np.any(alpha <= 0):
        raise ValueError("alpha must be positive")
    re = np.asarray(width.alphadot) / alpha - 0.5 * params.gamma
    im = 1.0 / alpha**2
    return RiccatiValue(_squeeze(re), _squeeze(im), Representation.NL)


def riccati_closed(params: SystemParams, init: InitialState, t) -> RiccatiValue:
    """NL Riccati solution C(t), evaluated through the stable amplitudes."""
    amp = amplitudes(params, init, t)
    a2 = amp.alpha_sq
    return RiccatiValue(_squeeze(amp.reduced / a2), _squeeze(1.0 / a2), Representation.NL)


def initial_riccati(params: SystemParams, init: InitialState) -> RiccatiValue:
    """C_0 = alpha'(0)/alpha_0 - gamma/2 + i/alpha_0^2 with the signed alpha'(0)."""
    return riccati_from_width(params, WidthState(init.alpha0, init.alphadot0))


def initial_riccati_from_moments(params: SystemParams, sigma_x2: float, sigma_xp: float) -> RiccatiValue:
    """C_0 = (sigma_xp + i hbar/2) / (m sigma_x^2)."""
    z = (sigma_xp + 0.5j * params.hbar) / (params.mass * sigma_x2)
    return RiccatiValue.from_complex(z)


def riccati_particular(params: SystemParams) -> tuple[RiccatiValue, RiccatiValue]:
    """Constant particular solutions -gamma/2 +/- sqrt(gamma^2/4 - omega0^2)."""
    root = _particular_root(params)
    hg = 0.5 * params.gamma
    return RiccatiValue.from_complex(-hg + root), RiccatiValue.from_complex(-hg - root)


def _particular_root(params: SystemParams) -> complex:
    if classify_regime(params) is DampingRegime.APERIODIC_LIMIT:
        return 0j
    d = 0.25 * params.gamma**2 - params.omega0**2
    return complex(math.sqrt(d)) if d >= 0 else 1j * math.sqrt(-d)


def bernoulli_offset(params: SystemParams, init: InitialState, particular: Branch | str = Branch.PLUS):
    """(C~, V_0 = C_0 - C~) for the chosen particular solution."""
    particular = Branch(particular)
    root = _particular_root(params)
    c_tilde = -0.5 * params.gamma + particular.sign * root
    return c_tilde, initial_riccati(params, init).value - c_tilde


def on_particular(params: SystemParams, init: InitialState, particular: Branch | str = Branch.PLUS) -> bool:
    c_tilde, v0 = bernoulli_offset(params, init, particular)
    return v0 == 0 or abs(v0) <= V0_RTOL * abs(c_tilde)


def riccati_bernoulli(params: SystemParams, init: InitialState, particular: Branch | str, t) -> RiccatiValue:
    """C(t) = C~ + V(t) with V = 1/kappa from the linearized Bernoulli equation.

    When the initial state sits on the particular solution (V_0 = 0) the
    constant C~ is returned and the event is logged.
    """
    particular = Branch(particular)
    t = np.asarray(t, dtype=float)
    c_tilde, v0 = bernoulli_offset(params, init, particular)
    if on_particular(params, init, particular):
        log.info("initial state lies on the particular solution C~=%s; C(t) is constant", c_tilde)
        return RiccatiValue.from_complex(np.full(t.shape, c_tilde, dtype=complex))

    kappa0 = 1.0 / v0
    k = c_tilde + 0.5 * params.gamma
    if k == 0:
        v = 1.0 / (kappa0 + t)
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            # pick the algebraically equivalent form whose exponential decays
            z = -2.0 * k * t
            decaying = np.exp(z) / (kappa0 - np.expm1(z) / (2.0 * k))
            growing = 1.0 / (kappa0 * np.exp(-z) + np.expm1(-z) / (2.0 * k))
        v = np.where(k.real * t >= 0, decaying, growing)
    return RiccatiValue.from_complex(c_tilde + v)


def transform_representation(value, target: Representation | str, t, params: SystemParams):
    """Map a RiccatiValue or WidthState between the NL, CK and E levels.

    C_CK = C_NL exp(gamma t), C_E = C_NL + gamma/2,
    alpha_CK = alpha_NL exp(-gamma t/2), alpha_E = alpha_NL.
    """
    target = Representation(target)
    if not isinstance(value, (RiccatiValue, WidthState)) or value.representation is None:
        raise TypeError("value must be a tagged RiccatiValue or WidthState")
    src = Representation(value.representation)
    t = np.asarray(t, dtype=float)
    g = params.gamma
    if isinstance(value, RiccatiValue):
        z = value.value
        if src is Representation.CK:
            z = z * np.exp(-g * t)
        elif src is Representation.E:
            z = z - 0.5 * g
        if target is Representation.CK:
            z = z * np.exp(g * t)
        elif target is Representation.E:
            z = z + 0.5 * g
        return RiccatiValue.from_complex(z, target)

    alpha = np.asarray(value.alpha, dtype=float)
    alphadot = np.asarray(value.alphadot, dtype=float)
    if src is Representation.CK:
        grow = np.exp(0.5 * g * t)
        alpha, alphadot = alpha * grow, alphadot * grow + 0.5 * g * alpha * grow
    if target is Representation.CK:
        shrink = np.exp(-0.5 * g * t)
        alpha, alphadot = alpha * shrink, (alphadot - 0.5 * g * alpha) * shrink
    return WidthState(_squeeze(alpha), _squeeze(alphadot), target)


def invariant_expanding(params: SystemParams, init: InitialState, t):
    """(m/2hbar) e^{gamma t} [(eta' alpha - (alpha' - gamma alpha/2) eta)^2 + (eta/alpha)^2].

    Evaluated in the expanding frame, where xi = eta e^{gamma t/2} and the
    amplitudes u, v (alpha^2 = u^2 + v^2) solve the same linear equation, so
    xi' alpha - alpha' xi = (u W[u, xi] + v W[v, xi]) / alpha with constant
    Wronskians.  This avoids the cancellation of the direct formula, which
    loses all digits on long over-damped runs.
    """
    b = basis(params, t)
    amp = amplitudes(params, init, t)
    eta0, a0, ad = init.eta0, init.alpha0, init.alphadot0
    k = 0.5 * params.gamma * eta0 + init.etadot0
    xi = eta0 * b.c + k * b.s
    w_u = a0 * k - ad * eta0
    w_v = -eta0 / a0
    bracket = ((amp.u * w_u + amp.v * w_v) ** 2 + xi**2) / amp.alpha_sq
    return _squeeze(params.mass / (2.0 * params.hbar) * bracket)


def complex_trajectory(params: SystemParams, init: InitialState, t, mean=None) -> ComplexTrajectory:
    """Solution lambda~ of the complex damped Newton equation built from the
    mean values and the width, with lambda = lambda~ exp(gamma t / 2).

    lambda_I = c xi and lambda_R = c (alpha^2 xi' - alpha alpha' xi) in the
    expanding frame, c = sqrt(m / (2 hbar I)).  By default lambda_R is
    evaluated as c (u W[u, xi] + v W[v, xi]), an exact linear combination of
    solutions that keeps Im(conj(lambda) lambda') = 1 to rounding on long runs.
    ``mean`` optionally supplies (<x>, <p>) at ``t``; the mean-value formula
    with the closed-form alpha, alpha' is then used instead.
    """
    inv0 = float(invariant_expanding(params, init, 0.0))
    if not inv0 > 0:
        raise DegenerateInvariantError("Ermakov invariant is zero: lambda~ is undefined")
    m, g = params.mass, params.gamma
    c = math.sqrt(m / (2.0 * params.hbar * inv0))
    t = np.asarray(t, dtype=float)
    grow = np.exp(0.5 * g * t)

    if mean is None:
        b = basis(params, t)
        cdot = -params.omega_sq * b.s
        eta0, a0, ad = init.eta0, init.alpha0, init.alphadot0
        k = 0.5 * g * eta0 + init.etadot0
        xi, xidot = eta0 * b.c + k * b.s, eta0 * cdot + k * b.c
        u, udot = a0 * b.c + ad * b.s, a0 * cdot + ad * b.c
        v, vdot = b.s / a0, b.c / a0
        w_u, w_v = a0 * k - ad * eta0, -eta0 / a0
        l_re, l_im = c * (u * w_u + v * w_v), c * xi
        ld_re, ld_im = c * (udot * w_u + vdot * w_v), c * xidot
        lt_re, lt_im = l_re / grow, l_im / grow
    else:
        x, p = (np.asarray(q, dtype=float) for q in mean)
        w = ermakov_alpha(params, init, t)
        alpha, alphadot = np.asarray(w.alpha), np.asarray(w.alphadot)
        lt_re = -c * alpha * alphadot * x + c / m * alpha**2 * (p + 0.5 * g * m * x)
        lt_im = c * x
        l_re, l_im = lt_re * grow, lt_im * grow
        xi, xidot = x * grow, (p / m + 0.5 * g * x) * grow
        ld_im = c * xidot
        ld_re = c * (alpha * alphadot * xidot - alphadot**2 * xi - xi / alpha**2)
    phase = np.arctan2(l_im, l_re)
    if phase.ndim:
        phase = np.unwrap(phase)
    return ComplexTrajectory(*(_squeeze(q) for q in (lt_re, lt_im, l_re, l_im, ld_re, ld_im, phase)), c)
