"""Physical outputs built on the width and mean dynamics: second moments,
energies, energy gaps, Ermakov invariants and velocity fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Branch, InitialState, Moments, SystemParams
from .trajectories import _squeeze, fundamental_solutions, mean_position
from .width import amplitudes, ermakov_alpha, invariant_expanding


@dataclass(frozen=True)
class EnergyReport:
    e_total: object
    e_quantum: object
    e_classical: object
    gap0: float


@dataclass(frozen=True)
class InvariantReport:
    i_expanding: object
    i_moment: object


@dataclass(frozen=True)
class VelocityFields:
    v_nl: object
    v_diff: object
    v_total: object
    v_tun: object


@dataclass(frozen=True)
class ThermalReport:
    """Einstein-relation reading of the initial energy gap (k defaults to 1)."""

    diffusion0: float
    temperature: float
    kT: float
    gap0: float
    zero_branch_excess: float


def moments(params: SystemParams, init: InitialState, t, method: str = "table") -> Moments:
    """Second moments of the Gaussian at time ``t``.

    ``method="table"`` evaluates the xi/g/chi closed forms, which stay
    accurate for long runs; ``method="alpha"`` uses alpha and alpha' directly,
    sigma_p^2 = (m hbar/2)[(alpha' - gamma alpha/2)^2 + 1/alpha^2].
    """
    m, hbar = params.mass, params.hbar
    if method == "alpha":
        w = ermakov_alpha(params, init, t)
        a, ad = np.asarray(w.alpha), np.asarray(w.alphadot)
        red = ad - 0.5 * params.gamma * a
        return Moments(
            _squeeze(0.5 * hbar / m * a**2),
            _squeeze(0.5 * m * hbar * (red**2 + 1.0 / a**2)),
            _squeeze(0.5 * hbar * a * red),
        )
    if method != "table":
        raise ValueError(f"unknown method {method!r}")

    f = fundamental_solutions(params, t)
    a0, ad = init.alpha0, init.alphadot0
    beta0 = init.beta0
    # u = alpha0 xi2 - m a xi1 ; m-scaled so that alpha^2 = m^2 beta0 xi1^2 + u^2
    u = a0 * f.xi2 - m * ad * f.xi1
    sx2 = 0.5 * hbar / m * (m**2 * beta0 * f.xi1**2 + u**2)
    w = a0 * f.chi2 / m - ad * f.chi1
    sp2 = 0.5 * hbar * m * (beta0 * f.chi1**2 + w**2)
    sxp = 0.5 * hbar * (
        m * (ad**2 + beta0) * f.chi1 * f.xi1
        + a0**2 / m * f.chi2 * f.xi2
        - ad * a0 * (f.chi1 * f.xi2 + f.chi2 * f.xi1)
    )
    return Moments(_squeeze(sx2), _squeeze(sp2), _squeeze(sxp))


def moments_from_width(params: SystemParams, init: InitialState, t) -> Moments:
    """Moments through the stable alpha-amplitude route (third independent form)."""
    amp = amplitudes(params, init, t)
    a2 = amp.alpha_sq
    m, hbar = params.mass, params.hbar
    return Moments(
        _squeeze(0.5 * hbar / m * a2),
        _squeeze(0.5 * m * hbar * (amp.du**2 + amp.dv**2)),
        _squeeze(0.5 * hbar * amp.reduced),
    )


def uncertainty_product(mom: Moments):
    """Schroedinger-Robertson combination sigma_x^2 sigma_p^2 - sigma_xp^2."""
    return mom.sigma_x2 * mom.sigma_p2 - mom.sigma_xp**2


def quantum_energy(params: SystemParams, init: InitialState, t, method: str = "table"):
    mom = moments(params, init, t, method=method)
    return _squeeze(0.5 * mom.sigma_p2 / params.mass + 0.5 * params.mass * params.omega0**2 * mom.sigma_x2)


def quantum_energy_initial(params: SystemParams, init: InitialState) -> float:
    """E~(t0) = (hbar/4)[(alpha'_0 - gamma alpha0/2)^2 + 1/alpha0^2 + omega0^2 alpha0^2]."""
    a0 = init.alpha0
    red = init.alphadot0 - 0.5 * params.gamma * a0
    return 0.25 * params.hbar * (red**2 + 1.0 / a0**2 + params.omega0**2 * a0**2)


def energy_gap(params: SystemParams, init: InitialState) -> float:
    """E~_minus(t0) - E~_plus(t0) = (hbar gamma / 2) |alpha'_0| alpha0."""
    return 0.5 * params.hbar * params.gamma * init.alphadot0_abs * init.alpha0


def energy_gap_from_branches(params: SystemParams, init: InitialState) -> float:
    return quantum_energy_initial(params, init.with_branch(Branch.MINUS)) - quantum_energy_initial(
        params, init.with_branch(Branch.PLUS)
    )


def diffusion_x0(params: SystemParams, init: InitialState) -> float:
    """D_x0 = gamma sigma_x0^2 / 2."""
    return 0.5 * params.gamma * 0.5 * params.hbar / params.mass * init.alpha0**2


def energy_gap_diffusion_form(params: SystemParams, init: InitialState) -> float:
    """2 m D_x0 |alpha'_0| / alpha0."""
    return 2.0 * params.mass * diffusion_x0(params, init) * init.alphadot0_abs / init.alpha0


def thermal_report(params: SystemParams, init: InitialState, k_boltzmann: float = 1.0) -> ThermalReport:
    """Read D_x0 through the Einstein relation D = kT/(m gamma).

    For |alpha'_0| = gamma alpha0/2 the gap equals kT; the |alpha'_0| = 0
    state carries hbar gamma^2 alpha0^2/16 = kT/4 above the undamped value.
    """
    d0 = diffusion_x0(params, init)
    kT = params.mass * params.gamma * d0
    excess = params.hbar * params.gamma**2 * init.alpha0**2 / 16.0
    return ThermalReport(d0, kT / k_boltzmann, kT, energy_gap(params, init), excess)


def total_energy(params: SystemParams, init: InitialState, t) -> EnergyReport:
    eta, etadot = mean_position(params, init, t)
    m = params.mass
    e_cl = 0.5 * m * np.asarray(etadot) ** 2 + 0.5 * m * params.omega0**2 * np.asarray(eta) ** 2
    e_q = np.asarray(quantum_energy(params, init, t))
    return EnergyReport(_squeeze(e_cl + e_q), _squeeze(e_q), _squeeze(e_cl), energy_gap(params, init))


def invariant_moment_form(params: SystemParams, mom: Moments, x, p, t):
    """e^{gamma t}/hbar^2 [sigma_p^2 x^2 - 2 sigma_xp x p + sigma_x^2 p^2]."""
    quad = mom.sigma_p2 * x**2 - 2.0 * mom.sigma_xp * x * p + mom.sigma_x2 * p**2
    return np.exp(params.gamma * np.asarray(t, dtype=float)) / params.hbar**2 * quad


def ermakov_invariant(params: SystemParams, init: InitialState, t) -> InvariantReport:
    eta, etadot = mean_position(params, init, t)
    mom = moments(params, init, t)
    i_mom = invariant_moment_form(params, mom, np.asarray(eta), params.mass * np.asarray(etadot), t)
    return InvariantReport(invariant_expanding(params, init, t), _squeeze(i_mom))


def tunnelling_rate(params: SystemParams, init: InitialState, t, method: str = "table"):
    """alpha'/alpha; ``table`` uses the xi/g ratio, ``alpha`` the Ermakov pair."""
    if method == "alpha":
        w = ermakov_alpha(params, init, t)
        return _squeeze(np.asarray(w.alphadot) / np.asarray(w.alpha))
    m = params.mass
    f = fundamental_solutions(params, t)
    beta0 = init.beta0
    ad, a0 = init.alphadot0, init.alpha0
    # -/+|alpha'_0| with the upper sign on the plus branch, i.e. -alpha'(0)
    gx = -ad * f.g1 + a0 / m * f.g2
    xx = -ad * f.xi1 + a0 / m * f.xi2
    num = -beta0 * f.xi1 * f.g1 - gx * xx
    den = beta0 * f.xi1**2 + xx**2
    return _squeeze(num / den / m)


def velocity_fields(params: SystemParams, init: InitialState, t, x) -> VelocityFields:
    """Probability-current velocities at position ``x``.

    v_nl = (alpha'/alpha - gamma/2) x~ + eta', v_diff = (gamma/2) x~,
    v_total = v_nl + v_diff, v_tun = (alpha'/alpha) x~.
    """
    eta, etadot = mean_position(params, init, t)
    xt = np.asarray(x, dtype=float) - eta
    rate = tunnelling_rate(params, init, t)
    v_tun = rate * xt
    v_diff = 0.5 * params.gamma * xt
    v_nl = (rate - 0.5 * params.gamma) * xt + etadot
    return VelocityFields(_squeeze(v_nl), _squeeze(v_diff), _squeeze(v_nl + v_diff), _squeeze(v_tun))


def free_motion_product_limit(params: SystemParams, init: InitialState) -> float:
    """lim sigma_x^2 sigma_p^2 as t -> infinity for damped free motion (gamma > 0)."""
    g = params.gamma
    a0, ad = init.alpha0, init.alphadot0_abs
    q = (ad**2 + 1.0 / a0**2 - 0.25 * g**2 * a0**2) / g
    return 0.25 * params.hbar**2 * (1.0 + q**2)


def free_motion_product_limit_moments(params: SystemParams, init: InitialState) -> float:
    """hbar^2/4 + (sigma_p0^2/(m gamma) + sigma_xp0)^2."""
    mom = moments(params, init, 0.0)
    return 0.25 * params.hbar**2 + (mom.sigma_p2 / (params.mass * params.gamma) + mom.sigma_xp) ** 2


def fixed_point_alpha(params: SystemParams) -> float:
    """alpha0 = Omega^{-1/2}, the stationary width of the under-critical oscillator."""
    if params.omega_sq <= 0:
        raise ValueError("fixed point exists only for omega0 > gamma/2")
    return params.big_omega**-0.5
