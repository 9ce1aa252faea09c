"""Gaussian Wigner function on a phase-space grid, its marginals, and
finite-difference residuals of the Fokker-Planck and Smoluchowski equations."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import InitialState, Moments, SystemParams
from .observables import moments
from .trajectories import mean_acceleration, mean_position
from .width import amplitudes, riccati_closed

MASS_TOL = 1e-6
DT_FACTOR = 1e-4


class GridCoverageError(ValueError):
    """The grid captures too little of the probability mass."""


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform (x, p) grid; ``values[i, j]`` belongs to (x[i], p[j])."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int = 257
    n_p: int = 257
    values: np.ndarray | None = None

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid bounds must be increasing")
        if self.n_x < 3 or self.n_p < 3:
            raise ValueError("need at least 3 points per axis")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.n_p - 1)

    def mesh(self):
        return np.meshgrid(self.x, self.p, indexing="ij")

    def with_values(self, values) -> "PhaseSpaceGrid":
        return replace(self, values=None if values is None else np.asarray(values, dtype=float))

    def refined(self, factor: int) -> "PhaseSpaceGrid":
        """Same box with the spacing divided by ``factor`` (values dropped)."""
        return replace(self, n_x=(self.n_x - 1) * factor + 1, n_p=(self.n_p - 1) * factor + 1, values=None)

    @classmethod
    def auto(cls, params: SystemParams, init: InitialState, t: float, half_width: float = 6.0, n: int = 257):
        """Box of ``half_width`` standard deviations around the mean."""
        eta, etadot = mean_position(params, init, t)
        mom = moments(params, init, t)
        sx, sp = math.sqrt(mom.sigma_x2), math.sqrt(mom.sigma_p2)
        pm = params.mass * etadot
        return cls(eta - half_width * sx, eta + half_width * sx, pm - half_width * sp, pm + half_width * sp, n, n)


def _centered(params, init, t, x, p):
    eta, etadot = mean_position(params, init, t)
    return np.asarray(x, dtype=float) - eta, np.asarray(p, dtype=float) - params.mass * etadot


def wigner_exponent(params: SystemParams, init: InitialState, t: float, x, p, form: str = "moments"):
    """Positive exponent q with W = exp(-q)/(pi hbar).

    ``moments``: (2/hbar^2)[sp2 x~^2 - 2 sxp x~ p~ + sx2 p~^2].
    ``invariant``: 2 e^{-gamma t} I(x~, p~), I written with alpha, alpha'.
    """
    xt, pt = _centered(params, init, t, x, p)
    hbar, m = params.hbar, params.mass
    if form == "moments":
        mom = moments(params, init, t)
        return 2.0 / hbar**2 * (mom.sigma_p2 * xt**2 - 2.0 * mom.sigma_xp * xt * pt + mom.sigma_x2 * pt**2)
    if form == "invariant":
        amp = amplitudes(params, init, t)
        a2 = float(amp.alpha_sq)
        alpha = math.sqrt(a2)
        red = float(amp.reduced) / alpha
        return m / hbar * ((pt * alpha / m - red * xt) ** 2 + xt**2 / a2)
    raise ValueError(f"unknown form {form!r}")


def wigner(params: SystemParams, init: InitialState, t: float, x, p, form: str = "moments"):
    """Wigner function of the Gaussian state; broadcasts over ``x`` and ``p``."""
    w = np.exp(-wigner_exponent(params, init, t, x, p, form)) / (math.pi * params.hbar)
    return float(w) if np.ndim(w) == 0 else w


def wigner_grid(params: SystemParams, init: InitialState, t: float, grid: PhaseSpaceGrid | None = None) -> PhaseSpaceGrid:
    grid = grid or PhaseSpaceGrid.auto(params, init, t)
    xx, pp = grid.mesh()
    return grid.with_values(wigner(params, init, t, xx, pp))


@dataclass(frozen=True)
class Marginals:
    x: np.ndarray
    rho_x: np.ndarray
    p: np.ndarray
    rho_p: np.ndarray
    mass_x: float
    mass_p: float


def marginals(params: SystemParams, init: InitialState, t: float, grid: PhaseSpaceGrid | None = None) -> Marginals:
    """Position and momentum densities from trapezoid integration of W.

    Raises GridCoverageError when either marginal holds less than 1 - 1e-6.
    """
    if grid is None or grid.values is None:
        grid = wigner_grid(params, init, t, grid)
    rho_x = np.trapezoid(grid.values, dx=grid.dp, axis=1)
    rho_p = np.trapezoid(grid.values, dx=grid.dx, axis=0)
    mass_x = float(np.trapezoid(rho_x, dx=grid.dx))
    mass_p = float(np.trapezoid(rho_p, dx=grid.dp))
    if min(mass_x, mass_p) < 1.0 - MASS_TOL:
        raise GridCoverageError(f"grid captures mass {min(mass_x, mass_p):.9g} < {1 - MASS_TOL}")
    return Marginals(grid.x, rho_x, grid.p, rho_p, mass_x, mass_p)


def gaussian_density(z, mean: float, var: float):
    return np.exp(-0.5 * (np.asarray(z) - mean) ** 2 / var) / math.sqrt(2.0 * math.pi * var)


@dataclass(frozen=True)
class GridMoments:
    mass: float
    mean_x: float
    mean_p: float
    moments: Moments


def grid_moments(grid: PhaseSpaceGrid) -> GridMoments:
    """Mass, means and covariance of a filled grid by 2-D trapezoid quadrature."""
    if grid.values is None:
        raise ValueError("grid has no values")
    xx, pp = grid.mesh()
    w = grid.values

    def integ(f):
        return float(np.trapezoid(np.trapezoid(f, dx=grid.dp, axis=1), dx=grid.dx))

    mass = integ(w)
    mx, mp = integ(xx * w) / mass, integ(pp * w) / mass
    dx, dp = xx - mx, pp - mp
    mom = Moments(integ(dx * dx * w) / mass, integ(dp * dp * w) / mass, integ(dx * dp * w) / mass)
    return GridMoments(mass, mx, mp, mom)


def diffusion_coefficients(params: SystemParams, init: InitialState, t):
    """D_x = gamma sigma_x^2/2 and D_p = -gamma sigma_p^2/2 (negative by construction)."""
    mom = moments(params, init, t)
    return 0.5 * params.gamma * mom.sigma_x2, -0.5 * params.gamma * mom.sigma_p2


@dataclass(frozen=True)
class Residual:
    field: np.ndarray
    max_norm: float
    d_x: float
    d_p: float


def _time_step(params, dt):
    return DT_FACTOR * params.char_time if dt is None else dt


def fokker_planck_residual(
    params: SystemParams,
    init: InitialState,
    t: float,
    grid: PhaseSpaceGrid | None = None,
    dt: float | None = None,
    drift: str = "position",
) -> Residual:
    """Centered-difference residual of

        dW/dt + (p/m) dW/dx - F dW/dp - D_x d2W/dx2 - D_p d2W/dp2 = 0

    on the grid interior (edges are set to 0).  ``drift="position"`` uses
    F = m omega0^2 x + gamma <p>, which is exact for the Gaussian family;
    ``drift="mean"`` uses m omega0^2 <x> + gamma <p>, exact only for omega0 = 0.
    """
    grid = grid or PhaseSpaceGrid.auto(params, init, t)
    dt = _time_step(params, dt)
    m, g, w2 = params.mass, params.gamma, params.omega0**2
    xx, pp = grid.mesh()
    w = wigner(params, init, t, xx, pp)
    w_t = (wigner(params, init, t + dt, xx, pp) - wigner(params, init, t - dt, xx, pp)) / (2.0 * dt)
    eta, etadot = mean_position(params, init, t)
    if drift == "position":
        force = m * w2 * xx + g * m * etadot
    elif drift == "mean":
        force = np.full_like(xx, m * w2 * eta + g * m * etadot)
    else:
        raise ValueError(f"unknown drift {drift!r}")
    d_x, d_p = diffusion_coefficients(params, init, t)
    hx, hp = grid.dx, grid.dp
    c = (slice(1, -1), slice(1, -1))
    wx = (w[2:, 1:-1] - w[:-2, 1:-1]) / (2 * hx)
    wp = (w[1:-1, 2:] - w[1:-1, :-2]) / (2 * hp)
    wxx = (w[2:, 1:-1] - 2 * w[c] + w[:-2, 1:-1]) / hx**2
    wpp = (w[1:-1, 2:] - 2 * w[c] + w[1:-1, :-2]) / hp**2
    field = np.zeros_like(w)
    field[c] = w_t[c] + pp[c] / m * wx - force[c] * wp - d_x * wxx - d_p * wpp
    return Residual(field, float(np.max(np.abs(field))), float(d_x), float(d_p))


@dataclass(frozen=True)
class Convergence:
    coarse: float
    fine: float

    @property
    def ratio(self) -> float:
        if self.fine == 0.0:
            return math.inf if self.coarse > 0 else math.nan
        return self.coarse / self.fine


def fokker_planck_convergence(
    params: SystemParams,
    init: InitialState,
    t: float,
    refine: int = 2,
    grid: PhaseSpaceGrid | None = None,
    drift: str = "position",
) -> Convergence:
    """Max-norm residual before and after dividing dx, dp and dt by ``refine``.

    A correct second-order stencil on a valid equation gives ratio ~ refine**2.
    The coarse default is 65 points per axis so that truncation dominates.
    """
    if refine < 2:
        raise ValueError("refine must be >= 2")
    grid = grid or PhaseSpaceGrid.auto(params, init, t, n=65)
    dt = 1e-2 * params.char_time
    r1 = fokker_planck_residual(params, init, t, grid, dt, drift)
    r2 = fokker_planck_residual(params, init, t, grid.refined(refine), dt / refine, drift)
    return Convergence(r1.max_norm, r2.max_norm)


def position_density(params: SystemParams, init: InitialState, t, x):
    eta, _ = mean_position(params, init, t)
    return gaussian_density(x, eta, moments(params, init, t).sigma_x2)


def smoluchowski_residual(
    params: SystemParams, init: InitialState, t: float, x, dt: float | None = None
) -> Residual:
    """Residual of d rho/dt + d(v rho)/dx - D_x d2 rho/dx2 = 0 on a uniform ``x``
    grid, with v = C_R x~ + <x>' and D_x = gamma sigma_x^2/2 (interior only)."""
    x = np.asarray(x, dtype=float)
    h = x[1] - x[0]
    dt = _time_step(params, dt)
    rho = position_density(params, init, t, x)
    rho_t = (position_density(params, init, t + dt, x) - position_density(params, init, t - dt, x)) / (2 * dt)
    eta, etadot = mean_position(params, init, t)
    c_re = float(riccati_closed(params, init, t).real_part)
    flux = (c_re * (x - eta) + etadot) * rho
    d_x = 0.5 * params.gamma * moments(params, init, t).sigma_x2
    field = np.zeros_like(rho)
    field[1:-1] = (
        rho_t[1:-1]
        + (flux[2:] - flux[:-2]) / (2 * h)
        - d_x * (rho[2:] - 2 * rho[1:-1] + rho[:-2]) / h**2
    )
    return Residual(field, float(np.max(np.abs(field))), d_x, float("nan"))


def smoluchowski_convergence(params: SystemParams, init: InitialState, t: float, refine: int = 2, n: int = 65):
    eta, _ = mean_position(params, init, t)
    sx = math.sqrt(moments(params, init, t).sigma_x2)
    dt = 1e-2 * params.char_time
    x1 = np.linspace(eta - 6 * sx, eta + 6 * sx, n)
    x2 = np.linspace(eta - 6 * sx, eta + 6 * sx, (n - 1) * refine + 1)
    return Convergence(
        smoluchowski_residual(params, init, t, x1, dt).max_norm,
        smoluchowski_residual(params, init, t, x2, dt / refine).max_norm,
    )


def momentum_velocity_field(params: SystemParams, init: InitialState, t, p, form: str = "moments"):
    """Momentum-space velocity -m omega0^2 (sigma_xp/sigma_p^2) p~ + d<p>/dt.

    ``form="riccati"`` uses the equal slope -omega0^2 C_R/|C|^2.
    """
    m, w2 = params.mass, params.omega0**2
    _, etadot = mean_position(params, init, t)
    pt = np.asarray(p, dtype=float) - m * etadot
    if form == "moments":
        mom = moments(params, init, t)
        slope = -m * w2 * mom.sigma_xp / mom.sigma_p2
    elif form == "riccati":
        c = riccati_closed(params, init, t)
        slope = -w2 * c.real_part / (c.real_part**2 + c.imag_part**2)
    else:
        raise ValueError(f"unknown form {form!r}")
    v = slope * pt + m * mean_acceleration(params, init, t)
    return float(v) if np.ndim(v) == 0 else v


def write_grid_csv(path, grid: PhaseSpaceGrid, residual: np.ndarray | None = None, mass: float | None = None) -> None:
    """Write ``x,p,w[,residual]`` rows, x outer and p inner, with a mass footer."""
    if grid.values is None:
        raise ValueError("grid has no values")
    xx, pp = grid.mesh()
    cols = [xx.ravel(), pp.ravel(), grid.values.ravel()]
    header = "x,p,w"
    if residual is not None:
        cols.append(np.asarray(residual).ravel())
        header += ",residual"
    if mass is None:
        mass = grid_moments(grid).mass
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        np.savetxt(fh, np.column_stack(cols), fmt="%.17g", delimiter=",")
        fh.write(f"# mass={mass:.17g}\n")
