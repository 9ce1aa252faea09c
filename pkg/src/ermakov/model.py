"""Domain types shared by every module: system constants, initial data,
damping regimes and the small value objects passed between layers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

REGIME_RTOL = 1e-12
REGIME_FLOOR = 1e-30


class ConfigError(ValueError):
    """Raised when physical parameters or initial data are invalid."""


class Branch(str, enum.Enum):
    """Sign of the initial width velocity, alpha'(0) = +|alpha'_0| or -|alpha'_0|."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1


class DampingRegime(str, enum.Enum):
    FREE_MOTION = "free-motion"
    UNDER_CRITICAL = "under-critical"
    APERIODIC_LIMIT = "aperiodic-limit"
    OVER_DAMPED = "over-damped"


class Representation(str, enum.Enum):
    NL = "NL"  # physical (nonlinear Schroedinger) level
    CK = "CK"  # Caldirola-Kanai canonical level
    E = "E"  # expanding-coordinate canonical level


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the damped oscillator.

    Parameters
    ----------
    mass, hbar : float
        Strictly positive.
    gamma : float
        Friction coefficient, >= 0.
    omega0 : float
        Oscillator frequency, >= 0 (0 means damped free motion).
    """

    mass: float = 1.0
    hbar: float = 1.0
    gamma: float = 1.0
    omega0: float = 0.0

    @property
    def omega_sq(self) -> float:
        """Shifted squared frequency omega0**2 - gamma**2/4 (may be negative)."""
        return self.omega0**2 - 0.25 * self.gamma**2

    @property
    def big_omega(self) -> float:
        """sqrt(|omega0**2 - gamma**2/4|): Omega when under-critical, Omega~ otherwise."""
        return math.sqrt(abs(self.omega_sq))

    @property
    def char_time(self) -> float:
        return 1.0 / max(self.gamma, self.omega0, 1.0)


@dataclass(frozen=True)
class InitialState:
    """Wave-packet data at t0 = 0.

    ``alphadot0_abs`` is |alpha'_0|; ``branch`` selects its sign.
    """

    eta0: float = 0.0
    etadot0: float = 0.0
    alpha0: float = 1.0
    alphadot0_abs: float = 0.0
    branch: Branch = Branch.PLUS

    @property
    def alphadot0(self) -> float:
        return self.branch.sign * self.alphadot0_abs

    @property
    def beta0(self) -> float:
        return 1.0 / self.alpha0**2

    def __post_init__(self):
        try:
            object.__setattr__(self, "branch", Branch(self.branch))
        except ValueError as exc:
            raise ConfigError(f"unknown branch {self.branch!r}") from exc

    def with_branch(self, branch: Branch | str) -> "InitialState":
        return normalize(replace(self, branch=Branch(branch)))


@dataclass(frozen=True)
class RiccatiValue:
    real_part: object
    imag_part: object
    representation: Representation = Representation.NL

    @property
    def value(self):
        return np.asarray(self.real_part) + 1j * np.asarray(self.imag_part)

    @classmethod
    def from_complex(cls, z, representation=Representation.NL) -> "RiccatiValue":
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0:
            return cls(float(z.real), float(z.imag), Representation(representation))
        return cls(z.real, z.imag, Representation(representation))


@dataclass(frozen=True)
class WidthState:
    alpha: object
    alphadot: object
    representation: Representation = Representation.NL


@dataclass(frozen=True)
class Moments:
    sigma_x2: object
    sigma_p2: object
    sigma_xp: object


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")


def normalize(init: InitialState) -> InitialState:
    if init.alphadot0_abs == 0.0 and init.branch is not Branch.PLUS:
        return replace(init, branch=Branch.PLUS)
    return init


def validate(params: SystemParams, init: InitialState) -> tuple[SystemParams, InitialState]:
    """Check all invariants and return the (possibly branch-normalized) pair."""
    for name in ("mass", "hbar", "gamma", "omega0"):
        _check_finite(name, getattr(params, name))
    for name in ("eta0", "etadot0", "alpha0", "alphadot0_abs"):
        _check_finite(name, getattr(init, name))
    if params.mass <= 0:
        raise ConfigError("mass must be > 0")
    if params.hbar <= 0:
        raise ConfigError("hbar must be > 0")
    if params.gamma < 0:
        raise ConfigError("gamma must be >= 0")
    if params.omega0 < 0:
        raise ConfigError("omega0 must be >= 0")
    if init.alpha0 <= 0:
        raise ConfigError("alpha0 must be > 0")
    if init.alphadot0_abs < 0:
        raise ConfigError("alphadot0_abs must be >= 0")
    return params, normalize(init)


def classify_regime(params: SystemParams) -> DampingRegime:
    if params.omega0 == 0.0:
        return DampingRegime.FREE_MOTION
    w2 = params.omega0**2
    g2 = 0.25 * params.gamma**2
    if abs(w2 - g2) <= REGIME_RTOL * max(w2, g2, REGIME_FLOOR):
        return DampingRegime.APERIODIC_LIMIT
    return DampingRegime.UNDER_CRITICAL if w2 > g2 else DampingRegime.OVER_DAMPED
