"""Gaussian wave packets of the damped harmonic oscillator: closed-form mean
and width dynamics, Riccati/Ermakov solutions, moments, energies, the
Wigner function, and independent ODE oracles for cross-checking."""

from .model import (
    Branch,
    ConfigError,
    DampingRegime,
    InitialState,
    Moments,
    Representation,
    RiccatiValue,
    SystemParams,
    WidthState,
    classify_regime,
    validate,
)
from .observables import moments, quantum_energy, uncertainty_product
from .trajectories import fundamental_solutions, mean_position
from .width import ermakov_alpha, riccati_bernoulli, riccati_closed, transform_representation, width_state

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "ConfigError",
    "DampingRegime",
    "InitialState",
    "Moments",
    "Representation",
    "RiccatiValue",
    "SystemParams",
    "WidthState",
    "classify_regime",
    "validate",
    "moments",
    "quantum_energy",
    "uncertainty_product",
    "fundamental_solutions",
    "mean_position",
    "ermakov_alpha",
    "riccati_bernoulli",
    "riccati_closed",
    "transform_representation",
    "width_state",
]
