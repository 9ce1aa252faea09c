import math

import pytest

from ermakov.model import (
    Branch,
    ConfigError,
    DampingRegime,
    InitialState,
    RiccatiValue,
    SystemParams,
    classify_regime,
    validate,
)


@pytest.mark.parametrize(
    "gamma, omega0, regime",
    [
        (1.0, 0.0, DampingRegime.FREE_MOTION),
        (0.0, 0.0, DampingRegime.FREE_MOTION),
        (1.0, 1.0, DampingRegime.UNDER_CRITICAL),
        (2.0, 1.0, DampingRegime.APERIODIC_LIMIT),
        (4.0, 1.0, DampingRegime.OVER_DAMPED),
        (0.0, 3.0, DampingRegime.UNDER_CRITICAL),
    ],
)
def test_classify(gamma, omega0, regime):
    assert classify_regime(SystemParams(gamma=gamma, omega0=omega0)) is regime


def test_aperiodic_tolerance():
    # within 1e-12 relative of omega0^2 = gamma^2/4 counts as the limit
    assert classify_regime(SystemParams(gamma=2.0, omega0=1.0 + 1e-14)) is DampingRegime.APERIODIC_LIMIT
    assert classify_regime(SystemParams(gamma=2.0, omega0=1.0 + 1e-9)) is DampingRegime.UNDER_CRITICAL


@pytest.mark.parametrize(
    "params, init",
    [
        (SystemParams(mass=0.0), InitialState()),
        (SystemParams(hbar=-1.0), InitialState()),
        (SystemParams(gamma=-0.1), InitialState()),
        (SystemParams(omega0=-1.0), InitialState()),
        (SystemParams(gamma=math.nan), InitialState()),
        (SystemParams(), InitialState(alpha0=0.0)),
        (SystemParams(), InitialState(alphadot0_abs=-1.0)),
        (SystemParams(), InitialState(eta0=math.inf)),
    ],
)
def test_validate_rejects(params, init):
    with pytest.raises(ConfigError):
        validate(params, init)


def test_branch_coercion_and_rejection():
    assert InitialState(branch="minus").branch is Branch.MINUS
    with pytest.raises(ConfigError):
        InitialState(branch="sideways")


def test_zero_velocity_normalizes_branch():
    _, s = validate(SystemParams(), InitialState(alphadot0_abs=0.0, branch="minus"))
    assert s.branch is Branch.PLUS


def test_signed_velocity():
    s = InitialState(alphadot0_abs=0.5, branch="minus")
    assert s.alphadot0 == -0.5
    assert s.with_branch("plus").alphadot0 == 0.5


def test_derived_params():
    p = SystemParams(gamma=1.0, omega0=1.0)
    assert p.omega_sq == 0.75
    assert p.big_omega == pytest.approx(math.sqrt(0.75), rel=1e-15)
    assert SystemParams(gamma=4.0, omega0=1.0).char_time == 0.25


def test_riccati_value_roundtrip():
    v = RiccatiValue.from_complex(1.5 - 2j)
    assert v.value == 1.5 - 2j
