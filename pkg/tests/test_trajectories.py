import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ermakov.model import InitialState, SystemParams
from ermakov.trajectories import expanding_mean, fundamental_solutions, mean_acceleration, mean_position

from .conftest import FREE


def test_free_motion_mean_closed_form():
    # eta = eta0 + v0 (1 - e^{-gamma t}) / gamma
    eta, etadot = mean_position(FREE, InitialState(eta0=1.0, etadot0=1.0), 1.0)
    assert eta == pytest.approx(2.0 - math.exp(-1.0), abs=1e-15)
    assert etadot == pytest.approx(math.exp(-1.0), abs=1e-15)


def test_free_motion_fundamentals_frozen():
    # values from the closed form, cross-checked against the ODE oracle
    f = fundamental_solutions(FREE, 1.0)
    assert f.xi1 == pytest.approx(-1.0421906110, abs=1e-10)
    assert f.xi2 == pytest.approx(1.1276259652, abs=1e-10)
    assert f.chi1 == pytest.approx(-0.6065306597, abs=1e-10)
    assert f.chi2 == pytest.approx(-0.3032653299, abs=1e-10)


def test_undamped_period():
    p = SystemParams(gamma=0.0, omega0=1.0)
    eta, etadot = mean_position(p, InitialState(eta0=1.0), 2 * math.pi)
    assert eta == pytest.approx(1.0, abs=1e-14)
    assert etadot == pytest.approx(0.0, abs=1e-14)


def test_initial_values(scenario):
    p, s, _ = scenario
    f = fundamental_solutions(p, 0.0)
    assert (f.xi1, f.xi2, f.g1, f.g2) == (0.0, 1.0, 1.0, 0.0)
    eta, etadot = mean_position(p, s, 0.0)
    assert eta == pytest.approx(s.eta0, abs=1e-15)
    assert etadot == pytest.approx(s.etadot0, abs=1e-15)


def test_wronskian_is_one(scenario):
    p, _, t = scenario
    assert np.max(np.abs(fundamental_solutions(p, t).wronskian - 1.0)) < 1e-9


def test_mean_satisfies_newton(scenario):
    # centered second difference of eta against -gamma eta' - omega0^2 eta
    p, s, t = scenario
    h = 1e-4
    tt = t[1:-1]
    e_p, _ = mean_position(p, s, tt + h)
    e_m, _ = mean_position(p, s, tt - h)
    e0, _ = mean_position(p, s, tt)
    acc = (e_p - 2 * e0 + e_m) / h**2
    assert np.max(np.abs(acc - mean_acceleration(p, s, tt))) < 1e-5


def test_expanding_frame(scenario):
    p, s, t = scenario
    xi, _ = expanding_mean(p, s, t)
    eta, _ = mean_position(p, s, t)
    assert np.allclose(xi, eta * np.exp(0.5 * p.gamma * t), rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(d=st.floats(min_value=1e-9, max_value=1e-4), sign=st.sampled_from([-1.0, 1.0]))
def test_continuity_across_aperiodic_limit(d, sign):
    """Trig and hyperbolic forms approach the polynomial aperiodic solution."""
    s = InitialState(eta0=1.0, etadot0=-0.5)
    t = np.linspace(0.0, 3.0, 31)
    ref, _ = mean_position(SystemParams(gamma=2.0, omega0=1.0), s, t)
    near, _ = mean_position(SystemParams(gamma=2.0, omega0=1.0 + sign * d), s, t)
    assert np.max(np.abs(near - ref)) < 50 * d


@settings(max_examples=60, deadline=None)
@given(
    gamma=st.floats(min_value=0.0, max_value=5.0),
    omega0=st.floats(min_value=0.0, max_value=5.0),
    t=st.floats(min_value=0.0, max_value=3.0),
)
def test_wronskian_property(gamma, omega0, t):
    f = fundamental_solutions(SystemParams(gamma=gamma, omega0=omega0), t)
    scale = max(1.0, abs(f.xi2 * f.g1), abs(f.xi1 * f.g2))
    assert abs(f.wronskian - 1.0) <= 1e-12 * scale
