import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ermakov.model import Branch, InitialState, Representation, RiccatiValue, SystemParams, WidthState
from ermakov.width import (
    DegenerateInvariantError,
    complex_trajectory,
    ermakov_alpha,
    ermakov_constants,
    initial_riccati,
    initial_riccati_from_moments,
    invariant_expanding,
    on_particular,
    riccati_bernoulli,
    riccati_closed,
    riccati_from_width,
    riccati_particular,
    transform_representation,
    width_state,
)

from .conftest import FREE, UNDER

REST = InitialState(eta0=1.0, etadot0=1.0, alpha0=1.0, alphadot0_abs=0.0)


def test_free_motion_alpha_closed_form():
    # alpha^2 = cosh^2(t/2) + 4 sinh^2(t/2) for gamma = 1, alpha0 = 1, alpha'_0 = 0
    w = ermakov_alpha(FREE, REST, 1.0)
    expected = math.sqrt(math.cosh(0.5) ** 2 + 4 * math.sinh(0.5) ** 2)
    assert w.alpha == pytest.approx(expected, rel=1e-14)
    assert w.alpha == pytest.approx(1.535480897646763, rel=1e-13)
    assert w.alphadot == pytest.approx(0.9567045049574396, rel=1e-12)


def test_free_motion_riccati_frozen():
    c = riccati_closed(FREE, REST, 1.0)
    assert c.real_part == pytest.approx(0.12306506477785517, rel=1e-12)
    assert c.imag_part == pytest.approx(0.4241418869536674, rel=1e-12)


def test_constants_discriminant():
    k = ermakov_constants(SystemParams(mass=2.0, hbar=0.5), InitialState(alpha0=1.3, alphadot0_abs=0.7))
    assert k.discriminant == pytest.approx(1.0 / 0.5**2, rel=1e-13)


def test_width_routes_agree(scenario):
    p, s, t = scenario
    a = ermakov_alpha(p, s, t)
    b = width_state(p, s, t)
    assert np.allclose(a.alpha, b.alpha, rtol=1e-12)
    assert np.allclose(a.alphadot, b.alphadot, rtol=1e-9, atol=1e-9)


def test_ermakov_equation_residual(scenario):
    p, s, t = scenario
    h = 1e-4
    tt = t[1:-1]
    a0 = np.asarray(width_state(p, s, tt).alpha)
    ap = np.asarray(width_state(p, s, tt + h).alpha)
    am = np.asarray(width_state(p, s, tt - h).alpha)
    res = (ap - 2 * a0 + am) / h**2 + p.omega_sq * a0 - a0**-3
    assert np.max(np.abs(res) / np.maximum(np.abs(a0), 1)) < 1e-5


def test_riccati_routes_agree(scenario):
    p, s, t = scenario
    closed = riccati_closed(p, s, t).value
    via_width = riccati_from_width(p, ermakov_alpha(p, s, t)).value
    assert np.max(np.abs(closed - via_width) / np.maximum(np.abs(closed), 1)) < 1e-9
    for branch in Branch:
        bern = riccati_bernoulli(p, s, branch, t).value
        assert np.max(np.abs(closed - bern) / np.maximum(np.abs(closed), 1)) < 1e-9


def test_initial_riccati_branch_sign():
    # C_R(0) = alpha'(0)/alpha0 - gamma/2 with the signed velocity
    plus = initial_riccati(FREE, InitialState(alpha0=1.0, alphadot0_abs=0.5, branch="plus"))
    minus = initial_riccati(FREE, InitialState(alpha0=1.0, alphadot0_abs=0.5, branch="minus"))
    assert (plus.real_part, plus.imag_part) == (0.0, 1.0)
    assert (minus.real_part, minus.imag_part) == (-1.0, 1.0)


def test_initial_riccati_from_moments():
    # sigma_x^2 = 0.5, sigma_xp = -0.25 -> C0 = -0.5 + i
    c = initial_riccati_from_moments(FREE, 0.5, -0.25)
    assert c.value == pytest.approx(-0.5 + 1j, abs=1e-15)


def test_particular_solutions():
    plus, minus = riccati_particular(UNDER)
    assert plus.value == pytest.approx(-0.5 + 1j * math.sqrt(0.75), abs=1e-15)
    assert minus.value == pytest.approx(-0.5 - 1j * math.sqrt(0.75), abs=1e-15)
    ap, am = riccati_particular(SystemParams(gamma=2.0, omega0=1.0))
    assert ap.value == am.value == -1.0


def test_state_on_particular_is_constant(caplog):
    # fixed-point width: C0 = -gamma/2 + i Omega equals C~+
    a_fp = 0.75 ** -0.25
    s = InitialState(alpha0=a_fp)
    assert on_particular(UNDER, s, "plus")
    with caplog.at_level(logging.INFO, logger="ermakov.width"):
        c = riccati_bernoulli(UNDER, s, "plus", np.linspace(0, 5, 6))
    assert "particular" in caplog.text
    assert np.allclose(c.value, -0.5 + 1j * math.sqrt(0.75), atol=1e-15)


def test_free_motion_bernoulli_limit():
    # k = C~ + gamma/2 = 0 for the minus particular of free motion -> V = 1/(kappa0 + t)
    c = riccati_bernoulli(FREE, REST, "minus", 1.0).value
    assert c == pytest.approx(riccati_closed(FREE, REST, 1.0).value, abs=1e-14)


def test_transform_roundtrip(scenario):
    p, s, t = scenario
    c = riccati_closed(p, s, t)
    for rep in (Representation.CK, Representation.E):
        there = transform_representation(c, rep, t, p)
        back = transform_representation(there, Representation.NL, t, p)
        assert back.representation is Representation.NL
        assert np.allclose(back.value, c.value, rtol=1e-13, atol=1e-13)
    w = width_state(p, s, t)
    ck = transform_representation(w, Representation.CK, t, p)
    assert np.allclose(ck.alpha, np.asarray(w.alpha) * np.exp(-0.5 * p.gamma * t), rtol=1e-14)
    e = transform_representation(w, "E", t, p)
    assert np.array_equal(e.alpha, w.alpha)


def test_ck_width_frozen():
    # alpha_CK = alpha e^{-gamma t/2}, applied to the input alpha = 1.535511
    w = transform_representation(WidthState(1.535511, 0.0), "CK", 1.0, FREE)
    assert w.alpha == pytest.approx(0.9313344998, abs=1e-10)


def test_ck_at_zero_equals_nl():
    c = RiccatiValue(0.3, 0.7)
    assert transform_representation(c, "CK", 0.0, UNDER).value == pytest.approx(0.3 + 0.7j)


def test_transform_rejects_untagged():
    with pytest.raises(TypeError):
        transform_representation(0.5 + 1j, "CK", 1.0, FREE)


def test_invariant_constant(scenario):
    p, s, t = scenario
    inv = np.asarray(invariant_expanding(p, s, np.linspace(0, 10, 201)))
    assert np.max(np.abs(inv / inv[0] - 1)) < 1e-12


def test_invariant_frozen():
    inv = invariant_expanding(FREE, InitialState(eta0=1.0, etadot0=0.0), np.array([0.0, 0.5, 1.0]))
    assert np.allclose(inv, 0.625, rtol=1e-14)


def test_complex_trajectory_conservation(scenario):
    p, s, t = scenario
    traj = complex_trajectory(p, s, t)
    assert np.max(np.abs(traj.conservation - 1)) < 1e-9


def test_complex_trajectory_mean_form_agrees(scenario):
    from ermakov.trajectories import mean_position

    p, s, t = scenario
    x, v = mean_position(p, s, t)
    a = complex_trajectory(p, s, t)
    b = complex_trajectory(p, s, t, mean=(x, p.mass * np.asarray(v)))
    assert np.allclose(b.lambda_tilde_re, a.lambda_tilde_re, rtol=1e-8, atol=1e-8)
    assert np.allclose(b.lambda_tilde_im, a.lambda_tilde_im, rtol=1e-12, atol=1e-12)


def test_complex_trajectory_degenerate():
    with pytest.raises(DegenerateInvariantError):
        complex_trajectory(FREE, InitialState(eta0=0.0, etadot0=0.0), 1.0)


def test_riccati_from_width_rejects_nonpositive():
    with pytest.raises(ValueError):
        riccati_from_width(FREE, WidthState(0.0, 1.0))


@settings(max_examples=60, deadline=None)
@given(
    gamma=st.floats(0.0, 3.0),
    omega0=st.floats(0.0, 3.0),
    alpha0=st.floats(0.3, 3.0),
    ad=st.floats(0.0, 2.0),
    branch=st.sampled_from(["plus", "minus"]),
    t=st.floats(0.0, 2.0),
)
def test_riccati_identity_property(gamma, omega0, alpha0, ad, branch, t):
    """C_I = 1/alpha^2 and the Riccati ODE residual vanishes."""
    p = SystemParams(gamma=gamma, omega0=omega0)
    s = InitialState(alpha0=alpha0, alphadot0_abs=ad, branch=branch)
    w = width_state(p, s, t)
    c = riccati_closed(p, s, t)
    assert c.imag_part == pytest.approx(1.0 / w.alpha**2, rel=1e-12)
    h = 1e-5
    cdot = (riccati_closed(p, s, t + h).value - riccati_closed(p, s, t - h).value) / (2 * h)
    z = c.value
    res = cdot + gamma * z + z * z + omega0**2
    assert abs(res) <= 1e-5 * max(1.0, abs(z) ** 2, omega0**2)
