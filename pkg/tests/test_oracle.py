import math

import numpy as np
import pytest

from ermakov import oracle
from ermakov.model import InitialState, Moments, RiccatiValue, SystemParams
from ermakov.observables import moments
from ermakov.trajectories import mean_position
from ermakov.width import initial_riccati, riccati_closed, riccati_particular, transform_representation, width_state

from .conftest import FREE, UNDER

CFG = oracle.IntegratorConfig()


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(method="euler"),
        dict(rel_tol=1e-15),
        dict(abs_tol=0.1),
        dict(max_step=0.0),
        dict(method="rk4"),  # needs a finite step
        dict(t_span=(1.0, 1.0)),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        oracle.IntegratorConfig(**kwargs)


def test_undamped_period():
    p = SystemParams(gamma=0.0, omega0=1.0)
    eta, _ = oracle.integrate_mean(p, 1.0, 0.0, [0.0, 2 * math.pi], CFG)
    assert eta[-1] == pytest.approx(1.0, abs=1e-8)


def test_free_motion_mean():
    eta, _ = oracle.integrate_mean(FREE, 1.0, 1.0, [0.0, 1.0], CFG)
    assert eta[-1] == pytest.approx(2.0 - math.exp(-1.0), abs=1e-8)


def test_mean_sweep(scenario):
    p, s, _ = scenario
    t = np.linspace(0, 5, 100)
    eta, etadot = oracle.integrate_mean(p, s.eta0, s.etadot0, t, CFG)
    ref, ref_d = mean_position(p, s, t)
    assert np.max(np.abs(eta - ref)) < 1e-8
    assert np.max(np.abs(etadot - ref_d)) < 1e-8


def test_ermakov_free_motion():
    a, _ = oracle.integrate_ermakov(FREE, 1.0, 0.0, [0.0, 1.0], CFG)
    assert a[-1] == pytest.approx(math.sqrt(math.cosh(0.5) ** 2 + 4 * math.sinh(0.5) ** 2), abs=1e-8)


def test_ermakov_fixed_point():
    a_fp = 0.75 ** -0.25
    a, ad = oracle.integrate_ermakov(UNDER, a_fp, 0.0, np.linspace(0, 20, 41), CFG)
    assert np.max(np.abs(a - a_fp)) < 1e-9


def test_ermakov_coherent_state():
    a, _ = oracle.integrate_ermakov(SystemParams(gamma=0.0, omega0=1.0), 1.0, 0.0, np.linspace(0, 10, 11), CFG)
    assert np.max(np.abs(a - 1.0)) < 1e-12


def test_ermakov_rejects_bad_alpha():
    with pytest.raises(ValueError):
        oracle.integrate_ermakov(FREE, 0.0, 0.0, [0.0, 1.0])


def test_ermakov_matches_closed(scenario):
    p, s, t = scenario
    a, ad = oracle.integrate_ermakov(p, s.alpha0, s.alphadot0, t, CFG)
    w = width_state(p, s, t)
    assert np.max(np.abs(a - w.alpha) / np.maximum(w.alpha, 1)) < 1e-8
    assert np.max(np.abs(ad - w.alphadot) / np.maximum(np.abs(w.alphadot), 1)) < 1e-8


def test_riccati_particular_constant():
    plus, _ = riccati_particular(UNDER)
    c = oracle.integrate_riccati(UNDER, plus, np.linspace(0, 5, 6), CFG)
    assert np.max(np.abs(c.value - plus.value)) < 1e-12


def test_riccati_free_motion_cross_check():
    c = oracle.integrate_riccati(FREE, RiccatiValue(-0.5, 1.0), [0.0, 1.0], CFG)
    ref = riccati_closed(FREE, InitialState(alpha0=1.0), 1.0)
    assert c.value[-1] == pytest.approx(ref.value, abs=1e-8)


def test_riccati_ck_matches_map(scenario):
    p, s, t = scenario
    c0 = transform_representation(initial_riccati(p, s), "CK", 0.0, p)
    direct = oracle.integrate_riccati(p, c0, t, CFG)
    mapped = transform_representation(riccati_closed(p, s, t), "CK", t, p)
    assert np.max(np.abs(direct.value - mapped.value) / np.maximum(np.abs(mapped.value), 1)) < 1e-8


def test_riccati_rejects_e_representation():
    with pytest.raises(ValueError):
        oracle.integrate_riccati(FREE, RiccatiValue(0.0, 1.0, "E"), [0.0, 1.0])


def test_moments_determinant():
    m = oracle.integrate_moments(FREE, Moments(0.5, 0.625, -0.25), np.linspace(0, 5, 51), CFG)
    det = m.sigma_x2 * m.sigma_p2 - m.sigma_xp**2
    assert np.max(np.abs(det - 0.25)) < 1e-9


def test_moments_table_t1():
    m = oracle.integrate_moments(FREE, Moments(0.5, 0.625, -0.25), [0.0, 1.0], CFG)
    ref = moments(FREE, InitialState(alpha0=1.0), 1.0)
    assert m.sigma_x2[-1] == pytest.approx(ref.sigma_x2, abs=1e-8)
    assert m.sigma_p2[-1] == pytest.approx(ref.sigma_p2, abs=1e-8)
    assert m.sigma_xp[-1] == pytest.approx(ref.sigma_xp, abs=1e-8)


def test_moments_fixed_point_constant():
    r3 = 1 / math.sqrt(3)
    m = oracle.integrate_moments(UNDER, Moments(r3, r3, -0.5 * r3), np.linspace(0, 10, 11), CFG)
    assert np.max(np.abs(m.sigma_x2 - r3)) < 1e-10


def test_moment_drift_is_reported(caplog):
    # a state violating the determinant identity still integrates; drift check is relative
    cfg = oracle.IntegratorConfig(method="rk4", max_step=0.5, rel_tol=1e-12)
    with caplog.at_level("WARNING", logger="ermakov.oracle"):
        oracle.integrate_moments(UNDER, Moments(0.5, 0.625, -0.25), np.linspace(0, 20, 5), cfg)
    assert "drifted" in caplog.text


def test_third_order_sigma():
    m0 = Moments(0.5, 0.625, -0.25)
    s = oracle.integrate_sigma_third_order(FREE, oracle.sigma_jet(FREE, m0), [0.0, 1.0], CFG)
    assert s[-1] == pytest.approx(0.5 * (math.cosh(0.5) ** 2 + 4 * math.sinh(0.5) ** 2), abs=1e-8)


def test_rk4_fourth_order():
    t = [0.0, 2.0]
    ref, _ = mean_position(UNDER, InitialState(eta0=1.0), 2.0)
    errs = []
    for h in (0.1, 0.05):
        eta, _ = oracle.integrate_mean(UNDER, 1.0, 0.0, t, oracle.IntegratorConfig(method="rk4", max_step=h))
        errs.append(abs(eta[-1] - ref))
    assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.1)


def test_step_underflow_reports_time():
    def rhs(t, y):
        return np.array([1.0 / (1.0 - t) ** 2])

    with pytest.raises(oracle.IntegrationError) as err:
        oracle.solve(rhs, [1.0], [0.0, 2.0], CFG)
    assert err.value.t == pytest.approx(1.0, abs=1e-3)


def test_blowup_guard():
    # C' = -C^2 with real C0 < 0 blows up at t = 1/|C0|
    with pytest.raises(oracle.IntegrationError, match="blew up"):
        oracle.integrate_riccati(SystemParams(gamma=0.0, omega0=0.0), RiccatiValue(-1.0, 0.0), [0.0, 2.0], CFG)


def test_lands_on_samples():
    t = np.array([0.0, 0.1, 0.1, 0.35, 3.0])
    y = oracle.solve(lambda _, y: -y, [1.0], t, CFG)
    assert np.allclose(y[:, 0], np.exp(-t), rtol=1e-9)
