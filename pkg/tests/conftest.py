import numpy as np
import pytest

from ermakov.model import InitialState, SystemParams

FREE = SystemParams(mass=1.0, hbar=1.0, gamma=1.0, omega0=0.0)
UNDER = SystemParams(mass=1.0, hbar=1.0, gamma=1.0, omega0=1.0)
APERIODIC = SystemParams(mass=1.0, hbar=1.0, gamma=2.0, omega0=1.0)
OVER = SystemParams(mass=1.0, hbar=1.0, gamma=4.0, omega0=1.0)
UNDAMPED = SystemParams(mass=1.0, hbar=1.0, gamma=0.0, omega0=1.0)

# one representative per regime, with a moving mean so the invariant is non-zero
SCENARIOS = {
    "free": (FREE, InitialState(eta0=1.0, etadot0=1.0, alpha0=1.0, alphadot0_abs=0.5, branch="plus")),
    "under": (UNDER, InitialState(eta0=1.0, etadot0=0.0, alpha0=1.0, alphadot0_abs=0.5, branch="minus")),
    "aperiodic": (APERIODIC, InitialState(eta0=1.0, etadot0=0.3, alpha0=1.0, alphadot0_abs=0.2, branch="plus")),
    "over": (OVER, InitialState(eta0=1.0, etadot0=0.0, alpha0=1.5, alphadot0_abs=3.0, branch="plus")),
    "undamped": (UNDAMPED, InitialState(eta0=1.0, etadot0=0.0, alpha0=0.8, alphadot0_abs=0.1, branch="minus")),
}
WINDOWS = {"free": 10.0, "under": 10.0, "aperiodic": 5.0, "over": 1.5, "undamped": 10.0}


@pytest.fixture(params=sorted(SCENARIOS))
def scenario(request):
    p, s = SCENARIOS[request.param]
    return p, s, np.linspace(0.0, WINDOWS[request.param], 301)
