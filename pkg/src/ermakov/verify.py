"""Cross-validation and invariant checks over the shipped presets.

Each check produces a residual and a gate; the report aggregates the three
headline maxima (uncertainty-product deviation, invariant drift, oracle
mismatch) and lists failures.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import observables, oracle, phase_space, width
from .model import Branch, InitialState, Representation, SystemParams
from .scenarios import PRESETS, RunConfig, load_preset
from .trajectories import mean_position

PRODUCT_GATE = 1e-10
ORACLE_GATE = 1e-8
DRIFT_GATE = 1e-8
FORM_GATE = 1e-9
ROUTE_GATE = 1e-9
TRANSFORM_GATE = 1e-10
CONSERVATION_GATE = 1e-9
FP_RATIO_TOL = 0.10
MAX_LISTED = 100


@dataclass(frozen=True)
class Check:
    name: str
    scenario: str
    value: float
    gate: float
    kind: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value)) and self.value <= self.gate


@dataclass
class Report:
    suite: str
    checks: list[Check] = field(default_factory=list)

    def _max(self, kind):
        vals = [c.value for c in self.checks if c.kind == kind]
        return max(vals) if vals else 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failures": len(self.failures),
            "max_product_deviation": self._max("product"),
            "max_invariant_drift": self._max("invariant"),
            "max_oracle_mismatch": self._max("oracle"),
            "failures": [{**asdict(c), "passed": False} for c in self.failures[:MAX_LISTED]],
            "checks": [{**asdict(c), "passed": c.passed} for c in self.checks],
        }


def thread_count() -> int:
    env = os.environ.get("ERMAKOV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def mixed_rel(x, y) -> float:
    """max |x - y| / max(|y|, 1): relative for large values, absolute near zero."""
    x, y = np.asarray(x), np.asarray(y)
    return float(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1.0)))


def both_branches(state: InitialState) -> list[InitialState]:
    if state.alphadot0_abs == 0:
        return [state]
    return [state.with_branch(Branch.PLUS), state.with_branch(Branch.MINUS)]


def _label(cfg: RunConfig, k: int, s: InitialState) -> str:
    return f"{cfg.name}[{k}:{s.branch.value}]"


def product_deviation(params: SystemParams, state: InitialState, t) -> float:
    mom = observables.moments(params, state, t)
    return float(np.max(np.abs(observables.uncertainty_product(mom) - 0.25 * params.hbar**2)))


def moment_route_mismatch(params, state, t) -> float:
    """Table closed form against the alpha route and the amplitude route."""
    a = observables.moments(params, state, t)
    b = observables.moments(params, state, t, method="alpha")
    c = observables.moments_from_width(params, state, t)
    return max(
        mixed_rel(getattr(a, f), getattr(ref, f)) for ref in (b, c) for f in ("sigma_x2", "sigma_p2", "sigma_xp")
    )


def invariant_drift(params, state, t) -> float:
    inv = np.asarray(width.invariant_expanding(params, state, t))
    if inv[0] == 0:
        return 0.0
    return float(np.max(np.abs(inv / inv[0] - 1.0)))


def invariant_form_mismatch(params, state, t) -> float:
    rep = observables.ermakov_invariant(params, state, t)
    i_e = np.asarray(rep.i_expanding)
    if i_e[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.asarray(rep.i_moment) / i_e - 1.0)))


def oracle_mismatch(params, state, t, cfg: oracle.IntegratorConfig | None = None) -> dict[str, float]:
    """Closed forms against direct integration, per quantity."""
    cfg = cfg or oracle.IntegratorConfig()
    out = {}
    eta, etadot = mean_position(params, state, t)
    o_eta, o_etadot = oracle.integrate_mean(params, state.eta0, state.etadot0, t, cfg)
    out["mean"] = max(mixed_rel(o_eta, eta), mixed_rel(o_etadot, etadot))

    w = width.ermakov_alpha(params, state, t)
    o_a, o_ad = oracle.integrate_ermakov(params, state.alpha0, state.alphadot0, t, cfg)
    out["alpha"] = max(mixed_rel(o_a, w.alpha), mixed_rel(o_ad, w.alphadot))

    c = width.riccati_closed(params, state, t)
    o_c = oracle.integrate_riccati(params, width.initial_riccati(params, state), t, cfg)
    out["riccati"] = mixed_rel(o_c.value, c.value)

    mom = observables.moments(params, state, t)
    m0 = observables.moments(params, state, 0.0)
    o_m = oracle.integrate_moments(params, m0, t, cfg, warn=False)
    out["moments"] = max(mixed_rel(getattr(o_m, f), getattr(mom, f)) for f in ("sigma_x2", "sigma_p2", "sigma_xp"))
    out["moment_determinant"] = oracle.determinant_drift(m0, o_m)

    s3 = oracle.integrate_sigma_third_order(params, oracle.sigma_jet(params, m0), t, cfg)
    out["sigma_third_order"] = mixed_rel(s3, mom.sigma_x2)

    try:
        lam = width.complex_trajectory(params, state, t)
    except width.DegenerateInvariantError:
        return out
    l0 = complex(np.atleast_1d(lam.lambda_re)[0], np.atleast_1d(lam.lambda_im)[0])
    ld0 = complex(np.atleast_1d(lam.lambda_dot_re)[0], np.atleast_1d(lam.lambda_dot_im)[0])
    o_l, _ = oracle.integrate_linear_complex(params, l0, ld0, t, cfg)
    out["lambda"] = mixed_rel(o_l, np.asarray(lam.lambda_re) + 1j * np.asarray(lam.lambda_im))
    return out


def ck_mismatch(params, state, t, cfg=None) -> float:
    """CK Riccati from the NL map against direct CK integration."""
    c_nl = width.riccati_closed(params, state, t)
    mapped = width.transform_representation(c_nl, Representation.CK, t, params)
    c0 = width.transform_representation(width.initial_riccati(params, state), Representation.CK, 0.0, params)
    direct = oracle.integrate_riccati(params, c0, t, cfg)
    return mixed_rel(direct.value, mapped.value)


def transform_identity_mismatch(params, state, t) -> float:
    w = width.width_state(params, state, t)
    w_ck = width.transform_representation(w, Representation.CK, t, params)
    c = width.riccati_closed(params, state, t)
    c_e = width.transform_representation(c, Representation.E, t, params)
    back = width.transform_representation(w_ck, Representation.NL, t, params)
    return max(
        mixed_rel(w_ck.alpha, np.asarray(w.alpha) * np.exp(-0.5 * params.gamma * np.asarray(t))),
        mixed_rel(c_e.value, c.value + 0.5 * params.gamma),
        mixed_rel(back.alpha, w.alpha),
        mixed_rel(back.alphadot, w.alphadot),
    )


def conservation_deviation(params, state, t) -> float:
    try:
        traj = width.complex_trajectory(params, state, t)
    except width.DegenerateInvariantError:
        return 0.0
    return float(np.max(np.abs(np.asarray(traj.conservation) - 1.0)))


def _preset_checks(cfg: RunConfig, suite: str) -> list[Check]:
    t = np.linspace(cfg.time.t0, cfg.time.t1, 1000 if suite == "all" else 200)
    t10 = np.linspace(0.0, 10.0, 1001)
    t_or = t if suite == "all" else t[::10]
    p = cfg.params
    checks = []
    for k, base in enumerate(cfg.initial):
        for s in both_branches(base):
            lab = _label(cfg, k, s)
            checks.append(Check("product", lab, product_deviation(p, s, t), PRODUCT_GATE, "product"))
            checks.append(Check("moment_routes", lab, moment_route_mismatch(p, s, t), ROUTE_GATE, "route"))
            checks.append(Check("invariant_drift", lab, invariant_drift(p, s, t10), DRIFT_GATE, "invariant"))
            checks.append(Check("invariant_forms", lab, invariant_form_mismatch(p, s, t), FORM_GATE, "invariant"))
            checks.append(Check("transform_identities", lab, transform_identity_mismatch(p, s, t), TRANSFORM_GATE, "transform"))
            checks.append(Check("conservation", lab, conservation_deviation(p, s, t), CONSERVATION_GATE, "conservation"))
            for q, v in oracle_mismatch(p, s, t_or).items():
                checks.append(Check(f"oracle_{q}", lab, v, ORACLE_GATE, "oracle"))
            checks.append(Check("oracle_ck", lab, ck_mismatch(p, s, t_or), ORACLE_GATE, "oracle"))
    return checks


def _phase_space_checks() -> list[Check]:
    cfg = load_preset("fig1-free-motion")
    p, s = cfg.params, cfg.initial[1]
    lab = _label(cfg, 1, s)
    out = []
    for tt in (0.0, 1.0):
        g = phase_space.wigner_grid(p, s, tt)
        gm = phase_space.grid_moments(g)
        mom = observables.moments(p, s, tt)
        eta, etadot = mean_position(p, s, tt)
        peak = phase_space.wigner(p, s, tt, eta, p.mass * etadot)
        out.append(Check("wigner_peak", lab, abs(peak * math.pi * p.hbar - 1.0), 1e-12, "wigner"))
        out.append(Check("wigner_mass", lab, abs(gm.mass - 1.0), 1e-8, "wigner"))
        cov = max(mixed_rel(getattr(gm.moments, f), getattr(mom, f)) for f in ("sigma_x2", "sigma_p2", "sigma_xp"))
        out.append(Check("wigner_covariance", lab, cov, 1e-6, "wigner"))
        xx, pp = g.mesh()
        q1 = phase_space.wigner_exponent(p, s, tt, xx, pp)
        q2 = phase_space.wigner_exponent(p, s, tt, xx, pp, form="invariant")
        out.append(Check("wigner_exponent_forms", lab, float(np.max(np.abs(q1 - q2) / np.maximum(q2, 1.0))), 1e-10, "wigner"))
        conv = phase_space.fokker_planck_convergence(p, s, tt, 2)
        out.append(Check("fokker_planck_order", lab, abs(conv.ratio / 4.0 - 1.0), FP_RATIO_TOL, "wigner"))
        sm = phase_space.smoluchowski_convergence(p, s, tt, 2)
        out.append(Check("smoluchowski_order", lab, abs(sm.ratio / 4.0 - 1.0), FP_RATIO_TOL, "wigner"))
    return out


def run_suite(suite: str = "all", presets=PRESETS) -> Report:
    if suite not in ("all", "fast"):
        raise ValueError(f"unknown suite {suite!r}")
    cfgs = [load_preset(n) for n in presets]
    report = Report(suite)
    with ThreadPoolExecutor(max_workers=min(thread_count(), len(cfgs))) as pool:
        for checks in pool.map(lambda c: _preset_checks(c, suite), cfgs):
            report.checks.extend(checks)
    if suite == "all":
        report.checks.extend(_phase_space_checks())
    return report
