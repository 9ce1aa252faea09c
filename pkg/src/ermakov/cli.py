"""Command-line entry point.

    ermakov simulate   --config <path|preset> --out <dir>
    ermakov scan-gamma --config <path|preset> [--out <file>]
    ermakov verify     [--suite all|fast] [--report <file>]
    ermakov wigner     --config <path|preset> [--fp-residual] [--refine N] [--out <dir>]

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, observables, phase_space, verify, width
from .model import ConfigError, DampingRegime, InitialState, SystemParams, classify_regime
from .oracle import IntegrationError
from .scenarios import PRESETS, RunConfig, load_config
from .trajectories import mean_position

log = logging.getLogger("ermakov")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

SERIES_COLUMNS = (
    "t,eta,etadot,alpha,alphadot,c_re,c_im,sigma_x2,sigma_p2,sigma_xp,"
    "product,e_total,e_quantum,i_ermakov"
)
SCAN_COLUMNS = "gamma,e_tilde_zero,e_tilde_plus,e_tilde_minus"
VELOCITY_COLUMNS = "t,tunnelling_rate,position_slope,momentum_slope,dpdt"


def _write_csv(path: Path, header: str, rows: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        np.savetxt(fh, np.atleast_2d(rows), fmt="%.17g", delimiter=",")


def time_series(params: SystemParams, state: InitialState, t) -> np.ndarray:
    """One row per sample in the order of SERIES_COLUMNS."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    eta, etadot = mean_position(params, state, t)
    w = width.width_state(params, state, t)
    c = width.riccati_closed(params, state, t)
    mom = observables.moments(params, state, t)
    energy = observables.total_energy(params, state, t)
    inv = width.invariant_expanding(params, state, t)
    cols = (
        t, eta, etadot, w.alpha, w.alphadot, c.real_part, c.imag_part,
        mom.sigma_x2, mom.sigma_p2, mom.sigma_xp, observables.uncertainty_product(mom),
        energy.e_total, energy.e_quantum, inv,
    )
    return np.column_stack([np.broadcast_to(np.asarray(col, dtype=float), t.shape) for col in cols])


def velocity_series(params: SystemParams, state: InitialState, t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    rate = np.asarray(observables.tunnelling_rate(params, state, t))
    c_re = np.asarray(width.riccati_closed(params, state, t).real_part)
    _, etadot = mean_position(params, state, t)
    pm = params.mass * np.asarray(etadot)
    dpdt = np.array([phase_space.momentum_velocity_field(params, state, ti, pi) for ti, pi in zip(t, pm)])
    slope = np.array(
        [phase_space.momentum_velocity_field(params, state, ti, pi + 1.0) - d for ti, pi, d in zip(t, pm, dpdt)]
    )
    return np.column_stack([t, rate, c_re, slope, dpdt])


def _limits(params: SystemParams, state: InitialState) -> dict:
    regime = classify_regime(params)
    out = {}
    if regime is DampingRegime.FREE_MOTION and params.gamma > 0:
        out["free_motion_product_limit"] = observables.free_motion_product_limit(params, state)
    if regime is DampingRegime.UNDER_CRITICAL:
        a_fp = observables.fixed_point_alpha(params)
        out["fixed_point_alpha0"] = a_fp
        out["at_fixed_point"] = bool(state.alphadot0_abs == 0 and math.isclose(state.alpha0, a_fp, rel_tol=1e-12))
    return out


def _stem(cfg: RunConfig, k: int) -> str:
    return cfg.name if len(cfg.initial) == 1 else f"{cfg.name}-{k}"


def simulate(cfg: RunConfig, out_dir: Path) -> tuple[list[Path], dict]:
    """Write the time series (and optional extras) for every initial state.

    Returns the written paths and the sidecar dictionary.  On any exception
    the files written so far are removed before re-raising.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    t = cfg.time.samples()
    p = cfg.params
    written: list[Path] = []
    sidecar = {
        "version": __version__,
        "config": cfg.echo(),
        "regime": classify_regime(p).value,
        "n_samples": int(t.size),
        "runs": [],
    }
    try:
        for k, state in enumerate(cfg.initial):
            stem = _stem(cfg, k)
            rows = time_series(p, state, t)
            path = out_dir / f"{stem}.csv"
            _write_csv(path, SERIES_COLUMNS, rows)
            written.append(path)
            inv = rows[:, -1]
            thermal = observables.thermal_report(p, state)
            run = {
                "file": path.name,
                "branch": state.branch.value,
                "alphadot0": state.alphadot0,
                "energy_gap0": observables.energy_gap(p, state),
                "e_quantum0": observables.quantum_energy_initial(p, state),
                "thermal": {
                    "diffusion_x0": thermal.diffusion0,
                    "kT": thermal.kT,
                    "zero_branch_excess": thermal.zero_branch_excess,
                },
                "limits": _limits(p, state),
                "max_product_deviation": float(np.max(np.abs(rows[:, 10] - 0.25 * p.hbar**2))),
                "max_invariant_drift": float(np.max(np.abs(inv / inv[0] - 1.0))) if inv[0] > 0 else 0.0,
            }
            if "velocity" in cfg.outputs:
                vpath = out_dir / f"{stem}-velocity.csv"
                _write_csv(vpath, VELOCITY_COLUMNS, velocity_series(p, state, t))
                written.append(vpath)
                run["velocity_file"] = vpath.name
            if "wigner" in cfg.outputs and cfg.wigner_grid is not None:
                run["wigner_files"] = []
                for j, tw in enumerate(cfg.wigner_grid.times):
                    gpath = out_dir / f"{stem}-wigner-{j}.csv"
                    _dump_grid(cfg, state, tw, gpath)
                    written.append(gpath)
                    run["wigner_files"].append({"file": gpath.name, "t": tw})
            sidecar["runs"].append(run)
        spath = out_dir / f"{cfg.name}.json"
        spath.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
        written.append(spath)
    except BaseException:
        for f in written:
            f.unlink(missing_ok=True)
        raise
    return written, sidecar


def _grid_for(cfg: RunConfig, state: InitialState, t: float) -> phase_space.PhaseSpaceGrid:
    gs = cfg.wigner_grid
    if gs is None:
        return phase_space.PhaseSpaceGrid.auto(cfg.params, state, t)
    return phase_space.PhaseSpaceGrid.auto(cfg.params, state, t, gs.half_width, gs.n)


def _dump_grid(cfg, state, t, path, fp_residual=False, refine=None) -> dict:
    p = cfg.params
    grid = phase_space.wigner_grid(p, state, t, _grid_for(cfg, state, t))
    marg = phase_space.marginals(p, state, t, grid)
    info = {"t": t, "peak": float(np.max(grid.values)), "peak_exact": 1.0 / (math.pi * p.hbar)}
    mass = phase_space.grid_moments(grid).mass
    info["mass"] = mass
    info["marginal_mass"] = [marg.mass_x, marg.mass_p]
    residual = None
    if fp_residual:
        res = phase_space.fokker_planck_residual(p, state, t, grid)
        residual = res.field
        info.update(fp_max_norm=res.max_norm, d_x=res.d_x, d_p=res.d_p)
        if refine:
            conv = phase_space.fokker_planck_convergence(p, state, t, refine, grid.with_values(None))
            info.update(fp_coarse=conv.coarse, fp_fine=conv.fine, fp_ratio=conv.ratio, fp_expected=refine**2)
    phase_space.write_grid_csv(path, grid, residual, mass)
    info["file"] = Path(path).name
    return info


def wigner_dump(cfg: RunConfig, out_dir: Path, fp_residual=False, refine=None) -> tuple[list[Path], list[dict]]:
    out_dir.mkdir(parents=True, exist_ok=True)
    times = cfg.wigner_grid.times if cfg.wigner_grid and cfg.wigner_grid.times else (cfg.time.t0,)
    written, infos = [], []
    try:
        for k, state in enumerate(cfg.initial):
            for j, tw in enumerate(times):
                path = out_dir / f"{_stem(cfg, k)}-wigner-{j}.csv"
                infos.append(_dump_grid(cfg, state, tw, path, fp_residual, refine))
                written.append(path)
    except BaseException:
        for f in written:
            f.unlink(missing_ok=True)
        raise
    return written, infos


def scan_gamma(cfg: RunConfig) -> np.ndarray:
    """Rows (gamma, E~ zero branch, E~ plus, E~ minus) at t0.

    The zero branch has |alpha'_0| = 0, the other two |alpha'_0| = gamma alpha0/2.
    """
    if cfg.scan is None:
        raise ConfigError("configuration has no 'scan' section")
    base = cfg.params
    a0 = cfg.initial[0].alpha0

    def row(g):
        p = SystemParams(base.mass, base.hbar, g, base.omega0)
        zero = InitialState(alpha0=a0, alphadot0_abs=0.0)
        plus = InitialState(alpha0=a0, alphadot0_abs=0.5 * g * a0, branch="plus")
        minus = InitialState(alpha0=a0, alphadot0_abs=0.5 * g * a0, branch="minus")
        return [g] + [observables.quantum_energy_initial(p, s) for s in (zero, plus, minus)]

    with ThreadPoolExecutor(max_workers=verify.thread_count()) as pool:
        return np.array(list(pool.map(row, cfg.scan.values)))


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ermakov", description="Damped Gaussian wave-packet scenarios and checks")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    presets = ", ".join(PRESETS)

    s = sub.add_parser("simulate", help="write time-series CSV and a JSON sidecar")
    s.add_argument("--config", required=True, help=f"JSON file or preset ({presets})")
    s.add_argument("--out", required=True, type=Path)

    s = sub.add_parser("scan-gamma", help="initial quantum energy of the three branches against gamma")
    s.add_argument("--config", required=True)
    s.add_argument("--out", type=Path, help="CSV file (default: stdout)")

    s = sub.add_parser("verify", help="run the cross-validation suite")
    s.add_argument("--suite", choices=("all", "fast"), default="all")
    s.add_argument("--report", type=Path, help="also write the full JSON report here")

    s = sub.add_parser("wigner", help="dump Wigner grids")
    s.add_argument("--config", required=True)
    s.add_argument("--out", type=Path, default=Path("."))
    s.add_argument("--fp-residual", action="store_true", help="add the Fokker-Planck residual column")
    s.add_argument("--refine", type=int, help="also report the residual ratio under N-fold refinement")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            cfg = load_config(args.config)
            _, side = simulate(cfg, args.out)
            bad = [r for r in side["runs"] if r["max_product_deviation"] > verify.PRODUCT_GATE]
            for r in bad:
                print(f"{r['file']}: product deviation {r['max_product_deviation']:.3g}", file=sys.stderr)
            return EXIT_FAIL if bad else EXIT_OK

        if args.command == "scan-gamma":
            rows = scan_gamma(load_config(args.config))
            if args.out:
                _write_csv(args.out, SCAN_COLUMNS, rows)
            else:
                sys.stdout.write(SCAN_COLUMNS + "\n")
                np.savetxt(sys.stdout, rows, fmt="%.17g", delimiter=",")
            return EXIT_OK

        if args.command == "verify":
            report = verify.run_suite(args.suite)
            d = report.to_dict()
            if args.report:
                args.report.write_text(json.dumps(d, indent=2) + "\n")
            d.pop("checks")
            print(json.dumps(d, indent=2))
            return EXIT_OK if report.passed else EXIT_FAIL

        if args.command == "wigner":
            if args.refine is not None and args.refine < 2:
                raise ConfigError("--refine must be >= 2")
            cfg = load_config(args.config)
            _, infos = wigner_dump(cfg, args.out, args.fp_residual, args.refine)
            print(json.dumps(infos, indent=2))
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (phase_space.GridCoverageError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_FAIL  # pragma: no cover
