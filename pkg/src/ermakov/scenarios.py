"""Run configuration: JSON loading, validation and the shipped presets."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .model import ConfigError, InitialState, SystemParams, validate

OUTPUT_KINDS = frozenset({"moments", "energy", "invariant", "riccati", "wigner", "velocity"})
PRESETS = (
    "fig1-free-motion",
    "fig1.0-bifurcation",
    "ho-under",
    "ho-aperiodic",
    "ho-over",
    "ho-fixed-point",
)


@dataclass(frozen=True)
class TimeWindow:
    t0: float
    t1: float
    dt: float

    def samples(self) -> np.ndarray:
        """Inclusive uniform grid; t0 == t1 gives a single sample."""
        n = int(round((self.t1 - self.t0) / self.dt)) + 1
        return np.linspace(self.t0, self.t1, n) if n > 1 else np.array([self.t0])


@dataclass(frozen=True)
class WignerSpec:
    times: tuple[float, ...] = ()
    n: int = 257
    half_width: float = 6.0


@dataclass(frozen=True)
class Scan:
    variable: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    name: str
    params: SystemParams
    initial: tuple[InitialState, ...]
    time: TimeWindow
    outputs: tuple[str, ...] = ("moments", "energy", "invariant", "riccati")
    wigner_grid: WignerSpec | None = None
    scan: Scan | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def echo(self) -> dict:
        """Normalized, JSON-serializable view of the configuration."""
        d = {
            "name": self.name,
            "params": asdict(self.params),
            "initial": [{**asdict(s), "branch": s.branch.value} for s in self.initial],
            "time": asdict(self.time),
            "outputs": list(self.outputs),
        }
        if self.wigner_grid is not None:
            d["wigner_grid"] = {**asdict(self.wigner_grid), "times": list(self.wigner_grid.times)}
        if self.scan is not None:
            d["scan"] = {"variable": self.scan.variable, "values": list(self.scan.values)}
        return d


def _num(d: dict, key: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ConfigError(f"missing field {key!r}")
        return float(default)
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"field {key!r} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"field {key!r} must be finite")
    return float(v)


def parse_config(d: dict, name: str = "run") -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    p = d.get("params", {})
    params = SystemParams(
        mass=_num(p, "mass", 1.0), hbar=_num(p, "hbar", 1.0), gamma=_num(p, "gamma", 0.0), omega0=_num(p, "omega0", 0.0)
    )
    init_raw = d.get("initial", [{}])
    if isinstance(init_raw, dict):
        init_raw = [init_raw]
    if not init_raw:
        raise ConfigError("at least one initial state is required")
    inits = []
    for s in init_raw:
        state = InitialState(
            eta0=_num(s, "eta0", 0.0),
            etadot0=_num(s, "etadot0", 0.0),
            alpha0=_num(s, "alpha0", 1.0),
            alphadot0_abs=_num(s, "alphadot0_abs", 0.0),
            branch=s.get("branch", "plus"),
        )
        params, state = validate(params, state)
        inits.append(state)

    tw = d.get("time", {})
    window = TimeWindow(_num(tw, "t0", 0.0), _num(tw, "t1"), _num(tw, "dt"))
    if window.dt <= 0:
        raise ConfigError("time.dt must be > 0")
    if window.t1 < window.t0:
        raise ConfigError("time.t1 must be >= time.t0")

    outputs = tuple(d.get("outputs", RunConfig.outputs))
    unknown = set(outputs) - OUTPUT_KINDS
    if unknown:
        raise ConfigError(f"unknown outputs {sorted(unknown)}")

    wg = None
    if "wigner_grid" in d:
        w = d["wigner_grid"]
        n = int(w.get("n", 257))
        if n < 3:
            raise ConfigError("wigner_grid.n must be >= 3")
        times = tuple(float(x) for x in w.get("times", [window.t0]))
        wg = WignerSpec(times, n, _num(w, "half_width", 6.0))

    scan = None
    if "scan" in d:
        s = d["scan"]
        if s.get("variable") != "gamma":
            raise ConfigError("only scan.variable = 'gamma' is supported")
        values = tuple(float(v) for v in s.get("values", []))
        if not values:
            raise ConfigError("scan.values is empty")
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ConfigError("scan values must be finite and non-negative")
        scan = Scan("gamma", values)

    return RunConfig(d.get("name", name), params, tuple(inits), window, outputs, wg, scan, d)


def load_preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("ermakov").joinpath("presets", f"{name}.json").read_text()
    return parse_config(json.loads(text), name)


def load_config(source: str | Path) -> RunConfig:
    """Load a JSON file, or a shipped preset when ``source`` names one."""
    if str(source) in PRESETS:
        return load_preset(str(source))
    path = Path(source)
    try:
        d = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"no such config file or preset: {source}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(d, path.stem)
