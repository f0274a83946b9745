"""Experiment configuration: a single JSON document, plus built-in presets.

Layout::

    {
      "subsystem": {"A": [[...]], "b": [...]},
      "motifs": [{"name": "iffm-1", "c": [...], "d": 1.2, "beta": 1.5, "K": 0.8,
                  "gamma": 0.8, "y0": "adapted"}],
      "inits": [{"label": "x0-1", "x0": [...]}, {"label": "ray", "v": 2.0, "y0": 1.0}],
      "T": 1.5,
      "grid": {"min": 1e-3, "max": 1e3, "points": 121, "log": true},
      "integrator": {"rtol": 1e-9, "atol": 1e-12, "n_samples": 2001, "dt_max": null},
      "output": "out"
    }

Scalar motifs always run on the unit subsystem x' = -x + u. A motif's ``y0``
policy ("adapted", "michaelis" or a number) applies to every init that does
not set its own.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, IFFMError
from .integrator import SimConfig
from .linsys import LinearSubsystem, validate
from .motifs import SEC5_BETA, SEC5_C, SEC5_D, SEC5_K, InitialPolicy, MotifSpec, make_motif
from .response import log_grid

UNIT_SCALAR = validate([[-1.0]], [1.0])

SEC5_A = [
    [-3.0, 0.8, 0.0, 0.0, 0.0],
    [0.4, -2.6, 0.7, 0.0, 0.0],
    [0.0, 0.5, -2.8, 0.6, 0.0],
    [0.0, 0.0, 0.4, -2.3, 0.7],
    [0.0, 0.0, 0.0, 0.3, -1.7],
]
SEC5_B = [1.0, 0.8, 0.9, 0.7, 0.6]
SEC5_X0 = (
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.6, 0.7, 0.8, 0.9],
    [2.0, 2.1, 2.3, 2.4, 2.5],
)
SEC5_GAMMA = 0.8

PRESETS: dict[str, dict] = {
    "paper-sec5": {
        "subsystem": {"A": SEC5_A, "b": SEC5_B},
        "motifs": [
            {"name": f"iffm-{k}", "c": list(SEC5_C), "d": SEC5_D, "beta": SEC5_BETA, "K": SEC5_K,
             "gamma": SEC5_GAMMA, "y0": "adapted" if k in (1, 3) else "michaelis"}
            for k in (1, 2, 3, 4)
        ],
        "inits": [{"label": f"x0-{i + 1}", "x0": x0} for i, x0 in enumerate(SEC5_X0)],
        "T": 1.5,
        "grid": {"min": 1e-3, "max": 1e3, "points": 121, "log": True},
        "integrator": {"rtol": 1e-9, "atol": 1e-12, "n_samples": 2001, "dt_max": None},
        "output": "out",
    },
}

_TOP_KEYS = {"subsystem", "motifs", "inits", "T", "grid", "integrator", "output"}


@dataclass(frozen=True)
class MotifEntry:
    motif: MotifSpec
    y0: str | float


@dataclass(frozen=True)
class ExperimentConfig:
    subsystem: LinearSubsystem
    motifs: tuple[MotifEntry, ...]
    inits: tuple[dict, ...]
    sim: SimConfig
    grid: np.ndarray
    output: str
    raw: dict

    def system_for(self, motif: MotifSpec) -> LinearSubsystem:
        return self.subsystem if motif.vector else UNIT_SCALAR

    def motif(self, name: str) -> MotifEntry:
        for entry in self.motifs:
            if entry.motif.name == name:
                return entry
        known = ", ".join(e.motif.name for e in self.motifs)
        raise ConfigError("motifs", f"no motif named {name!r} in this config (have: {known})")

    def policies(self, entry: MotifEntry) -> list[InitialPolicy]:
        """Initial policies for ``entry``, with the motif's y0 rule as the fallback."""
        out = []
        for i, spec in enumerate(self.inits):
            y0 = spec.get("y0", entry.y0)
            label = spec.get("label") or f"init{i + 1}"
            if "v" in spec:
                out.append(InitialPolicy.steady_ray(spec["v"], y0, label=label))
            else:
                x0 = spec["x0"] if entry.motif.vector else spec.get("x0_scalar", [1.0])
                out.append(InitialPolicy.explicit(x0, y0, label=label))
        return out

    def with_overrides(self, *, rtol: float | None = None, atol: float | None = None,
                       grid: str | None = None, output: str | None = None) -> "ExperimentConfig":
        raw = copy.deepcopy(self.raw)
        if rtol is not None:
            raw.setdefault("integrator", {})["rtol"] = rtol
        if atol is not None:
            raw.setdefault("integrator", {})["atol"] = atol
        if grid is not None:
            raw["grid"] = parse_grid_flag(grid)
        if output is not None:
            raw["output"] = output
        return from_dict(raw)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)


def parse_grid_flag(text: str) -> dict:
    """``min:max:points:log`` (last field ``log`` or ``lin``) into a grid dict."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError("grid", f"expected min:max:points:log, got {text!r}")
    try:
        lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError("grid", f"bad number in {text!r}") from exc
    flag = parts[3].strip().lower()
    if flag not in ("log", "lin", "true", "false"):
        raise ConfigError("grid", f"last field must be 'log' or 'lin', got {parts[3]!r}")
    return {"min": lo, "max": hi, "points": pts, "log": flag in ("log", "true")}


def _num(value: Any, path: str, *, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    return float(value)


def _vec(value: Any, path: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a nonempty list of numbers")
    return [_num(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _y0_rule(value: Any, path: str) -> str | float:
    if isinstance(value, str):
        if value not in ("adapted", "michaelis"):
            raise ConfigError(path, f"expected 'adapted', 'michaelis' or a number, got {value!r}")
        return value
    y0 = _num(value, path)
    if y0 < 0:
        raise ConfigError(path, f"must be nonnegative, got {y0!r}")
    return y0


def _parse_grid(raw: Any) -> np.ndarray:
    if not isinstance(raw, dict):
        raise ConfigError("grid", "expected an object")
    lo = _num(raw.get("min", 1e-3), "grid.min", positive=True)
    hi = _num(raw.get("max", 1e3), "grid.max", positive=True)
    pts = raw.get("points", 121)
    if isinstance(pts, bool) or not isinstance(pts, int) or pts < 2:
        raise ConfigError("grid.points", f"expected an integer >= 2, got {pts!r}")
    if not lo < hi:
        raise ConfigError("grid", f"min must be below max, got {lo!r} >= {hi!r}")
    use_log = raw.get("log", True)
    if not isinstance(use_log, bool):
        raise ConfigError("grid.log", f"expected true or false, got {use_log!r}")
    return log_grid(lo, hi, pts) if use_log else np.linspace(lo, hi, pts)


def from_dict(raw: Any) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("$", "configuration must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    sub = raw.get("subsystem")
    if not isinstance(sub, dict):
        raise ConfigError("subsystem", "expected an object with A and b")
    A = sub.get("A")
    if not isinstance(A, list) or not A:
        raise ConfigError("subsystem.A", "expected a nonempty list of rows")
    rows = [_vec(r, f"subsystem.A[{i}]") for i, r in enumerate(A)]
    b = _vec(sub.get("b"), "subsystem.b")
    try:
        system = validate(rows, b)
    except IFFMError as exc:
        raise ConfigError("subsystem", str(exc)) from exc

    motifs_raw = raw.get("motifs")
    if not isinstance(motifs_raw, list) or not motifs_raw:
        raise ConfigError("motifs", "expected a nonempty list")
    entries = []
    for i, m in enumerate(motifs_raw):
        path = f"motifs[{i}]"
        if not isinstance(m, dict) or not isinstance(m.get("name"), str):
            raise ConfigError(f"{path}.name", "each motif needs a string name")
        params = {}
        for key in ("d", "beta", "K", "gamma"):
            if key in m and m[key] is not None:
                params[key] = _num(m[key], f"{path}.{key}")
        if "c" in m:
            params["c"] = tuple(_vec(m["c"], f"{path}.c"))
        try:
            motif = make_motif(m["name"], **params)
        except IFFMError as exc:
            raise ConfigError(path, str(exc)) from exc
        if motif.vector and motif.c.shape[0] != system.n:
            raise ConfigError(f"{path}.c", f"length {motif.c.shape[0]} does not match n={system.n}")
        entries.append(MotifEntry(motif, _y0_rule(m.get("y0", "adapted"), f"{path}.y0")))

    inits_raw = raw.get("inits")
    if not isinstance(inits_raw, list) or not inits_raw:
        raise ConfigError("inits", "expected a nonempty list")
    inits = []
    for i, spec in enumerate(inits_raw):
        path = f"inits[{i}]"
        if not isinstance(spec, dict):
            raise ConfigError(path, "expected an object")
        clean: dict = {}
        if "label" in spec:
            if not isinstance(spec["label"], str):
                raise ConfigError(f"{path}.label", "expected a string")
            clean["label"] = spec["label"]
        if ("x0" in spec) == ("v" in spec):
            raise ConfigError(path, "give exactly one of x0 or v")
        if "x0" in spec:
            x0 = _vec(spec["x0"], f"{path}.x0")
            if len(x0) != system.n:
                raise ConfigError(f"{path}.x0", f"length {len(x0)} does not match n={system.n}")
            if min(x0) < 0:
                raise ConfigError(f"{path}.x0", "entries must be nonnegative")
            clean["x0"] = x0
        else:
            v = _num(spec["v"], f"{path}.v")
            if v < 0:
                raise ConfigError(f"{path}.v", "must be nonnegative")
            clean["v"] = v
        if "x0_scalar" in spec:
            xs = _vec(spec["x0_scalar"], f"{path}.x0_scalar")
            if len(xs) != 1 or xs[0] < 0:
                raise ConfigError(f"{path}.x0_scalar", "expected one nonnegative number")
            clean["x0_scalar"] = xs
        if "y0" in spec:
            clean["y0"] = _y0_rule(spec["y0"], f"{path}.y0")
        inits.append(clean)

    T = _num(raw.get("T", 1.5), "T", positive=True)
    integ = raw.get("integrator", {})
    if not isinstance(integ, dict):
        raise ConfigError("integrator", "expected an object")
    kwargs: dict = {"T": T}
    for key in ("rtol", "atol", "dt_max"):
        if integ.get(key) is not None:
            kwargs[key] = _num(integ[key], f"integrator.{key}", positive=True)
    if "n_samples" in integ:
        ns = integ["n_samples"]
        if isinstance(ns, bool) or not isinstance(ns, int):
            raise ConfigError("integrator.n_samples", f"expected an integer, got {ns!r}")
        kwargs["n_samples"] = ns
    try:
        sim = SimConfig(**kwargs)
    except IFFMError as exc:
        raise ConfigError("integrator", str(exc)) from exc

    output = raw.get("output", "out")
    if not isinstance(output, str) or not output:
        raise ConfigError("output", "expected a nonempty path string")
    return ExperimentConfig(system, tuple(entries), tuple(inits), sim,
                            _parse_grid(raw.get("grid", {})), output, copy.deepcopy(raw))


def load(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("$", f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return from_dict(raw)


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r} (have: {', '.join(PRESETS)})")
    return from_dict(copy.deepcopy(PRESETS[name]))
