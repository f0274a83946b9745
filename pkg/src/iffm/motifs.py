"""Catalog of output dynamics ``y' = F(x, y, u)``.

Every motif depends on ``x`` only through ``z = c.x``. The eight systems, in
their parameterised (vector) form, are::

    1  c.x/(beta u) - d y          5  -c.x y + d u
    2  c.x - d u y                 6  d - c.x y/(beta u)
    3  beta u/(K + c.x) - d y      7  1/(beta u) - d y/(K + c.x)
    4  1/(K + c.x) - d y/(beta u)  8  d - beta u y/(K + c.x)

Scalar kinds are the same expressions with c = 1, d = 1, beta = 1 and K = 0
(by default), which reproduces the monomial table of admissible motifs.
The four named incoherent feedforward motifs are vector systems 5, 3, 2, 4.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .errors import DomainViolation, IFFMError, ValidationError
from .linsys import LinearSubsystem, steady_state

X_FLOOR = 1e-12

# IFFM number -> system number
IFFM_SYSTEM = {1: 5, 2: 3, 3: 2, 4: 4}
SYSTEM_IFFM = {s: i for i, s in IFFM_SYSTEM.items()}

SCALAR_FORMS = {
    1: "x/u - y",
    2: "x - u*y",
    3: "u/x - y",
    4: "1/x - y/u",
    5: "u - x*y",
    6: "1 - (x/u)*y",
    7: "1/u - y/x",
    8: "1 - (u/x)*y",
}

VECTOR_FORMS = {
    1: "c.x/(beta*u) - d*y",
    2: "c.x - d*u*y",
    3: "beta*u/(K + c.x) - d*y",
    4: "1/(K + c.x) - d*y/(beta*u)",
    5: "-c.x*y + d*u",
    6: "d - c.x*y/(beta*u)",
    7: "1/(beta*u) - d*y/(K + c.x)",
    8: "d - beta*u*y/(K + c.x)",
}

# (alpha1, beta1, alpha2, beta2) exponents of y' = c x^a1 u^b1 - d x^a2 u^b2 y
EXPONENTS = {
    1: (1, -1, 0, 0),
    2: (1, 0, 0, 1),
    3: (-1, 1, 0, 0),
    4: (-1, 0, 0, -1),
    5: (0, 1, 1, 0),
    6: (0, 0, 1, -1),
    7: (0, -1, -1, 0),
    8: (0, 0, -1, 1),
}

SEC5_C = (0.9, 0.7, 0.8, 0.6, 0.5)
SEC5_D = 1.2
SEC5_BETA = 1.5
SEC5_K = 0.8


class NoSteadyState(IFFMError, ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class MotifSpec:
    system: int
    vector: bool
    c: np.ndarray
    d: float = 1.0
    beta: float = 1.0
    K: float = 0.0
    gamma: float | None = None  # accepted from configs, enters no equation

    def __post_init__(self):
        if self.system not in range(1, 9):
            raise ValidationError(f"system must be 1..8, got {self.system!r}")
        c = np.array(self.c, dtype=float).reshape(-1)
        if c.size == 0 or not np.all(c > 0):
            raise ValidationError("c must be nonempty and elementwise positive")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        if not self.d > 0:
            raise ValidationError(f"d must be positive, got {self.d!r}")
        if not self.beta > 0:
            raise ValidationError(f"beta must be positive, got {self.beta!r}")
        if self.vector and not self.K > 0:
            raise ValidationError(f"K must be positive for vector kinds, got {self.K!r}")
        if not self.K >= 0:
            raise ValidationError(f"K must be nonnegative, got {self.K!r}")

    @property
    def name(self) -> str:
        if not self.vector:
            return f"scalar-{self.system}"
        if self.system in SYSTEM_IFFM:
            return f"iffm-{SYSTEM_IFFM[self.system]}"
        return f"vec-{self.system}"

    @property
    def iffm(self) -> int | None:
        return SYSTEM_IFFM.get(self.system)

    @property
    def guarded(self) -> bool:
        return self.system in _core.GUARDED

    @property
    def equation(self) -> str:
        return (VECTOR_FORMS if self.vector else SCALAR_FORMS)[self.system]

    def params(self) -> dict:
        out = {"c": self.c.tolist(), "d": self.d, "beta": self.beta, "K": self.K}
        if self.gamma is not None:
            out["gamma"] = self.gamma
        return out

    def __repr__(self):
        return f"MotifSpec({self.name}, c={self.c.tolist()}, d={self.d}, beta={self.beta}, K={self.K})"


def canonical_names() -> list[str]:
    return ([f"scalar-{i}" for i in range(1, 9)] + [f"iffm-{i}" for i in range(1, 5)]
            + [f"vec-{i}" for i in range(1, 9)])


def parse_name(name: str) -> tuple[int, bool]:
    """Resolve a motif name to ``(system, vector)``."""
    key = name.strip().lower()
    try:
        family, num = key.rsplit("-", 1)
        num = int(num)
    except ValueError:
        num, family = -1, ""
    if family == "scalar" and 1 <= num <= 8:
        return num, False
    if family == "vec" and 1 <= num <= 8:
        return num, True
    if family == "iffm" and num in IFFM_SYSTEM:
        return IFFM_SYSTEM[num], True
    close = difflib.get_close_matches(key, canonical_names(), n=1)
    hint = f"; did you mean {close[0]!r}?" if close else ""
    raise ValidationError(f"unknown motif {name!r}{hint}")


def make_motif(name: str, **params) -> MotifSpec:
    """Build a motif by name; unspecified parameters take kind defaults.

    Scalar kinds default to c = [1], d = beta = 1, K = 0. Vector kinds default
    to the five-state benchmark parameters (c of length 5, d = 1.2,
    beta = 1.5, K = 0.8).
    """
    system, vector = parse_name(name)
    if vector:
        defaults = dict(c=SEC5_C, d=SEC5_D, beta=SEC5_BETA, K=SEC5_K)
    else:
        defaults = dict(c=(1.0,), d=1.0, beta=1.0, K=0.0)
    defaults.update({k: v for k, v in params.items() if v is not None})
    return MotifSpec(system=system, vector=vector, **defaults)


def _check_state(motif: MotifSpec, x, u: float, x_floor: float) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != motif.c.shape[0]:
        raise ValidationError(f"x has length {x.shape[0]}, c has length {motif.c.shape[0]}")
    if not u > 0:
        raise ValidationError(f"input must be positive, got {u!r}")
    z = float(motif.c @ x)
    if motif.guarded and not motif.K + z > x_floor:
        raise DomainViolation(float("nan"), f"K + c.x = {motif.K + z:.3g} <= {x_floor:g}")
    return z


def f_eval(motif: MotifSpec, x, y: float, u: float, x_floor: float = X_FLOOR) -> float:
    z = _check_state(motif, x, u, x_floor)
    return _core.motif_terms(motif.system, z, float(y), float(u), motif.d, motif.beta, motif.K)[0]


def partials(motif: MotifSpec, x, y: float, u: float,
             x_floor: float = X_FLOOR) -> tuple[np.ndarray, float, float]:
    """Analytic ``(dF/dx, dF/dy, dF/du)``."""
    z = _check_state(motif, x, u, x_floor)
    _, Fz, Fy, Fu = _core.motif_terms(motif.system, z, float(y), float(u),
                                      motif.d, motif.beta, motif.K)
    return Fz * motif.c, Fy, Fu


def a_and_g(motif: MotifSpec, x, p, y: float, u: float,
            x_floor: float = X_FLOOR) -> tuple[float, float]:
    """Decay rate ``a = -dF/dy`` and forcing ``g = dF/dx . p + dF/du`` of the q equation."""
    Fx, Fy, Fu = partials(motif, x, y, u, x_floor)
    return -Fy, float(Fx @ np.asarray(p, dtype=float)) + Fu


def y_steady(motif: MotifSpec, sys: LinearSubsystem, u: float) -> float:
    """Root in y of ``F(x_ss(u), y, u) = 0``.

    F is affine in y with a y-independent slope, so the root is
    ``F(x_ss, 0, u) / -dF/dy``.
    """
    x_ss = steady_state(sys, u)
    z = float(motif.c @ x_ss)
    F0, _, Fy, _ = _core.motif_terms(motif.system, z, 0.0, float(u), motif.d, motif.beta, motif.K)
    with np.errstate(all="ignore"):
        y = F0 / -Fy if Fy != 0 else float("nan")
    if not np.isfinite(y):
        raise NoSteadyState(f"{motif.name}: nonfinite steady output at u={u!r}")
    return float(y)


@dataclass(frozen=True)
class InitialPolicy:
    """How (x0, y0) are chosen for a run.

    ``x0_mode`` is ``"explicit"`` (use ``x0``) or ``"steady-ray"``
    (``x0 = -A^{-1} b v``). ``y0_mode`` is ``"explicit"`` (use ``y0``),
    ``"adapted"`` (steady output at the run's input) or ``"michaelis"``
    (``beta / [d (K + c.x0)]``).
    """

    x0_mode: str = "explicit"
    x0: tuple[float, ...] = ()
    v: float = 0.0
    y0_mode: str = "adapted"
    y0: float = 1.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.x0_mode not in ("explicit", "steady-ray"):
            raise ValidationError(f"unknown x0 mode {self.x0_mode!r}")
        if self.y0_mode not in ("explicit", "adapted", "michaelis"):
            raise ValidationError(f"unknown y0 mode {self.y0_mode!r}")
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if self.x0_mode == "steady-ray" and not self.v >= 0:
            raise ValidationError(f"steady-ray scale must be nonnegative, got {self.v!r}")
        if self.y0_mode == "explicit" and not self.y0 >= 0:
            raise ValidationError(f"y0 must be nonnegative, got {self.y0!r}")

    @classmethod
    def explicit(cls, x0, y0: float | str = "adapted", label: str = "") -> "InitialPolicy":
        if isinstance(y0, str):
            return cls("explicit", tuple(np.ravel(x0)), 0.0, y0, 1.0, label)
        return cls("explicit", tuple(np.ravel(x0)), 0.0, "explicit", float(y0), label)

    @classmethod
    def steady_ray(cls, v: float, y0: float | str = "adapted", label: str = "") -> "InitialPolicy":
        if isinstance(y0, str):
            return cls("steady-ray", (), float(v), y0, 1.0, label)
        return cls("steady-ray", (), float(v), "explicit", float(y0), label)

    def describe(self) -> str:
        if self.label:
            return self.label
        xs = f"x0=-inv(A)b*{self.v:g}" if self.x0_mode == "steady-ray" else f"x0={list(self.x0)}"
        ys = f"y0={self.y0:g}" if self.y0_mode == "explicit" else f"y0={self.y0_mode}"
        return f"{xs},{ys}"

    def resolve_x0(self, sys: LinearSubsystem) -> np.ndarray:
        if self.x0_mode == "steady-ray":
            return sys.gain() * self.v
        x0 = np.array(self.x0, dtype=float)
        if x0.shape != (sys.n,):
            raise ValidationError(f"x0 has length {x0.size}, subsystem has n={sys.n}")
        if np.any(x0 < 0):
            raise ValidationError("x0 must be elementwise nonnegative")
        return x0

    def resolve(self, sys: LinearSubsystem, motif: MotifSpec, u: float) -> tuple[np.ndarray, float]:
        x0 = self.resolve_x0(sys)
        if self.y0_mode == "explicit":
            y0 = self.y0
        elif self.y0_mode == "adapted":
            y0 = y_steady(motif, sys, u)
        else:
            w = motif.K + float(motif.c @ x0)
            if not w > 0:
                raise ValidationError("michaelis start needs K + c.x0 > 0")
            y0 = motif.beta / (motif.d * w)
        return x0, float(y0)

    def to_dict(self) -> dict:
        out: dict = {"x0_mode": self.x0_mode}
        if self.x0_mode == "explicit":
            out["x0"] = list(self.x0)
        else:
            out["v"] = self.v
        out["y0_mode"] = self.y0_mode
        if self.y0_mode == "explicit":
            out["y0"] = self.y0
        if self.label:
            out["label"] = self.label
        return out
