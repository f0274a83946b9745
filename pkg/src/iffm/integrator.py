"""Forward integration of the augmented system and the backward kernel pass.

The forward pass integrates, for a fixed constant input u::

    x' = A x + b u          p' = A p + b
    y' = F(x, y, u)         q' = dF/dx . p + dF/dy q + dF/du
    (int y)' = y            G' = dF/dx . p + dF/du      (int q)' = q

with q(0) = 0, p(0) = 0, G(0) = 0. The kernel lambda solves
lambda' = a lambda - 1 backward from lambda(T) = 0, where a = -dF/dy.

Both passes read the solution between steps from the integrator's own
continuous extension, so boundary layers narrower than the sample spacing
are still resolved in the kernel integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core
from .errors import DomainViolation, StepFailure, UnsupportedKind, ValidationError
from .linsys import LinearSubsystem
from .motifs import X_FLOOR, InitialPolicy, MotifSpec

# bound on a * substep in the backward pass; RK4 relative defect ~ KERNEL_SUBSTEP**4 / 120
KERNEL_SUBSTEP = 0.02


@dataclass(frozen=True)
class SimConfig:
    T: float = 1.5
    rtol: float = 1e-9
    atol: float = 1e-12
    dt_max: float | None = None
    n_samples: int = 2001
    x_floor: float = X_FLOOR
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not self.T > 0:
            raise ValidationError(f"T must be positive, got {self.T!r}")
        if not 0 < self.rtol <= 1e-3:
            raise ValidationError(f"rtol must lie in (0, 1e-3], got {self.rtol!r}")
        if not 0 < self.atol <= self.rtol:
            raise ValidationError(f"atol must lie in (0, rtol], got {self.atol!r}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 64:
            raise ValidationError(f"n_samples must be an integer >= 64, got {self.n_samples!r}")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ValidationError(f"dt_max must be positive, got {self.dt_max!r}")
        if not self.x_floor > 0:
            raise ValidationError(f"x_floor must be positive, got {self.x_floor!r}")

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.T, int(self.n_samples))

    def tightened(self, factor: float = 100.0) -> "SimConfig":
        return SimConfig(self.T, self.rtol / factor, self.atol / factor, self.dt_max,
                         self.n_samples, self.x_floor, self.max_steps)

    def to_dict(self) -> dict:
        return {"T": self.T, "rtol": self.rtol, "atol": self.atol, "dt_max": self.dt_max,
                "n_samples": int(self.n_samples), "x_floor": self.x_floor}


@dataclass(eq=False)
class Trajectory:
    t: np.ndarray
    x: np.ndarray  # (N, n)
    p: np.ndarray  # (N, n)
    y: np.ndarray
    q: np.ndarray
    int_y: np.ndarray
    G: np.ndarray
    int_q: np.ndarray
    a: np.ndarray
    g: np.ndarray
    motif: MotifSpec
    u: float
    x0: np.ndarray
    y0: float
    mesh: np.ndarray = field(repr=False)
    dense: np.ndarray = field(repr=False)  # per-step continuous-extension coefficients

    @property
    def T(self) -> float:
        return float(self.t[-1])

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def n_steps(self) -> int:
        return self.mesh.shape[0] - 1

    def state(self) -> np.ndarray:
        return np.column_stack([self.x, self.p, self.y, self.q, self.int_y, self.G, self.int_q])


@dataclass(eq=False)
class KernelProfile:
    t: np.ndarray
    lam: np.ndarray
    lam_dot: np.ndarray
    integral: float  # int_0^T lambda g dt


def simulate(sys: LinearSubsystem, motif: MotifSpec, u: float, init: InitialPolicy,
             cfg: SimConfig = SimConfig(), *, mesh: np.ndarray | None = None) -> Trajectory:
    """Integrate one (motif, u, init) on [0, cfg.T].

    ``mesh`` replays a previously accepted step sequence instead of choosing
    steps adaptively; finite differences in u use it so that the truncation
    error varies smoothly with u.
    """
    if not u > 0:
        raise ValidationError(f"input must be positive, got {u!r}")
    if motif.c.shape[0] != sys.n:
        raise ValidationError(f"{motif.name}: c has length {motif.c.shape[0]}, subsystem n={sys.n}")
    x0, y0 = init.resolve(sys, motif, u)
    if not y0 >= 0:
        raise ValidationError(f"y0 must be nonnegative, got {y0!r}")
    n = sys.n
    s0 = np.zeros(2 * n + 5)
    s0[:n] = x0
    s0[2 * n] = y0
    t_grid = cfg.grid()
    dt_max = cfg.T if cfg.dt_max is None else min(cfg.dt_max, cfg.T)
    replay = np.zeros(0) if mesh is None else np.asarray(mesh, dtype=float)
    # writable copies: read-only arrays would compile a second specialisation
    status, t_status, Y, mesh_out, dense = _core.integrate(
        np.array(sys.A), np.array(sys.b), np.array(motif.c), int(motif.system),
        float(motif.d), float(motif.beta), float(motif.K), float(u), s0, float(cfg.T),
        float(cfg.rtol), float(cfg.atol), float(dt_max), float(cfg.x_floor), t_grid,
        replay, int(cfg.max_steps))
    if status == _core.STATUS_DOMAIN:
        raise DomainViolation(t_status, f"{motif.name} at u={u:g}: K + c.x fell below {cfg.x_floor:g}")
    if status == _core.STATUS_STEP_FAILURE:
        raise StepFailure(t_status, float("nan"))
    x = Y[:, :n]
    p = Y[:, n:2 * n]
    y = Y[:, 2 * n]
    a, g, _ = _core.terms_series(int(motif.system), x @ motif.c, p @ motif.c,
                                 np.ascontiguousarray(y), float(u), float(motif.d),
                                 float(motif.beta), float(motif.K))
    return Trajectory(t=t_grid, x=x, p=p, y=y, q=Y[:, 2 * n + 1], int_y=Y[:, 2 * n + 2],
                      G=Y[:, 2 * n + 3], int_q=Y[:, 2 * n + 4], a=a, g=g, motif=motif,
                      u=float(u), x0=x0, y0=y0, mesh=mesh_out, dense=dense)


def kernel(traj: Trajectory) -> KernelProfile:
    """Backward pass for lambda on the sample grid, plus the integral of lambda g."""
    mesh = traj.mesh
    pts = np.union1d(mesh, traj.t)
    step_of = np.clip(np.searchsorted(mesh, pts[:-1], side="right") - 1, 0, mesh.shape[0] - 2)
    gi = np.searchsorted(traj.t, pts[:-1])
    gi = np.minimum(gi, traj.t.shape[0] - 1)
    grid_of = np.where(traj.t[gi] == pts[:-1], gi, -1)
    m = traj.motif
    lam, integral = _core.backward_pass(
        pts, step_of.astype(np.int64), grid_of.astype(np.int64), np.array(mesh),
        np.array(traj.dense), np.array(m.c), int(m.system), float(traj.u), float(m.d),
        float(m.beta), float(m.K), KERNEL_SUBSTEP, int(traj.t.shape[0]))
    return KernelProfile(t=traj.t, lam=lam, lam_dot=traj.a * lam - 1.0, integral=float(integral))


def closed_form_scalar(kind: MotifSpec | str, u: float, x0: float, t) -> tuple:
    """Exact (x, p) for the unit scalar subsystem x' = -x + u."""
    if isinstance(kind, MotifSpec):
        vector = kind.vector
    else:
        vector = not str(kind).lower().startswith("scalar")
    if vector:
        raise UnsupportedKind(f"closed form is only available for scalar kinds, got {kind!r}")
    t = np.asarray(t, dtype=float)
    e = np.exp(-t)
    x = u + (x0 - u) * e
    p = -np.expm1(-t)
    if x.ndim == 0:
        return float(x), float(p)
    return x, p


def constant_rate_kernel(a: float, T: float, t):
    """lambda for constant a: (1 - e^{-a (T - t)}) / a."""
    t = np.asarray(t, dtype=float)
    if a == 0:
        return T - t
    return -np.expm1(-a * (T - t)) / a

