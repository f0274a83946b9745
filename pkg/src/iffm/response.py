"""Dose response, cumulative dose response and three estimates of its input derivative."""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import DomainViolation, StepFailure, ValidationError
from .integrator import KernelProfile, SimConfig, Trajectory, kernel, simulate
from .linsys import LinearSubsystem
from .motifs import InitialPolicy, MotifSpec

FD_REL_STEP = 1e-4
GRID_MIN, GRID_MAX, GRID_POINTS = 1e-3, 1e3, 121
STATUS_OK = "ok"
STATUS_DOMAIN = "domain-violation"
STATUS_STEP = "step-failure"

# kinds whose output derivative in u carries a 1/u^2 factor
_INVERSE_SQUARE_KINDS = (1, 4, 6, 7)

Analyzer = Callable[[Trajectory, KernelProfile], Any]


def log_grid(lo: float = GRID_MIN, hi: float = GRID_MAX, points: int = GRID_POINTS) -> np.ndarray:
    if not 0 < lo < hi or points < 2:
        raise ValidationError(f"bad grid: lo={lo!r}, hi={hi!r}, points={points!r}")
    return np.logspace(math.log10(lo), math.log10(hi), int(points))


def dose_response(traj: Trajectory) -> tuple[float, float]:
    """(DR, cDR): the final output and its co-integrated time integral."""
    return float(traj.y[-1]), float(traj.int_y[-1])


@dataclass(frozen=True)
class SweepRecord:
    u: float
    DR: float
    cDR: float
    d_cdr_q: float
    d_cdr_kernel: float
    d_cdr_fd: float
    status: str
    detail: Any = None  # analyzer output, if any

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass(eq=False)
class SweepResult:
    motif: str
    init: str
    records: list[SweepRecord]
    config: dict = field(default_factory=dict)

    COLUMNS = ("u", "DR", "cDR", "d_cdr_q", "d_cdr_kernel", "d_cdr_fd", "status")

    def column(self, name: str, ok_only: bool = False) -> np.ndarray:
        recs = [r for r in self.records if r.ok] if ok_only else self.records
        return np.array([getattr(r, name) for r in recs], dtype=float)

    @property
    def u_grid(self) -> np.ndarray:
        return self.column("u")

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.records)

    def failures(self) -> list[SweepRecord]:
        return [r for r in self.records if not r.ok]

    def identity_gap(self) -> float:
        """max |d_cdr_q - d_cdr_kernel| / (1 + |d_cdr_q|) over ok entries."""
        q = self.column("d_cdr_q", ok_only=True)
        k = self.column("d_cdr_kernel", ok_only=True)
        if q.size == 0:
            return float("nan")
        return float(np.max(np.abs(q - k) / (1.0 + np.abs(q))))

    def fd_gap(self) -> float:
        """max |d_cdr_q - d_cdr_fd| / max(|d_cdr_q|, 1e-12) over ok entries."""
        q = self.column("d_cdr_q", ok_only=True)
        f = self.column("d_cdr_fd", ok_only=True)
        if q.size == 0:
            return float("nan")
        return float(np.max(np.abs(q - f) / np.maximum(np.abs(q), 1e-12)))

    def rows(self) -> list[tuple]:
        return [(r.u, r.DR, r.cDR, r.d_cdr_q, r.d_cdr_kernel, r.d_cdr_fd, r.status)
                for r in self.records]

    def to_json(self) -> dict:
        return {"motif": self.motif, "init": self.init, "config": self.config,
                "columns": list(self.COLUMNS), "rows": [list(r) for r in self.rows()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, allow_nan=True)


def _fixed_init(init: InitialPolicy, sys: LinearSubsystem, motif: MotifSpec, u: float
                ) -> InitialPolicy:
    # the sensitivity equation starts from q(0) = 0, so perturbed runs must share y0
    x0, y0 = init.resolve(sys, motif, u)
    return InitialPolicy.explicit(x0, y0, label=init.label)


def sweep_point(sys: LinearSubsystem, motif: MotifSpec, init: InitialPolicy, cfg: SimConfig,
                u: float, analyzer: Analyzer | None = None) -> SweepRecord:
    nan = float("nan")
    try:
        traj = simulate(sys, motif, u, init, cfg)
    except DomainViolation:
        return SweepRecord(u, nan, nan, nan, nan, nan, STATUS_DOMAIN)
    except StepFailure:
        return SweepRecord(u, nan, nan, nan, nan, nan, STATUS_STEP)
    ker = kernel(traj)
    dr, cdr = dose_response(traj)
    fixed = _fixed_init(init, sys, motif, u)
    h = FD_REL_STEP * u
    try:
        # replaying the nominal steps keeps the truncation error smooth in u
        up = simulate(sys, motif, u + h, fixed, cfg, mesh=traj.mesh)
        dn = simulate(sys, motif, u - h, fixed, cfg, mesh=traj.mesh)
        fd = (up.int_y[-1] - dn.int_y[-1]) / (2 * h)
        status = STATUS_OK
    except DomainViolation:
        fd, status = nan, STATUS_DOMAIN
    detail = analyzer(traj, ker) if analyzer is not None else None
    return SweepRecord(float(u), dr, cdr, float(traj.int_q[-1]), ker.integral, float(fd),
                       status, detail)


def _point_task(args):
    return sweep_point(*args)


def _check_grid(motif: MotifSpec, grid: np.ndarray) -> None:
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("u_grid must be a nonempty 1-d sequence")
    if not np.all(grid > 0):
        raise ValidationError("u_grid entries must be positive")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("u_grid must be strictly increasing")
    if motif.system in _INVERSE_SQUARE_KINDS and grid[0] < GRID_MIN:
        warnings.warn(f"{motif.name}: inputs below {GRID_MIN:g} amplify 1/u^2 terms",
                      stacklevel=3)


def sweep_many(cases: Sequence[tuple[LinearSubsystem, MotifSpec, InitialPolicy]],
               cfg: SimConfig = SimConfig(), u_grid: Sequence[float] | None = None, *,
               jobs: int = 1, analyzer: Analyzer | None = None) -> list[SweepResult]:
    """Sweep several (subsystem, motif, init) cases over one grid.

    Every (case, u) point is an independent task; with ``jobs > 1`` they run
    in a process pool and results are reassembled in task order, so the output
    does not depend on the worker count.
    """
    grid = log_grid() if u_grid is None else np.asarray(u_grid, dtype=float)
    for _, motif, _ in cases:
        _check_grid(motif, grid)
    tasks = [(sys, motif, init, cfg, float(u), analyzer)
             for sys, motif, init in cases for u in grid]
    if jobs > 1 and len(tasks) > 1:
        # the first point runs here so forked workers inherit compiled kernels
        records = [_point_task(tasks[0])]
        rest = tasks[1:]
        workers = min(jobs, len(rest))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records += pool.map(_point_task, rest, chunksize=max(1, len(rest) // (4 * workers)))
    else:
        records = [_point_task(t) for t in tasks]
    out = []
    for i, (_, motif, init) in enumerate(cases):
        chunk = records[i * grid.size:(i + 1) * grid.size]
        out.append(SweepResult(motif=motif.name, init=init.describe(), records=chunk,
                               config=cfg.to_dict()))
    return out


def sweep(sys: LinearSubsystem, motif: MotifSpec, init: InitialPolicy,
          cfg: SimConfig = SimConfig(), u_grid: Sequence[float] | None = None, *,
          jobs: int = 1, analyzer: Analyzer | None = None) -> SweepResult:
    """Evaluate DR, cDR and the derivative estimates at every grid input."""
    return sweep_many([(sys, motif, init)], cfg, u_grid, jobs=jobs, analyzer=analyzer)[0]
