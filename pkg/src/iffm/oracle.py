"""Brute-force references for the engine: finite differences, Richardson
extrapolation, nested quadrature of the kernel and closed-form scalar solutions.

Every oracle that simulates runs at 100x tighter tolerances than the engine
configuration it is handed, and perturbed runs share the nominal (x0, y0).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import ValidationError
from .integrator import SimConfig, Trajectory, closed_form_scalar, constant_rate_kernel, kernel, simulate
from .linsys import LinearSubsystem
from .motifs import InitialPolicy, MotifSpec

TIGHTEN = 100.0
RICHARDSON_REL_STEP = 1e-3


@dataclass(frozen=True)
class OracleReport:
    name: str
    engine: float
    oracle: float
    tolerance: float
    relative: bool = True
    note: str = ""

    @property
    def abs_gap(self) -> float:
        return abs(self.engine - self.oracle)

    @property
    def rel_gap(self) -> float:
        return self.abs_gap / max(abs(self.oracle), 1e-300)

    @property
    def gap(self) -> float:
        return self.rel_gap if self.relative else self.abs_gap

    @property
    def passed(self) -> bool:
        return bool(self.gap <= self.tolerance)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(abs_gap=self.abs_gap, rel_gap=self.rel_gap, passed=self.passed)
        return out


def _pinned(sys: LinearSubsystem, motif: MotifSpec, u: float, init: InitialPolicy) -> InitialPolicy:
    x0, y0 = init.resolve(sys, motif, u)
    return InitialPolicy.explicit(x0, y0, label=init.label)


def fd_sensitivity(sys: LinearSubsystem, motif: MotifSpec, u: float, init: InitialPolicy,
                   cfg: SimConfig = SimConfig(), h: float | None = None) -> np.ndarray:
    """[y_{u+h}(t) - y_{u-h}(t)] / 2h on the sample grid, default h = 1e-4 max(u, 1)."""
    if h is None:
        h = 1e-4 * max(u, 1.0)
    if not 0 < h < u:
        raise ValidationError(f"need 0 < h < u, got h={h!r}, u={u!r}")
    fixed = _pinned(sys, motif, u, init)
    tight = cfg.tightened(TIGHTEN)
    up = simulate(sys, motif, u + h, fixed, tight)
    dn = simulate(sys, motif, u - h, fixed, tight)
    return (up.y - dn.y) / (2 * h)


def richardson_dcdr(sys: LinearSubsystem, motif: MotifSpec, u: float, init: InitialPolicy,
                    cfg: SimConfig = SimConfig()) -> float:
    """Fourth-order estimate of d cDR / du from central differences at h and h/2."""
    h = RICHARDSON_REL_STEP * u
    fixed = _pinned(sys, motif, u, init)
    tight = cfg.tightened(TIGHTEN)

    def central(step: float) -> float:
        up = simulate(sys, motif, u + step, fixed, tight).int_y[-1]
        dn = simulate(sys, motif, u - step, fixed, tight).int_y[-1]
        return (up - dn) / (2 * step)

    coarse = central(h)
    fine = central(h / 2)
    return float((4 * fine - coarse) / 3)


def lambda_by_quadrature(traj: Trajectory, t_probe: float) -> float:
    """Kernel at ``t_probe`` from its defining double integral.

    The stored a(t) is interpolated by a cubic spline; both the inner
    integral of a and the outer integral of the exponential are adaptive.
    """
    T = traj.T
    if not 0 <= t_probe <= T:
        raise ValidationError(f"t_probe must lie in [0, {T}], got {t_probe!r}")
    if t_probe == T:
        return 0.0
    a = CubicSpline(traj.t, traj.a)

    def weight(s: float) -> float:
        inner, _ = quad(a, t_probe, s, epsabs=1e-13, epsrel=1e-12, limit=200)
        return math.exp(-inner)

    # steep kernels concentrate their mass near t_probe
    scale = float(np.max(np.abs(traj.a)))
    points = [min(T, t_probe + k / scale) for k in (1, 5, 20)] if scale > 1 else None
    if points:
        points = sorted({p for p in points if t_probe < p < T}) or None
    outer, _ = quad(weight, t_probe, T, epsabs=1e-13, epsrel=1e-12, limit=400, points=points)
    return float(outer)


def scalar_closed_form_gap(traj: Trajectory) -> float:
    """max over samples of |engine - exact| / max(1, |exact|) for x and p."""
    x, p = closed_form_scalar(traj.motif, traj.u, float(traj.x0[0]), traj.t)
    gx = np.abs(traj.x[:, 0] - x) / np.maximum(1.0, np.abs(x))
    gp = np.abs(traj.p[:, 0] - p) / np.maximum(1.0, np.abs(p))
    return float(max(gx.max(), gp.max()))


def q_terminal_report(sys: LinearSubsystem, motif: MotifSpec, u: float, init: InitialPolicy,
                      cfg: SimConfig = SimConfig(), tol: float = 1e-5) -> OracleReport:
    traj = simulate(sys, motif, u, init, cfg)
    fd = fd_sensitivity(sys, motif, u, init, cfg)
    return OracleReport(f"q(T) vs FD [{motif.name}, u={u:g}, {init.describe()}]",
                        float(traj.q[-1]), float(fd[-1]), tol)


def richardson_report(sys: LinearSubsystem, motif: MotifSpec, u: float, init: InitialPolicy,
                      cfg: SimConfig = SimConfig(), tol: float = 1e-6) -> OracleReport:
    traj = simulate(sys, motif, u, init, cfg)
    ker = kernel(traj)
    return OracleReport(f"int lambda g vs Richardson [{motif.name}, u={u:g}, {init.describe()}]",
                        ker.integral, richardson_dcdr(sys, motif, u, init, cfg), tol)


def kernel_quadrature_report(traj: Trajectory, t_probe: float, tol: float = 1e-7) -> OracleReport:
    ker = kernel(traj)
    i = int(np.argmin(np.abs(traj.t - t_probe)))
    t_at = float(traj.t[i])
    return OracleReport(f"lambda vs nested quadrature [{traj.motif.name}, u={traj.u:g}, t={t_at:g}]",
                        float(ker.lam[i]), lambda_by_quadrature(traj, t_at), tol, relative=False)


def constant_rate_kernel_report(traj: Trajectory, rate: float, t_probe: float,
                                tol: float = 1e-9) -> OracleReport:
    ker = kernel(traj)
    i = int(np.argmin(np.abs(traj.t - t_probe)))
    exact = float(constant_rate_kernel(rate, traj.T, traj.t[i]))
    return OracleReport(f"lambda vs constant-rate closed form [{traj.motif.name}, u={traj.u:g}, "
                        f"t={traj.t[i]:g}]", float(ker.lam[i]), exact, tol, relative=False)


def closed_form_report(traj: Trajectory, tol: float = 1e-9) -> OracleReport:
    return OracleReport(f"scalar closed form [{traj.motif.name}, u={traj.u:g}, x0={traj.x0[0]:g}]",
                        scalar_closed_form_gap(traj), 0.0, tol, relative=False)


def identity_report(traj: Trajectory, tol: float = 1e-7) -> OracleReport:
    """int q (co-integrated) against int lambda g (backward pass), scaled by 1 + |int q|."""
    ker = kernel(traj)
    iq = float(traj.int_q[-1])
    scaled = abs(iq - ker.integral) / (1.0 + abs(iq))
    return OracleReport(f"int q vs int lambda g [{traj.motif.name}, u={traj.u:g}]",
                        scaled, 0.0, tol, relative=False, note="engine field holds the scaled gap")
