"""Sign profiles, monotonicity certificates and non-monotonicity witnesses.

A cDR derivative equals the integral of lambda * g, and also minus the
integral of lambda' * G. A fixed sign for both factors of either product
certifies the derivative's sign at that input; a grid where the derivative
takes both signs (confirmed by finite differences) proves non-monotonicity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .integrator import KernelProfile, SimConfig, Trajectory
from .linsys import LinearSubsystem
from .motifs import InitialPolicy, MotifSpec
from .response import SweepResult, sweep_many

EPS_SIGN = 1e-9
EPS_WITNESS = 1e-8


class Sign(str, enum.Enum):
    NONNEGATIVE = "NonNegative"
    NONPOSITIVE = "NonPositive"
    ZERO = "IdenticallyZero"
    MIXED = "Mixed"

    @property
    def fixed(self) -> bool:
        return self is not Sign.MIXED


class Monotone(str, enum.Enum):
    NONDECREASING = "nondecreasing"
    NONINCREASING = "nonincreasing"
    CONSTANT = "constant"
    NONMONOTONE = "nonmonotone"
    INIT_DEPENDENT = "init-dependent"
    INCONCLUSIVE = "inconclusive"

    @property
    def monotone(self) -> bool:
        return self in (Monotone.NONDECREASING, Monotone.NONINCREASING, Monotone.CONSTANT)


@dataclass(frozen=True)
class SignProfile:
    value: Sign
    worst_violation: float
    where: float

    @property
    def fixed(self) -> bool:
        return self.value.fixed


def sign_profile(samples, eps: float = EPS_SIGN, t=None) -> SignProfile:
    """Classify a series as NonNegative, NonPositive, IdenticallyZero or Mixed.

    A sample counts as zero when |v| <= eps * (1 + max of |v| over samples so
    far). ``worst_violation`` is the largest excursion against the reported
    sign (for Mixed, the smaller of the two opposite excursions) and ``where``
    its position in ``t`` (or its index when ``t`` is omitted).
    """
    v = np.asarray(samples, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValueError("sign_profile needs at least one sample")
    pos = t if t is not None else np.arange(v.size, dtype=float)
    pos = np.asarray(pos, dtype=float)
    band = eps * (1.0 + np.maximum.accumulate(np.abs(v)))
    above = v > band
    below = v < -band
    i_max = int(np.argmax(v))
    i_min = int(np.argmin(v))
    if above.any() and below.any():
        if v[i_max] <= -v[i_min]:
            return SignProfile(Sign.MIXED, float(v[i_max]), float(pos[i_max]))
        return SignProfile(Sign.MIXED, float(-v[i_min]), float(pos[i_min]))
    if above.any():
        return SignProfile(Sign.NONNEGATIVE, max(0.0, float(-v[i_min])), float(pos[i_min]))
    if below.any():
        return SignProfile(Sign.NONPOSITIVE, max(0.0, float(v[i_max])), float(pos[i_max]))
    i_abs = int(np.argmax(np.abs(v)))
    return SignProfile(Sign.ZERO, float(abs(v[i_abs])), float(pos[i_abs]))


def _sign_num(s: Sign) -> int:
    return {Sign.NONNEGATIVE: 1, Sign.NONPOSITIVE: -1, Sign.ZERO: 0}[s]


def _direction(sign: int) -> Monotone:
    if sign > 0:
        return Monotone.NONDECREASING
    if sign < 0:
        return Monotone.NONINCREASING
    return Monotone.CONSTANT


@dataclass(frozen=True)
class Certificate:
    branch: str  # "Thm1-i" (lambda and g) or "Thm1-ii" (lambda' and G)
    direction: Monotone

    def __str__(self):
        return f"{self.branch}:{self.direction.value}"


def theorem1_certificate(traj: Trajectory, ker: KernelProfile,
                         eps: float = EPS_SIGN) -> Certificate | None:
    """Per-input sign certificate for the cDR derivative, or None."""
    if traj.t.shape != ker.t.shape:
        raise ValueError("trajectory and kernel must share the sample grid")
    lam = sign_profile(ker.lam, eps, traj.t)
    g = sign_profile(traj.g, eps, traj.t)
    if lam.fixed and g.fixed:
        return Certificate("Thm1-i", _direction(_sign_num(lam.value) * _sign_num(g.value)))
    lam_dot = sign_profile(ker.lam_dot, eps, traj.t)
    G = sign_profile(traj.G, eps, traj.t)
    if lam_dot.fixed and G.fixed:
        return Certificate("Thm1-ii", _direction(-_sign_num(lam_dot.value) * _sign_num(G.value)))
    return None


@dataclass(frozen=True)
class PointSummary:
    """What the classifier keeps from one trajectory of a sweep."""

    certificate: Certificate | None
    a_sign: Sign
    G_sign: Sign


def summarize_point(traj: Trajectory, ker: KernelProfile) -> PointSummary:
    return PointSummary(theorem1_certificate(traj, ker), sign_profile(traj.a).value,
                        sign_profile(traj.G).value)


@dataclass(frozen=True)
class Witness:
    """Two grid inputs, u_minus < u_plus, where the cDR derivative has opposite signs."""

    u_minus: float
    u_plus: float
    d_minus: float
    d_plus: float

    @property
    def u_pos(self) -> float:
        return self.u_minus if self.d_minus > 0 else self.u_plus

    @property
    def u_neg(self) -> float:
        return self.u_minus if self.d_minus < 0 else self.u_plus

    def to_dict(self) -> dict:
        return {"u_minus": self.u_minus, "u_plus": self.u_plus,
                "d_minus": self.d_minus, "d_plus": self.d_plus}


def theorem2_witness(result: SweepResult, eps: float = EPS_WITNESS) -> Witness | None:
    """Largest positive and most negative d_cdr_q, if both clear the band and FD agrees."""
    ok = [r for r in result.records if r.ok]
    if not ok:
        return None
    d = np.array([r.d_cdr_q for r in ok])
    i_pos = int(np.argmax(d))
    i_neg = int(np.argmin(d))
    # per-entry band: eps absolute plus eps relative to the entry itself
    if not (d[i_pos] > eps * (1.0 + abs(d[i_pos])) and d[i_neg] < -eps * (1.0 + abs(d[i_neg]))):
        return None
    if not (ok[i_pos].d_cdr_fd > 0 and ok[i_neg].d_cdr_fd < 0):
        return None
    lo, hi = sorted((i_pos, i_neg))
    return Witness(ok[lo].u, ok[hi].u, float(d[lo]), float(d[hi]))


def dr_monotonicity(result: SweepResult, eps: float = EPS_SIGN) -> Monotone:
    dr = result.column("DR", ok_only=True)
    if dr.size < 2:
        return Monotone.INCONCLUSIVE
    prof = sign_profile(np.diff(dr), eps)
    if prof.fixed:
        return _direction(_sign_num(prof.value))
    return Monotone.NONMONOTONE


def cdr_monotonicity(result: SweepResult, eps: float = EPS_SIGN) -> Monotone:
    d = result.column("d_cdr_q", ok_only=True)
    if d.size == 0:
        return Monotone.INCONCLUSIVE
    prof = sign_profile(d, eps)
    if prof.fixed:
        return _direction(_sign_num(prof.value))
    if theorem2_witness(result) is not None:
        return Monotone.NONMONOTONE
    return Monotone.INCONCLUSIVE


def combine(values: Sequence[Monotone]) -> Monotone:
    """Motif-level verdict from per-init verdicts."""
    vals = set(values)
    if len(vals) == 1:
        return next(iter(vals))
    if Monotone.NONMONOTONE in vals:
        return Monotone.NONMONOTONE
    if Monotone.INCONCLUSIVE in vals:
        return Monotone.INCONCLUSIVE
    # a constant profile is compatible with either direction
    directed = vals - {Monotone.CONSTANT}
    if len(directed) == 1:
        return next(iter(directed))
    return Monotone.INIT_DEPENDENT


def combine_signs(values: Sequence[Sign]) -> Sign:
    vals = set(values) - {Sign.ZERO}
    if not vals:
        return Sign.ZERO
    if len(vals) == 1:
        return next(iter(vals))
    return Sign.MIXED


@dataclass
class InitVerdict:
    init: str
    dr: Monotone
    cdr: Monotone
    certificate: str
    witness: Witness | None
    failures: int

    def to_dict(self) -> dict:
        return {"init": self.init, "dr": self.dr.value, "cdr": self.cdr.value,
                "certificate": self.certificate,
                "witness": self.witness.to_dict() if self.witness else None,
                "failures": self.failures}


@dataclass
class Verdict:
    motif: str
    dr_monotone: Monotone
    cdr_monotone: Monotone
    certificate: str  # "Thm1-i", "Thm1-ii", "DR-level" or "none"
    witnesses: Witness | None
    a_sign: Sign
    G_sign: Sign
    per_init: list[InitVerdict] = field(default_factory=list)
    sweeps: list[SweepResult] = field(default_factory=list, repr=False)

    @property
    def dr_nonmonotone_somewhere(self) -> bool:
        return any(v.dr is Monotone.NONMONOTONE for v in self.per_init)

    def to_dict(self) -> dict:
        return {"motif": self.motif, "dr": self.dr_monotone.value,
                "dr_any_init_nonmonotone": self.dr_nonmonotone_somewhere,
                "cdr": self.cdr_monotone.value, "certificate": self.certificate,
                "witnesses": self.witnesses.to_dict() if self.witnesses else None,
                "a_sign": self.a_sign.value, "G_sign": self.G_sign.value,
                "per_init": [v.to_dict() for v in self.per_init]}


def _grid_certificate(result: SweepResult) -> str:
    """The certificate branch shared by every ok grid point, or "none"."""
    certs = [r.detail.certificate for r in result.records if r.ok]
    if not certs or any(c is None for c in certs):
        return "none"
    for branch in ("Thm1-i", "Thm1-ii"):
        same = [c for c in certs if c.branch == branch]
        if len(same) == len(certs) and len({c.direction for c in same}) == 1:
            return str(same[0])
    return "none"


def analyze_sweeps(motif: MotifSpec, sweeps: Sequence[SweepResult]) -> Verdict:
    if not sweeps:
        raise ValueError("at least one sweep is required")
    per_init = []
    for res in sweeps:
        if any(r.ok and not isinstance(r.detail, PointSummary) for r in res.records):
            raise ValueError("sweeps must be run with analyzer=summarize_point")
        dr = dr_monotonicity(res)
        cdr = cdr_monotonicity(res)
        cert = _grid_certificate(res)
        if cert == "none" and dr.monotone:
            cert = "DR-level"
        per_init.append(InitVerdict(res.init, dr, cdr, cert, theorem2_witness(res),
                                    len(res.failures())))
    certs = [v.certificate for v in per_init if v.certificate.startswith("Thm1")]
    cert = certs[0].split(":")[0] if certs else (
        "DR-level" if all(v.certificate == "DR-level" for v in per_init) else "none")
    witness = next((v.witness for v in per_init if v.witness is not None), None)
    a_sign = combine_signs([r.detail.a_sign for s in sweeps for r in s.records if r.ok])
    G_sign = combine_signs([r.detail.G_sign for s in sweeps for r in s.records if r.ok])
    return Verdict(motif=motif.name, dr_monotone=combine([v.dr for v in per_init]),
                   cdr_monotone=combine([v.cdr for v in per_init]), certificate=cert,
                   witnesses=witness, a_sign=a_sign, G_sign=G_sign, per_init=per_init,
                   sweeps=list(sweeps))


def verdict(motif: MotifSpec, sys: LinearSubsystem, inits: Sequence[InitialPolicy],
            cfg: SimConfig = SimConfig(), u_grid=None, *, jobs: int = 1) -> Verdict:
    return verdicts([(motif, sys, inits)], cfg, u_grid, jobs=jobs)[0]


def verdicts(cases: Sequence[tuple[MotifSpec, LinearSubsystem, Sequence[InitialPolicy]]],
             cfg: SimConfig = SimConfig(), u_grid=None, *, jobs: int = 1) -> list[Verdict]:
    """Verdicts for several motifs, sharing one worker pool across all sweeps."""
    flat = []
    for motif, sys, inits in cases:
        if not inits:
            raise ValueError(f"{motif.name}: at least one initial policy is required")
        flat += [(sys, motif, init) for init in inits]
    results = sweep_many(flat, cfg, u_grid, jobs=jobs, analyzer=summarize_point)
    out = []
    k = 0
    for motif, _, inits in cases:
        out.append(analyze_sweeps(motif, results[k:k + len(inits)]))
        k += len(inits)
    return out
