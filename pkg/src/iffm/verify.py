"""The default oracle suite run by ``iffm verify`` and ``iffm reproduce``."""

from __future__ import annotations

import numpy as np

from .classify import Sign, sign_profile
from .config import UNIT_SCALAR, ExperimentConfig
from .integrator import SimConfig, simulate
from .motifs import InitialPolicy, make_motif
from .oracle import (OracleReport, closed_form_report, constant_rate_kernel_report,
                     identity_report, kernel_quadrature_report, q_terminal_report,
                     richardson_report)

PROBE_INPUTS = (0.1, 1.0, 10.0)
KERNEL_PROBES = (0.0, 0.2, 0.5, 0.8, 0.95)  # fractions of T

# fixed sign of g for scalar systems with a closed-form g (x0 > 0, y0 = 1)
SCALAR_G_SIGN = {1: Sign.NONPOSITIVE, 3: Sign.NONNEGATIVE, 6: Sign.NONNEGATIVE,
                 8: Sign.NONPOSITIVE}


def g_sign_violation(series, expected: Sign) -> float:
    """Largest excursion of ``series`` against the expected sign (0 if none)."""
    v = np.asarray(series, dtype=float)
    if expected is Sign.NONNEGATIVE:
        return float(max(0.0, -v.min()))
    if expected is Sign.NONPOSITIVE:
        return float(max(0.0, v.max()))
    raise ValueError(f"expected a one-sided sign, got {expected}")


def scalar_suite(cfg: SimConfig) -> list[OracleReport]:
    reports = []
    for system in range(1, 9):
        motif = make_motif(f"scalar-{system}")
        for x0 in (0.5, 2.0):
            init = InitialPolicy.explicit([x0], 1.0, label=f"x0={x0:g}")
            for u in (0.5, 2.0):
                traj = simulate(UNIT_SCALAR, motif, u, init, cfg)
                if system == 1:
                    # x and p do not depend on the output equation
                    reports.append(closed_form_report(traj))
                if system in SCALAR_G_SIGN:
                    expected = SCALAR_G_SIGN[system]
                    prof = sign_profile(traj.g)
                    viol = g_sign_violation(traj.g, expected)
                    reports.append(OracleReport(
                        f"g sign {expected.value} [{motif.name}, u={u:g}, x0={x0:g}]",
                        viol, 0.0, 1e-10, relative=False, note=f"profile {prof.value.value}"))
        init = InitialPolicy.explicit([2.0], 1.0, label="x0=2")
        for u in PROBE_INPUTS:
            reports.append(q_terminal_report(UNIT_SCALAR, motif, u, init, cfg))
    return reports


def config_suite(exp: ExperimentConfig) -> list[OracleReport]:
    cfg = exp.sim
    reports = []
    for entry in exp.motifs:
        motif = entry.motif
        sys = exp.system_for(motif)
        inits = exp.policies(entry)
        for init in inits:
            for u in PROBE_INPUTS:
                reports.append(q_terminal_report(sys, motif, u, init, cfg))
                reports.append(identity_report(simulate(sys, motif, u, init, cfg)))
        traj = simulate(sys, motif, 1.0, inits[0], cfg)
        reports.append(kernel_quadrature_report(traj, 0.5))
        reports.append(richardson_report(sys, motif, 1.0, inits[0], cfg))
        if motif.system == 2:
            # a = d u is constant, so the kernel has a closed form
            for t in KERNEL_PROBES:
                reports.append(constant_rate_kernel_report(traj, motif.d * 1.0, t * cfg.T))
    return reports


def default_suite(exp: ExperimentConfig) -> list[OracleReport]:
    return scalar_suite(exp.sim) + config_suite(exp)
